//! Command-line front end; exit codes 0 success, 2 configuration error, 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nfbif::bifurcation::PatternPreset;
use nfbif::commands;
use nfbif::config::RunConfig;
use nfbif::error::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "nfbif",
    version,
    about = "Bifurcations and pattern onset in a nonlocal Fokker–Planck neural field"
)]
struct Cli {
    /// JSON run configuration.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Override a configuration field, e.g. `--set analysis.kappa_max=200`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output file (stdout if absent) or directory for `simulate`.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the homogeneous state over κ.
    Homogeneous {
        /// Explicit κ values.
        #[arg(long, value_delimiter = ',')]
        kappa: Vec<f64>,
        /// Logarithmic grid `lo,hi,n`.
        #[arg(long, value_delimiter = ',')]
        log_grid: Option<Vec<f64>>,
    },
    /// Fourier mode table.
    Modes,
    /// Threshold function and mode ratios over κ, with a markers file next to the output.
    Diagram {
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Crossings, validation flags and branch coefficients as JSON.
    Bifurcations,
    /// Sample a tangent pattern on a grid.
    Pattern {
        /// mode_k, class_k, superpose_2nd_3rd, superpose_1st_3rd, superpose_1st_2nd, hex or zero.
        #[arg(long)]
        preset: String,
        /// Mode index for mode_k and class_k.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, default_value_t = 128)]
        grid_n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
    },
    /// Time evolution; writes snapshots, timeseries and manifest.
    Simulate,
    /// Finite-difference Fréchet derivative along a mode.
    Oracle {
        #[arg(long)]
        kappa: f64,
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config is required for this command".into()))?;
    RunConfig::load(path, &cli.overrides)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn preset(name: &str, k: &[usize]) -> Result<PatternPreset> {
    Ok(match name {
        "mode_k" => PatternPreset::ModeK { k: k.to_vec() },
        "class_k" => PatternPreset::ClassK { k: k.to_vec() },
        "superpose_2nd_3rd" => PatternPreset::Superpose2nd3rd,
        "superpose_1st_3rd" => PatternPreset::Superpose1st3rd,
        "superpose_1st_2nd" => PatternPreset::Superpose1st2nd,
        "hex" => PatternPreset::Hex,
        "zero" => PatternPreset::Zero,
        other => return Err(Error::Config(format!("unknown pattern preset '{other}'"))),
    })
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("NF_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Config(format!("NF_THREADS must be a positive integer, got '{v}'"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<()> {
    init_threads()?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Homogeneous { kappa, log_grid } => {
            let cfg = load(cli)?;
            let mut grid = kappa.clone();
            if let Some(g) = log_grid {
                if g.len() != 3 {
                    return Err(Error::Config(format!(
                        "--log-grid takes lo,hi,n, got {} values",
                        g.len()
                    )));
                }
                if g[2] < 0.0 || g[2].fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "log grid point count must be a nonnegative integer, got {}",
                        g[2]
                    )));
                }
                grid.extend(commands::log_grid(g[0], g[1], g[2] as usize)?);
            }
            emit(out, &commands::cmd_homogeneous(&cfg, &grid)?)
        }
        Command::Modes => emit(out, &commands::cmd_modes(&load(cli)?)?),
        Command::Diagram { points } => {
            let d = commands::cmd_diagram(&load(cli)?, *points)?;
            match out {
                Some(p) => {
                    emit(Some(p), &d.curves)?;
                    emit(Some(&p.with_extension("markers.csv")), &d.markers)
                }
                None => {
                    print!("{}", d.curves);
                    eprint!("{}", d.markers);
                    Ok(())
                }
            }
        }
        Command::Bifurcations => emit(
            out,
            &commands::to_json(&commands::cmd_bifurcations(&load(cli)?)?)?,
        ),
        Command::Pattern {
            preset: name,
            k,
            grid_n,
            d,
            l,
        } => emit(
            out,
            &commands::cmd_pattern(&preset(name, k)?, *grid_n, *d, *l)?,
        ),
        Command::Simulate => {
            let cfg = load(cli)?;
            let dir = out
                .map(Path::to_path_buf)
                .unwrap_or_else(|| cfg.output_dir.clone());
            let manifest = commands::cmd_simulate(&cfg, &dir)?;
            eprintln!(
                "wrote {} snapshots to {}",
                manifest.snapshots.len(),
                dir.display()
            );
            Ok(())
        }
        Command::Oracle { kappa, k, order } => emit(
            out,
            &commands::to_json(&commands::cmd_oracle(&load(cli)?, *kappa, k, *order)?)?,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
