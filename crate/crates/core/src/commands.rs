//! Report emitters behind the command-line subcommands.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::bifurcation::{
    branch_coefficients, find_crossings, frechet_fd_oracle, kernel_dimension,
    linear_stability_threshold, pattern_field, pattern_preset, psi, BranchCoefficients,
    BranchOptions, Criticality, CrossingOptions, CrossingSet, Eigenvalue, NoCrossingReason,
    PatternPreset, ReducedCurvature, ValidationFlags,
};
use crate::config::RunConfig;
use crate::connectivity::{format_mode, ModeClass, Potential};
use crate::error::{Error, Result};
use crate::field_sim::{write_outputs, Manifest, Simulator};
use crate::homogeneous::{asymptotic_limits, kappa_c, solve_rho_bar_inf, ModelParams};

/// Shortest round-trip formatting; identical inputs give identical bytes.
fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Logarithmic grid of `n` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::Config(format!(
            "log grid needs 0 < lo ≤ hi, got [{lo}, {hi}]"
        )));
    }
    Ok(match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| match i {
                0 => lo,
                i if i == n - 1 => hi,
                _ => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp(),
            })
            .collect(),
    })
}

fn crossing_options(cfg: &RunConfig) -> CrossingOptions {
    let mut o = CrossingOptions::new(cfg.analysis.k_max, cfg.analysis.kappa_max);
    o.modes = cfg.mode_options();
    o.scan_points = cfg.analysis.scan_points;
    o
}

/// `kappa, rho_bar_inf, phi0, rho_inf_at_zero, d_rho_bar_d_kappa` per κ.
pub fn cmd_homogeneous(cfg: &RunConfig, kappas: &[f64]) -> Result<String> {
    let w = cfg.potential()?;
    let params = cfg.params(&w)?;
    homogeneous_table(&params, kappas)
}

/// Homogeneous table for explicit parameters.
pub fn homogeneous_table(params: &ModelParams, kappas: &[f64]) -> Result<String> {
    let mut out = String::from("kappa,rho_bar_inf,phi0,rho_inf_at_zero,d_rho_bar_d_kappa\n");
    for &k in kappas {
        let st = solve_rho_bar_inf(params, k)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(k),
            num(st.rho_bar_inf),
            num(st.phi0),
            num(st.rho_inf_at_zero),
            num(st.d_rho_bar_d_kappa)
        );
    }
    Ok(out)
}

/// `k, theta, w_tilde, ratio, class_id, four_comp_factor`, one row per Fourier index.
pub fn cmd_modes(cfg: &RunConfig) -> Result<String> {
    let w = cfg.potential()?;
    let classes = crate::connectivity::mode_table(&w, cfg.analysis.k_max, &cfg.mode_options())?;
    Ok(mode_csv(&classes))
}

pub fn mode_csv(classes: &[ModeClass]) -> String {
    let mut out = String::from("k,theta,w_tilde,ratio,class_id,four_comp_factor\n");
    for c in classes {
        for m in &c.members {
            let _ = writeln!(
                out,
                "\"{}\",{},{},{},{},{}",
                format_mode(m),
                num(c.theta),
                num(c.w_tilde),
                num(c.ratio),
                c.id,
                num(c.four_comp_factor)
            );
        }
    }
    out
}

/// Diagram samples and markers.
#[derive(Debug, Clone)]
pub struct Diagram {
    /// `kappa, psi, ratio_<k>...` with the four-component factor applied.
    pub curves: String,
    /// `marker, kappa, value`.
    pub markers: String,
}

fn column_name(c: &ModeClass) -> String {
    let parts: Vec<String> = c.representative.iter().map(|v| v.to_string()).collect();
    format!("ratio_{}", parts.join("_"))
}

/// Ψ(κ) on a log grid from κ_c to `kappa_max` with one column per class of positive ratio.
pub fn cmd_diagram(cfg: &RunConfig, points: usize) -> Result<Diagram> {
    let w = cfg.potential()?;
    let params = cfg.params(&w)?;
    let opts = crossing_options(cfg);
    let set = find_crossings(&w, &params, &opts)?;
    let shown: Vec<&ModeClass> = set
        .classes
        .iter()
        .filter(|c| c.effective_ratio() > 0.0 && c.representative.iter().any(|&v| v > 0))
        .collect();
    let mut curves = String::from("kappa,psi");
    for c in &shown {
        curves.push(',');
        curves.push_str(&column_name(c));
    }
    curves.push('\n');
    let kc = set.kappa_c;
    for k in log_grid(kc * (1.0 + 1e-6), cfg.analysis.kappa_max, points)? {
        let _ = write!(curves, "{},{}", num(k), num(psi(&params, k)?));
        for c in &shown {
            let _ = write!(curves, ",{}", num(c.effective_ratio()));
        }
        curves.push('\n');
    }
    Ok(Diagram {
        curves,
        markers: markers_csv(&set),
    })
}

fn markers_csv(set: &CrossingSet) -> String {
    let mut m = String::from("marker,kappa,value\n");
    let _ = writeln!(m, "kappa_c,{},", num(set.kappa_c));
    let _ = writeln!(m, "psi_limit,,{}", num(set.psi_limit));
    if set.psi_cap.is_finite() {
        let _ = writeln!(m, "psi_cap,,{}", num(set.psi_cap));
    }
    if let Some(first) = set.crossings.first() {
        let _ = writeln!(
            m,
            "linear_stability,{},{}",
            num(first.kappa_star),
            num(first.class.effective_ratio())
        );
    }
    for p in &set.crossings {
        let _ = writeln!(
            m,
            "\"crossing {}\",{},{}",
            p.class.label(),
            num(p.kappa_star),
            num(p.class.effective_ratio())
        );
    }
    m
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    pub k: Vec<usize>,
    pub class: Vec<Vec<usize>>,
    pub class_id: usize,
    pub theta: f64,
    pub w_tilde: f64,
    pub ratio: f64,
    pub four_comp_factor: f64,
    pub kappa_star: f64,
    pub residual: f64,
    pub kernel_dim: usize,
    pub flags: ValidationFlags,
    #[serde(rename = "C1")]
    pub c1: Option<f64>,
    #[serde(rename = "C2")]
    pub c2: Option<f64>,
    #[serde(rename = "A3")]
    pub a3: Option<f64>,
    #[serde(rename = "K1")]
    pub k1: Option<f64>,
    #[serde(rename = "K2")]
    pub k2: Option<f64>,
    #[serde(rename = "K3")]
    pub k3: Option<f64>,
    pub kappa_pp0: Option<f64>,
    pub label: Option<Criticality>,
    pub k1_intermediate: Option<f64>,
    pub k1_chain_rule: Option<f64>,
    pub k2_eigenvalue_slope: Option<f64>,
    pub kappa_pp0_fd: Option<f64>,
    pub reduced: Option<ReducedCurvature>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoCrossingEntry {
    pub class: Vec<Vec<usize>>,
    pub ratio: f64,
    pub reason: NoCrossingReason,
}

/// Full bifurcation report.
#[derive(Debug, Clone, Serialize)]
pub struct BifurcationReport {
    pub config_echo: Value,
    pub kappa_c: f64,
    pub rho_star: f64,
    pub psi_limit: f64,
    pub psi_cap: f64,
    pub linear_stability_threshold: Option<f64>,
    pub crossings: Vec<CrossingReport>,
    pub no_crossing: Vec<NoCrossingEntry>,
}

/// Crossings, validation flags and branch coefficients.
pub fn cmd_bifurcations(cfg: &RunConfig) -> Result<BifurcationReport> {
    let w = cfg.potential()?;
    let params = cfg.params(&w)?;
    bifurcation_report(cfg, &w, &params)
}

pub fn bifurcation_report(
    cfg: &RunConfig,
    w: &Potential,
    params: &ModelParams,
) -> Result<BifurcationReport> {
    let set = find_crossings(w, params, &crossing_options(cfg))?;
    let (rho_star, _) = asymptotic_limits(params)?;
    let bopts = BranchOptions {
        fd_oracle: cfg.analysis.fd_oracle,
        reduced: cfg.analysis.fd_oracle,
    };
    let mut crossings = Vec::new();
    for pt in &set.crossings {
        let bc: Option<BranchCoefficients> = if cfg.analysis.branch {
            Some(branch_coefficients(pt, params, Some(w), bopts)?)
        } else {
            None
        };
        let c = &pt.class;
        crossings.push(CrossingReport {
            k: c.representative.clone(),
            class: c.members.clone(),
            class_id: c.id,
            theta: c.theta,
            w_tilde: c.w_tilde,
            ratio: c.ratio,
            four_comp_factor: c.four_comp_factor,
            kappa_star: pt.kappa_star,
            residual: pt.residual,
            kernel_dim: pt.kernel_dim,
            flags: pt.flags,
            c1: bc.as_ref().map(|b| b.c1),
            c2: bc.as_ref().map(|b| b.c2),
            a3: bc.as_ref().map(|b| b.a3),
            k1: bc.as_ref().map(|b| b.k1),
            k2: bc.as_ref().map(|b| b.k2),
            k3: bc.as_ref().map(|b| b.k3),
            kappa_pp0: bc.as_ref().map(|b| b.kappa_pp0),
            label: bc.as_ref().map(|b| b.label),
            k1_intermediate: bc.as_ref().map(|b| b.k1_intermediate),
            k1_chain_rule: bc.as_ref().map(|b| b.k1_chain_rule),
            k2_eigenvalue_slope: bc.as_ref().map(|b| b.k2_eigenvalue_slope),
            kappa_pp0_fd: bc.as_ref().and_then(|b| b.kappa_pp0_fd),
            reduced: bc.as_ref().and_then(|b| b.reduced),
            warnings: bc.map(|b| b.warnings).unwrap_or_default(),
        });
    }
    let no_crossing = set
        .no_crossing
        .iter()
        .map(|(c, r)| NoCrossingEntry {
            class: c.members.clone(),
            ratio: c.effective_ratio(),
            reason: *r,
        })
        .collect();
    Ok(BifurcationReport {
        config_echo: cfg.echo(),
        kappa_c: set.kappa_c,
        rho_star,
        psi_limit: set.psi_limit,
        psi_cap: set.psi_cap,
        linear_stability_threshold: set.crossings.first().map(|p| p.kappa_star),
        crossings,
        no_crossing,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Numerical(e.to_string()))
}

/// Grid CSV of a pattern preset; rows run along the last axis.
pub fn cmd_pattern(preset: &PatternPreset, grid_n: usize, d: usize, l: f64) -> Result<String> {
    let terms = pattern_preset(preset, d, l)?;
    let field = pattern_field(&terms, grid_n, d, l)?;
    let mut out = String::new();
    for row in field.chunks(grid_n) {
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Run the configured simulation and write snapshots, timeseries and manifest to `dir`.
pub fn cmd_simulate(cfg: &RunConfig, dir: &Path) -> Result<Manifest> {
    let sim_cfg = cfg.sim_config()?;
    let times = cfg
        .sim
        .as_ref()
        .map(|s| s.snapshot_times.clone())
        .unwrap_or_default();
    let sim = Simulator::new(sim_cfg)?;
    let out = sim.run(&times)?;
    write_outputs(dir, sim.grid(), &out, sim.homogeneous(), cfg.echo())
}

/// Oracle evaluation with the matching closed form.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub kappa: f64,
    pub k: Vec<usize>,
    pub class: Vec<Vec<usize>>,
    pub order: usize,
    pub value: f64,
    /// `λ_k` for order 1, `0` for order 2, `−N''' C³ ‖ω²‖²` for order 3.
    pub closed_form: f64,
}

/// `⟨D^order Ḡ[ω_[k],…], ω_[k]⟩` at κ on the analysis grid.
pub fn cmd_oracle(cfg: &RunConfig, kappa: f64, k: &[usize], order: usize) -> Result<OracleReport> {
    let w = cfg.potential()?;
    let params = cfg.params(&w)?;
    if k.len() != params.d {
        return Err(Error::Config(format!(
            "mode {k:?} does not have {} components",
            params.d
        )));
    }
    let classes = crate::connectivity::mode_table(
        &w,
        cfg.analysis.k_max.max(*k.iter().max().unwrap_or(&0)),
        &cfg.mode_options(),
    )?;
    let class = crate::bifurcation::class_containing(&classes, k)
        .ok_or_else(|| Error::Config(format!("mode {k:?} is not in the mode table")))?
        .clone();
    let value = frechet_fd_oracle(&params, &w, kappa, &class.members, order)?;
    let closed_form = match order {
        1 => {
            let (_, table): (usize, Vec<Eigenvalue>) =
                kernel_dimension(&params, kappa, std::slice::from_ref(&class))?;
            table[0].lambda
        }
        2 => 0.0,
        _ => {
            let st = solve_rho_bar_inf(&params, kappa)?;
            let (_, _, n3) = crate::bifurcation::response_derivatives(&st, &params)?;
            let c = class.conv_eigenvalue(params.l);
            -n3 * c.powi(3) * crate::connectivity::norm_omega_sq(&class.members, params.l)
        }
    };
    Ok(OracleReport {
        kappa,
        k: k.to_vec(),
        class: class.members,
        order,
        value,
        closed_form,
    })
}

/// Smallest κ* as a standalone value.
pub fn first_bifurcation(cfg: &RunConfig) -> Result<f64> {
    let w = cfg.potential()?;
    let params = cfg.params(&w)?;
    linear_stability_threshold(&w, &params, &crossing_options(cfg))
}

/// κ_c for a configuration.
pub fn critical_kappa(cfg: &RunConfig) -> Result<f64> {
    let w = cfg.potential()?;
    Ok(kappa_c(&cfg.params(&w)?))
}
