//! Snapshot and timeseries files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{DiscreteHomogeneous, Record, RunOutput, RunSummary};
use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotEntry {
    pub t: f64,
    pub file: String,
}

/// Index of a run's output files.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config_echo: serde_json::Value,
    pub grid: [usize; 2],
    pub discrete_homogeneous: DiscreteHomogeneous,
    pub hexagonality_definition: String,
    pub snapshots: Vec<SnapshotEntry>,
    pub timeseries: String,
    pub summary: RunSummary,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    }
}

/// `rhoBar_t{ms}.csv` with integral times printed without decimals.
pub fn snapshot_name(t: f64) -> String {
    let r = t.round();
    if (t - r).abs() <= 1e-9 * t.abs().max(1.0) {
        format!("rhoBar_t{}.csv", r as i64)
    } else {
        format!("rhoBar_t{t}.csv")
    }
}

/// Rows along the last axis, one row per index of the leading axes.
pub fn write_grid_csv(path: &Path, grid: PeriodicGrid, field: &[f64]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    for row in field.chunks(grid.n) {
        w.write_record(row.iter().map(|v| format!("{v:e}")))
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_timeseries_csv(path: &Path, records: &[Record]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record([
        "t",
        "deviation_l2",
        "dominant_kx",
        "dominant_ky",
        "hexagonality",
    ])
    .map_err(|e| csv_err(path, e))?;
    for r in records {
        let kx = r.dominant.first().copied().unwrap_or(0);
        let ky = r.dominant.get(1).copied().unwrap_or(0);
        w.write_record([
            format!("{}", r.t),
            format!("{:e}", r.deviation_l2),
            kx.to_string(),
            ky.to_string(),
            format!("{:e}", r.hexagonality),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes snapshots, `timeseries.csv` and `manifest.json` into `dir`.
pub fn write_outputs(
    dir: &Path,
    grid: PeriodicGrid,
    out: &RunOutput,
    homogeneous: DiscreteHomogeneous,
    config_echo: serde_json::Value,
) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut entries = Vec::new();
    for s in &out.snapshots {
        let name = snapshot_name(s.t);
        write_grid_csv(&dir.join(&name), grid, &s.rho_bar)?;
        entries.push(SnapshotEntry { t: s.t, file: name });
    }
    let ts: PathBuf = dir.join("timeseries.csv");
    write_timeseries_csv(&ts, &out.timeseries)?;
    let manifest = Manifest {
        config_echo,
        grid: [grid.n, grid.d],
        discrete_homogeneous: homogeneous,
        hexagonality_definition:
            "energy in {±(3,−3), ±(4,−1), ±(1,−4)} or its mirror image, whichever is larger, \
                                  divided by total non-constant energy of the mean field"
                .into(),
        snapshots: entries,
        timeseries: "timeseries.csv".into(),
        summary: out.summary.clone(),
    };
    let path = dir.join("manifest.json");
    let text =
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::Numerical(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(manifest)
}
