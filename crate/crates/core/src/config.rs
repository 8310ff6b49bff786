//! JSON run configuration with dotted-path overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::connectivity::{Exchangeable, ModeTableOptions, Potential, PotentialSpec};
use crate::error::{Error, Result};
use crate::field_sim::{SimConfig, SimSpec};
use crate::gain::{GainFunction, GainSpec};
use crate::homogeneous::ModelParams;

fn default_tau() -> f64 {
    10.0
}

/// Scalar model parameters; `W0` comes from the potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// Torus side length.
    pub l: f64,
    /// Spatial dimension.
    pub d: usize,
    /// External input.
    pub b: f64,
    /// Time constant in ms.
    #[serde(default = "default_tau")]
    pub tau: f64,
}

fn default_k_max() -> usize {
    8
}

fn default_kappa_max() -> f64 {
    1e4
}

fn default_scan_points() -> usize {
    512
}

fn default_true() -> bool {
    true
}

fn default_grid_n() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_kappa_max")]
    pub kappa_max: f64,
    #[serde(default)]
    pub exchangeable: Exchangeable,
    /// Four-component shifts `r^β`; absent for the one-component model.
    #[serde(default)]
    pub shifts: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
    /// Compute branch coefficients for each crossing.
    #[serde(default = "default_true")]
    pub branch: bool,
    /// Cross-check branch coefficients with the finite-difference oracle.
    #[serde(default = "default_true")]
    pub fd_oracle: bool,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            k_max: default_k_max(),
            kappa_max: default_kappa_max(),
            exchangeable: Exchangeable::default(),
            shifts: None,
            scan_points: default_scan_points(),
            branch: true,
            fd_oracle: true,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Top-level configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub gain: GainSpec,
    pub potential: PotentialSpec,
    /// Points per axis of the potential grid used by the analysis.
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub sim: Option<SimSpec>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

/// Set `path = value` in a JSON document, creating objects along the way.
pub fn apply_override(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Config(format!(
                "empty segment in override path '{path}'"
            )));
        }
        let obj = match cur {
            Value::Null => {
                *cur = Value::Object(Default::default());
                cur.as_object_mut().unwrap()
            }
            Value::Object(m) => m,
            _ => {
                return Err(Error::Config(format!(
                    "override path '{path}' crosses a non-object at '{part}'"
                )))
            }
        };
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(part.to_string()).or_insert(Value::Null);
    }
    Ok(())
}

/// Parse `key=value`; the value is read as JSON, falling back to a string.
pub fn parse_override(text: &str) -> Result<(String, Value)> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{text}' is not of the form key=value")))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

impl RunConfig {
    /// Parse a document; `base` resolves relative table paths.
    pub fn from_value(doc: Value, base: Option<&Path>) -> Result<Self> {
        let mut cfg: RunConfig =
            serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()))?;
        if let (PotentialSpec::GridTable { path }, Some(base)) = (&mut cfg.potential, base) {
            let p = Path::new(path.as_str());
            if p.is_relative() {
                *path = base.join(p).display().to_string();
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a JSON file and apply `key=value` overrides before validation.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut doc: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for o in overrides {
            let (k, v) = parse_override(o)?;
            apply_override(&mut doc, &k, v)?;
        }
        let base = path.parent().map(Path::to_path_buf);
        Self::from_value(doc, base.as_deref()).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Checks that do not need the potential samples.
    pub fn validate(&self) -> Result<()> {
        GainFunction::from_spec(&self.gain)?;
        if let PotentialSpec::GridTable { path } = &self.potential {
            if !Path::new(path).is_file() {
                return Err(Error::Config(format!(
                    "potential.path: file '{path}' does not exist"
                )));
            }
        }
        if !(self.model.l > 0.0 && self.model.b > 0.0 && self.model.tau > 0.0 && self.model.d >= 1)
        {
            return Err(Error::Config(
                "model: need l > 0, d ≥ 1, b > 0, tau > 0".into(),
            ));
        }
        if self.analysis.k_max == 0 {
            return Err(Error::Config("analysis.k_max must be positive".into()));
        }
        if !(self.analysis.kappa_max > 0.0) {
            return Err(Error::Config("analysis.kappa_max must be positive".into()));
        }
        if let Some(s) = &self.analysis.shifts {
            if s.len() != 4 || s.iter().any(|r| r.len() != self.model.d) {
                return Err(Error::Config(format!(
                    "analysis.shifts must be four vectors of length {}",
                    self.model.d
                )));
            }
        }
        Ok(())
    }

    pub fn gain(&self) -> Result<GainFunction> {
        GainFunction::from_spec(&self.gain)
    }

    /// Potential on the analysis grid.
    pub fn potential(&self) -> Result<Potential> {
        Potential::from_spec(&self.potential, self.model.l, self.model.d, self.grid_n)
    }

    /// Potential on an `n^d` grid.
    pub fn potential_on(&self, n: usize) -> Result<Potential> {
        Potential::from_spec(&self.potential, self.model.l, self.model.d, n)
    }

    /// Model parameters with `W0` from the potential's quadrature.
    pub fn params(&self, w: &Potential) -> Result<ModelParams> {
        ModelParams::new(
            self.model.l,
            self.model.d,
            self.model.b,
            self.model.tau,
            self.gain()?,
            w.w0(),
        )
    }

    pub fn mode_options(&self) -> ModeTableOptions {
        ModeTableOptions {
            exchangeable: self.analysis.exchangeable,
            shifts: self.analysis.shifts.clone(),
        }
    }

    /// Simulation configuration, with the kernel resampled on the simulation grid.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let spec = self
            .sim
            .as_ref()
            .ok_or_else(|| Error::Config("missing 'sim' block".into()))?;
        let w = self.potential_on(spec.nx)?;
        let params = self.params(&w)?;
        let mut spec = spec.clone();
        if spec.shifts.is_none() && spec.components == 4 {
            spec.shifts = self.analysis.shifts.clone();
        }
        SimConfig::new(&params, w, &spec)
    }

    pub fn echo(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }
}
