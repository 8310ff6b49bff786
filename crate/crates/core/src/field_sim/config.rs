//! Simulation settings.

use serde::{Deserialize, Serialize};

use crate::connectivity::Potential;
use crate::error::{Error, Result};
use crate::homogeneous::ModelParams;

/// Time integrator in `s`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Explicit Euler under the positivity bound.
    #[default]
    Explicit,
    /// Backward Euler in `s` with the input frozen over the step.
    ImplicitS,
}

/// Interface flux discretisation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    /// Exponentially fitted flux; sampled Gaussians are exact equilibria.
    #[default]
    ScharfetterGummel,
    /// First-order upwind drift with centred diffusion.
    Upwind,
}

/// What a point perturbation changes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointTarget {
    /// Add `amplitude` to the density cell nearest one standard deviation above the mean, then renormalise the column.
    #[default]
    Density,
    /// Shift the Gaussian centre of the column by `amplitude`.
    Centre,
}

/// Initial condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// Discrete steady state perturbed at one site.
    HomogeneousPlusPointPerturbation {
        #[serde(default = "default_point_amplitude")]
        amplitude: f64,
        /// Grid multi-index of the perturbed site (default origin).
        #[serde(default)]
        site: Option<Vec<usize>>,
        #[serde(default)]
        on: PointTarget,
    },
    /// Per-column Gaussian whose centre is shifted by `amplitude·ω_k(x)`.
    HomogeneousPlusMode { k: Vec<usize>, amplitude: f64 },
}

fn default_point_amplitude() -> f64 {
    1e-13
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec::HomogeneousPlusPointPerturbation {
            amplitude: default_point_amplitude(),
            site: None,
            on: PointTarget::Density,
        }
    }
}

fn default_nx() -> usize {
    64
}

fn default_ns() -> usize {
    256
}

fn default_components() -> usize {
    1
}

/// User-facing simulation block; times in ms, activity in activity units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub kappa: f64,
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default = "default_ns")]
    pub ns: usize,
    /// Defaults to `Φ(B) + 8/√κ`.
    #[serde(default)]
    pub s_max: Option<f64>,
    /// Defaults to the scheme's automatic step.
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_end: f64,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default = "default_components")]
    pub components: usize,
    #[serde(default)]
    pub shifts: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub flux: FluxKind,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Timeseries sampling interval; defaults to every step.
    #[serde(default)]
    pub record_interval: Option<f64>,
}

impl SimSpec {
    pub fn new(kappa: f64, t_end: f64) -> Self {
        SimSpec {
            kappa,
            nx: default_nx(),
            ns: default_ns(),
            s_max: None,
            dt: None,
            t_end,
            init: InitSpec::default(),
            components: 1,
            shifts: None,
            scheme: Scheme::default(),
            flux: FluxKind::default(),
            snapshot_times: Vec::new(),
            record_interval: None,
        }
    }
}

/// Validated configuration with the kernel sampled on the simulation grid.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Model parameters with `W0` replaced by the grid sum of the sampled kernel.
    pub params: ModelParams,
    pub kappa: f64,
    pub nx: usize,
    pub ns: usize,
    pub s_max: f64,
    pub dt: f64,
    pub t_end: f64,
    pub init: InitSpec,
    pub components: usize,
    pub shifts: Vec<Vec<f64>>,
    pub scheme: Scheme,
    pub flux: FluxKind,
    pub record_interval: Option<f64>,
    pub kernel: Potential,
}

/// Smallest admissible `s_max`.
pub fn min_s_max(params: &ModelParams, kappa: f64) -> f64 {
    params.phi.value(params.b) + 6.0 / kappa.sqrt()
}

impl SimConfig {
    /// `kernel` must be sampled on an `nx^d` grid.
    pub fn new(params: &ModelParams, kernel: Potential, spec: &SimSpec) -> Result<Self> {
        let kappa = spec.kappa;
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        let grid = kernel.grid();
        if grid.n != spec.nx || grid.d != params.d || (grid.l - params.l).abs() > 1e-12 * params.l {
            return Err(Error::InvalidParameter(format!(
                "kernel grid {}^{} on L = {} does not match nx = {}, d = {}, L = {}",
                grid.n, grid.d, grid.l, spec.nx, params.d, params.l
            )));
        }
        if spec.ns < 8 {
            return Err(Error::InvalidParameter(format!(
                "ns must be at least 8, got {}",
                spec.ns
            )));
        }
        if !(spec.t_end.is_finite() && spec.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be nonnegative, got {}",
                spec.t_end
            )));
        }
        let lower = min_s_max(params, kappa);
        let s_max = match spec.s_max {
            Some(s) if s < lower => {
                return Err(Error::InvalidParameter(format!(
                    "s_max = {s} is below Φ(B) + 6/√κ = {lower}"
                )));
            }
            Some(s) => s,
            None => params.phi.value(params.b) + 8.0 / kappa.sqrt(),
        };
        let shifts = match (spec.components, &spec.shifts) {
            (1, None) => vec![],
            (1, Some(_)) => {
                return Err(Error::InvalidParameter(
                    "shifts require components = 4".into(),
                ))
            }
            (4, None) => vec![vec![0.0; params.d]; 4],
            (4, Some(s)) if s.len() == 4 && s.iter().all(|r| r.len() == params.d) => s.clone(),
            (4, Some(_)) => {
                return Err(Error::InvalidParameter(format!(
                    "shifts must be four vectors of length {}",
                    params.d
                )));
            }
            (c, _) => {
                return Err(Error::InvalidParameter(format!(
                    "components must be 1 or 4, got {c}"
                )))
            }
        };
        if let InitSpec::HomogeneousPlusMode { k, .. } = &spec.init {
            if k.len() != params.d || k.iter().any(|&ki| 2 * ki >= spec.nx) {
                return Err(Error::Aliasing {
                    k: k.clone(),
                    n: spec.nx,
                });
            }
        }
        if let InitSpec::HomogeneousPlusPointPerturbation {
            site: Some(site), ..
        } = &spec.init
        {
            if site.len() != params.d || site.iter().any(|&i| i >= spec.nx) {
                return Err(Error::InvalidParameter(format!(
                    "perturbation site {site:?} is off the grid"
                )));
            }
        }
        let mut p = params.clone();
        p.w0 = kernel.samples().iter().sum::<f64>() * grid.cell_volume();
        let p = ModelParams::new(p.l, p.d, p.b, p.tau, p.phi, p.w0)?;
        let ds = s_max / spec.ns as f64;
        let dt = match spec.dt {
            Some(dt) if dt.is_finite() && dt > 0.0 => dt,
            Some(dt) => {
                return Err(Error::InvalidParameter(format!(
                    "dt must be positive, got {dt}"
                )))
            }
            None => auto_dt(&p, kappa, ds, s_max, spec.scheme),
        };
        if let Some(r) = spec.record_interval {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "record_interval must be positive, got {r}"
                )));
            }
        }
        Ok(SimConfig {
            params: p,
            kappa,
            nx: spec.nx,
            ns: spec.ns,
            s_max,
            dt,
            t_end: spec.t_end,
            init: spec.init.clone(),
            components: spec.components,
            shifts,
            scheme: spec.scheme,
            flux: spec.flux,
            record_interval: spec.record_interval,
            kernel,
        })
    }

    pub fn ds(&self) -> f64 {
        self.s_max / self.ns as f64
    }

    pub fn sigma(&self) -> f64 {
        1.0 / self.kappa
    }
}

/// Explicit: `0.9/(1/dt_diff + 1/dt_adv)` with `dt_diff = τΔs²/(2σ)` and `dt_adv = τΔs/max|Φ−s|`.
/// Implicit: `τ/20`.
pub fn auto_dt(params: &ModelParams, kappa: f64, ds: f64, s_max: f64, scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Explicit => {
            let dt_diff = params.tau * ds * ds * kappa / 2.0;
            let vmax = s_max.max(params.phi.value(params.b));
            let dt_adv = params.tau * ds / vmax;
            0.9 / (1.0 / dt_diff + 1.0 / dt_adv)
        }
        Scheme::ImplicitS => params.tau / 20.0,
    }
}
