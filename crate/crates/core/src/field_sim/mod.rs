//! Finite-volume time integration of the one- and four-component systems on a
//! periodic x-grid times a truncated s-grid with zero flux at both s-ends.

mod config;
mod diagnostics;
mod io;
mod scheme;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{auto_dt, min_s_max, FluxKind, InitSpec, PointTarget, Scheme, SimConfig, SimSpec};
pub use diagnostics::{deviation_l2, deviation_sup, Spectrum};
pub use io::{write_outputs, Manifest};
pub use scheme::SGrid;

use crate::connectivity::omega_field;
use crate::error::{Error, Result};
use crate::grid::{Convolver, PeriodicGrid};

/// Density on `nx^d × components × ns`, column-major in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub rho: Vec<f64>,
    pub t: f64,
    pub components: usize,
    pub ns: usize,
}

impl FieldState {
    pub fn sites(&self) -> usize {
        self.rho.len() / (self.components * self.ns)
    }

    /// Density column of `component` at flat site `x`.
    pub fn column(&self, x: usize, component: usize) -> &[f64] {
        let start = (x * self.components + component) * self.ns;
        &self.rho[start..start + self.ns]
    }

    pub fn min_value(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Compensated sum.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Recorded sample of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub t: f64,
    pub deviation_l2: f64,
    pub dominant: Vec<usize>,
    pub hexagonality: f64,
}

/// Mean field at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub rho_bar: Vec<f64>,
}

/// Whole-run summary; saturation is the first record reaching half the maximal deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub initial_deviation: f64,
    pub final_deviation: f64,
    pub max_deviation: f64,
    pub growth_factor: f64,
    pub saturation_time: Option<f64>,
    pub dominant_at_saturation: Option<Vec<usize>>,
    /// Largest mass fraction in the last s-cell over the run.
    pub truncation_residual: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub timeseries: Vec<Record>,
    pub summary: RunSummary,
    pub final_state: FieldState,
}

/// Discrete homogeneous steady state data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteHomogeneous {
    /// Self-consistent Gaussian centre on the s-grid.
    pub phi: f64,
    /// Its discrete mean.
    pub rho_bar: f64,
}

/// Precomputed operators for a configuration.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: SimConfig,
    grid: PeriodicGrid,
    sgrid: SGrid,
    convolvers: Vec<Convolver>,
    homogeneous: DiscreteHomogeneous,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        let grid = cfg.kernel.grid();
        let base = Convolver::new(grid, cfg.kernel.samples().to_vec());
        let convolvers = if cfg.components == 1 {
            vec![base]
        } else {
            cfg.shifts.iter().map(|r| base.shifted(r)).collect()
        };
        let sgrid = SGrid::new(cfg.ns, cfg.s_max, cfg.kappa);
        let mut sim = Simulator {
            cfg,
            grid,
            sgrid,
            convolvers,
            homogeneous: DiscreteHomogeneous {
                phi: 0.0,
                rho_bar: 0.0,
            },
        };
        sim.homogeneous = sim.solve_discrete_homogeneous();
        Ok(sim)
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn sgrid(&self) -> &SGrid {
        &self.sgrid
    }

    pub fn homogeneous(&self) -> DiscreteHomogeneous {
        self.homogeneous
    }

    fn column_mass(&self) -> f64 {
        1.0 / self.cfg.params.volume()
    }

    /// Gaussian centred at `c` normalised to the column mass.
    pub fn gaussian_column(&self, c: f64) -> Vec<f64> {
        let k = self.cfg.kappa;
        let mut col: Vec<f64> = (0..self.cfg.ns)
            .map(|j| (-0.5 * k * (self.sgrid.center(j) - c).powi(2)).exp())
            .collect();
        let mass = neumaier_sum(col.iter().copied()) * self.sgrid.ds;
        let scale = self.column_mass() / mass;
        col.iter_mut().for_each(|v| *v *= scale);
        col
    }

    /// `Σ s_j ρ_j Δs`.
    pub fn column_mean(&self, col: &[f64]) -> f64 {
        col.iter()
            .enumerate()
            .map(|(j, v)| self.sgrid.center(j) * v)
            .sum::<f64>()
            * self.sgrid.ds
    }

    /// `Σ ρ_j Δs`.
    pub fn column_mass_of(&self, col: &[f64]) -> f64 {
        neumaier_sum(col.iter().copied()) * self.sgrid.ds
    }

    fn solve_discrete_homogeneous(&self) -> DiscreteHomogeneous {
        let p = &self.cfg.params;
        let mean_at = |c: f64| self.column_mean(&self.gaussian_column(c));
        let h = |c: f64| p.phi.value(p.w0 * mean_at(c) + p.b) - c;
        let (mut lo, mut hi) = (0.0f64, p.phi.value(p.b).max(0.0));
        if h(lo) <= 0.0 {
            return DiscreteHomogeneous {
                phi: 0.0,
                rho_bar: mean_at(0.0),
            };
        }
        while h(hi) > 0.0 {
            hi = 2.0 * hi + 1.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let phi = if h(lo).abs() <= h(hi).abs() { lo } else { hi };
        DiscreteHomogeneous {
            phi,
            rho_bar: mean_at(phi),
        }
    }

    /// Constant-in-x sampled Gaussian at the self-consistent centre.
    pub fn discrete_steady_state(&self) -> FieldState {
        let col = self.gaussian_column(self.homogeneous.phi);
        let c = self.cfg.components;
        let mut rho = Vec::with_capacity(self.grid.len() * c * self.cfg.ns);
        for _ in 0..self.grid.len() * c {
            rho.extend_from_slice(&col);
        }
        FieldState {
            rho,
            t: 0.0,
            components: c,
            ns: self.cfg.ns,
        }
    }

    /// Value at `s = 0` of a column by quadratic extrapolation.
    pub fn value_at_zero(col: &[f64]) -> f64 {
        (15.0 * col[0] - 10.0 * col[1] + 3.0 * col[2]) / 8.0
    }

    /// Initial state from the configured perturbation.
    pub fn initial_state(&self) -> FieldState {
        let mut st = self.discrete_steady_state();
        let ns = self.cfg.ns;
        match &self.cfg.init {
            InitSpec::HomogeneousPlusPointPerturbation {
                amplitude,
                site,
                on,
            } => {
                let x = site.as_ref().map_or(0, |s| self.grid.flat_index(s));
                let shifted = self.gaussian_column(self.homogeneous.phi + amplitude);
                let target = self.homogeneous.phi + 1.0 / self.cfg.kappa.sqrt();
                let j = ((target / self.sgrid.ds) as usize).min(ns - 1);
                for comp in 0..st.components {
                    let start = (x * st.components + comp) * ns;
                    let col = &mut st.rho[start..start + ns];
                    match on {
                        PointTarget::Density => {
                            col[j] += amplitude;
                            let scale = self.column_mass() / self.column_mass_of(col);
                            col.iter_mut().for_each(|v| *v *= scale);
                        }
                        PointTarget::Centre => col.copy_from_slice(&shifted),
                    }
                }
            }
            InitSpec::HomogeneousPlusMode { k, amplitude } => {
                let omega = omega_field(self.grid, k);
                for (x, w) in omega.iter().enumerate() {
                    let col = self.gaussian_column(self.homogeneous.phi + amplitude * w);
                    for comp in 0..st.components {
                        let start = (x * st.components + comp) * ns;
                        st.rho[start..start + ns].copy_from_slice(&col);
                    }
                }
            }
        }
        st
    }

    /// Per-component mean fields.
    pub fn component_means(&self, st: &FieldState) -> Vec<Vec<f64>> {
        let c = st.components;
        let means: Vec<f64> = st
            .rho
            .par_chunks(self.cfg.ns)
            .map(|col| self.column_mean(col))
            .collect();
        (0..c)
            .map(|b| means.iter().skip(b).step_by(c).copied().collect())
            .collect()
    }

    /// Component-averaged mean field.
    pub fn rho_bar(&self, st: &FieldState) -> Vec<f64> {
        let means = self.component_means(st);
        let c = means.len() as f64;
        (0..self.grid.len())
            .map(|x| means.iter().map(|m| m[x]).sum::<f64>() / c)
            .collect()
    }

    /// Shared input `m(x)`.
    pub fn input(&self, st: &FieldState) -> Vec<f64> {
        let means = self.component_means(st);
        if means.len() == 1 {
            return self.convolvers[0].convolve(&means[0]);
        }
        let mut m = vec![0.0; self.grid.len()];
        for (conv, mean) in self.convolvers.iter().zip(&means) {
            for (acc, v) in m.iter_mut().zip(conv.convolve(mean)) {
                *acc += 0.25 * v;
            }
        }
        m
    }

    /// Advance in place by `dt`.
    pub fn advance(&self, st: &mut FieldState, dt: f64) -> Result<()> {
        let m = self.input(st);
        let p = &self.cfg.params;
        let ns = self.cfg.ns;
        let comps = st.components;
        let c = dt / (p.tau * self.sgrid.ds);
        let scheme = self.cfg.scheme;
        let flux = self.cfg.flux;
        let t = st.t;
        let outcome: Vec<std::result::Result<(), Error>> = st
            .rho
            .par_chunks_mut(ns * comps)
            .zip(m.par_iter())
            .enumerate()
            .map_init(
                || (vec![0.0; ns - 1], vec![0.0; ns - 1], vec![0.0; ns]),
                |(a, b, scratch), (x, (cols, &mx))| {
                    let phi = p.phi.value(mx + p.b);
                    self.sgrid.coefficients(flux, phi, a, b);
                    if scheme == Scheme::Explicit {
                        let limit = p.tau * self.sgrid.ds / scheme::max_outflow(a, b);
                        if dt > limit * (1.0 + 1e-12) {
                            return Err(Error::Cfl { dt, limit });
                        }
                    }
                    for col in cols.chunks_mut(ns) {
                        match scheme {
                            Scheme::Explicit => scheme::explicit_update(col, a, b, c),
                            Scheme::ImplicitS => scheme::implicit_update(col, a, b, c, scratch),
                        }
                        if let Some((j, &v)) = col
                            .iter()
                            .enumerate()
                            .find(|(_, &v)| v < -1e-12 || v.is_nan())
                        {
                            return Err(Error::Negativity {
                                value: v,
                                x,
                                s: j,
                                t: t + dt,
                            });
                        }
                    }
                    Ok(())
                },
            )
            .collect();
        outcome.into_iter().collect::<Result<()>>()?;
        st.t += dt;
        Ok(())
    }

    /// One step of size `cfg.dt`.
    pub fn step(&self, st: &FieldState) -> Result<FieldState> {
        let mut next = st.clone();
        self.advance(&mut next, self.cfg.dt)?;
        Ok(next)
    }

    fn record(&self, st: &FieldState) -> (Record, Vec<f64>) {
        let rb = self.rho_bar(st);
        let spec = Spectrum::new(self.grid, &rb);
        let rec = Record {
            t: st.t,
            deviation_l2: deviation_l2(self.grid, &rb),
            dominant: spec.dominant_mode().unwrap_or_else(|| vec![0; self.grid.d]),
            hexagonality: spec.hexagonality(),
        };
        (rec, rb)
    }

    fn tail_fraction(&self, st: &FieldState) -> f64 {
        let ns = self.cfg.ns;
        st.rho
            .chunks(ns)
            .map(|col| col[ns - 1].max(0.0) * self.sgrid.ds)
            .fold(0.0, f64::max)
            / self.column_mass()
    }

    /// Integrate from `initial` to `t_end`, snapshotting `ρ̄` at t = 0 and at each requested time.
    pub fn run_from(&self, initial: FieldState, snapshot_times: &[f64]) -> Result<RunOutput> {
        let t_end = self.cfg.t_end;
        let dt = self.cfg.dt;
        let eps = 1e-9 * dt;
        let mut times: Vec<f64> = snapshot_times
            .iter()
            .copied()
            .filter(|&s| s > 0.0 && s <= t_end + eps)
            .collect();
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() <= eps);
        let mut targets = times.clone();
        if targets.last().is_none_or(|&l| l < t_end - eps) && t_end > 0.0 {
            targets.push(t_end);
        }
        let interval = self.cfg.record_interval.unwrap_or(dt);
        let mut st = initial;
        let start = st.t;
        let (rec0, rb0) = self.record(&st);
        let mut timeseries = vec![rec0];
        let mut snapshots = vec![Snapshot {
            t: st.t,
            rho_bar: rb0,
        }];
        let mut next_record = start + interval;
        let mut steps = 0usize;
        let mut tail = self.tail_fraction(&st);
        for &target in &targets {
            let target = start + target;
            while st.t < target - eps {
                let h = dt.min(target - st.t);
                self.advance(&mut st, h)?;
                steps += 1;
                let due = st.t >= next_record - eps;
                if due || st.t >= target - eps {
                    timeseries.push(self.record(&st).0);
                }
                while next_record <= st.t + eps {
                    next_record += interval;
                }
            }
            tail = tail.max(self.tail_fraction(&st));
            if times.iter().any(|&s| (start + s - target).abs() <= eps) {
                snapshots.push(Snapshot {
                    t: st.t,
                    rho_bar: self.rho_bar(&st),
                });
            }
        }
        timeseries.dedup_by(|a, b| (a.t - b.t).abs() <= eps);
        let summary = summarize(&timeseries, steps, tail);
        Ok(RunOutput {
            snapshots,
            timeseries,
            summary,
            final_state: st,
        })
    }

    /// Integrate from the configured initial condition.
    pub fn run(&self, snapshot_times: &[f64]) -> Result<RunOutput> {
        self.run_from(self.initial_state(), snapshot_times)
    }
}

fn summarize(ts: &[Record], steps: usize, truncation_residual: f64) -> RunSummary {
    let initial = ts.first().map_or(0.0, |r| r.deviation_l2);
    let last = ts.last().map_or(0.0, |r| r.deviation_l2);
    let max = ts.iter().map(|r| r.deviation_l2).fold(0.0, f64::max);
    let sat = ts.iter().find(|r| max > 0.0 && r.deviation_l2 >= 0.5 * max);
    RunSummary {
        steps,
        initial_deviation: initial,
        final_deviation: last,
        max_deviation: max,
        growth_factor: if initial > 0.0 {
            max / initial
        } else {
            f64::INFINITY
        },
        saturation_time: sat.map(|r| r.t),
        dominant_at_saturation: sat.map(|r| r.dominant.clone()),
        truncation_residual,
    }
}

/// Single step from a configuration.
pub fn step(state: &FieldState, cfg: &SimConfig) -> Result<FieldState> {
    Simulator::new(cfg.clone())?.step(state)
}

/// Full run from a configuration.
pub fn run(cfg: &SimConfig, snapshot_times: &[f64]) -> Result<RunOutput> {
    Simulator::new(cfg.clone())?.run(snapshot_times)
}

/// Discrete homogeneous steady state for a configuration.
pub fn discrete_steady_state(cfg: &SimConfig) -> Result<FieldState> {
    Ok(Simulator::new(cfg.clone())?.discrete_steady_state())
}
