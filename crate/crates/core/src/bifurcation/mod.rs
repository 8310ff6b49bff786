//! Threshold function, crossings, Crandall–Rabinowitz checks and branch shape.
//!
//! A mode `k` has a bifurcation at κ* when `W̃(k)/Θ(k) = Ψ(κ*)` with
//!
//! ```text
//! Ψ(κ) = L^{d/2} / (Φ0' g(√(κ/2) Φ0)),
//! ```
//!
//! which equals `+∞` on `(0, κ_c]`. The linearisation of the mean functional at
//! the homogeneous state has eigenvalues `λ_k = 1 − (W̃(k)/Θ(k))/Ψ(κ)`.

mod branch;
mod oracle;
mod pattern;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::connectivity::{mode_table, ModeClass, ModeTableOptions, Potential};
use crate::error::{Error, Result};
use crate::homogeneous::{
    asymptotic_limits, kappa_c, raw_g_over_volume, solve_rho_bar_inf, ModelParams,
};

pub use branch::{
    branch_coefficients, eigenvalue_slope, response_derivatives, BranchCoefficients, BranchOptions,
    Criticality, ReducedCurvature,
};
pub use oracle::{frechet_fd_oracle, FdOracle};
pub use pattern::{class_terms, pattern_field, pattern_preset, PatternPreset, TrigTerm};

/// `Ψ(κ) = L^{d/2}/(Φ0' g(η))`.
pub fn psi(params: &ModelParams, kappa: f64) -> Result<f64> {
    let kc = kappa_c(params);
    if kappa <= kc {
        return Err(Error::Domain { kappa, kappa_c: kc });
    }
    let st = solve_rho_bar_inf(params, kappa)?;
    if !(st.phi0p > 0.0) {
        return Err(Error::Domain { kappa, kappa_c: kc });
    }
    Ok(params.l.powf(params.d as f64 / 2.0) / (st.phi0p * st.g))
}

/// Raw form `1/(L^{d/2} Φ0' (1/L^d − L^d ρ̄∞(ρ̄∞ − Φ0/L^d)κ))`.
pub fn psi_raw(params: &ModelParams, kappa: f64) -> Result<f64> {
    let kc = kappa_c(params);
    if kappa <= kc {
        return Err(Error::Domain { kappa, kappa_c: kc });
    }
    let st = solve_rho_bar_inf(params, kappa)?;
    Ok(1.0 / (params.l.powf(params.d as f64 / 2.0) * st.phi0p * raw_g_over_volume(&st, params)))
}

/// `lim_{κ→∞} Ψ = L^{d/2}/Φ'(W0 ρ* + B)`.
pub fn psi_limit(params: &ModelParams) -> Result<f64> {
    let (rho_star, _) = asymptotic_limits(params)?;
    let slope = params.phi.d1(params.w0 * rho_star + params.b);
    Ok(params.l.powf(params.d as f64 / 2.0) / slope)
}

/// `lim_{κ→κ_c⁺} Ψ = π L^{d/2}/((π−2) Φ'(0⁺))`; infinite for C¹ gains.
pub fn psi_cap(params: &ModelParams) -> f64 {
    let s = params.phi.right_slope_at_zero();
    if s > 0.0 {
        PI * params.l.powf(params.d as f64 / 2.0) / ((PI - 2.0) * s)
    } else {
        f64::INFINITY
    }
}

/// Why a mode has no crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoCrossingReason {
    BelowLimit,
    AboveCap,
    BeyondKappaMax,
}

/// Numerical Crandall–Rabinowitz hypothesis checks at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationFlags {
    pub unique_mode: bool,
    pub unique_in_kappa: bool,
    pub phi_convexity_ok: bool,
    pub relaxed_condition_ok: bool,
    pub transversality_ok: bool,
    pub in_range: bool,
}

impl ValidationFlags {
    pub fn all_ok(&self) -> bool {
        self.unique_mode
            && self.unique_in_kappa
            && (self.phi_convexity_ok || self.relaxed_condition_ok)
            && self.transversality_ok
            && self.in_range
    }
}

/// A crossing of a mode ratio with the threshold function.
#[derive(Debug, Clone)]
pub struct BifurcationPoint {
    pub class: ModeClass,
    pub kappa_star: f64,
    /// `|ratio·factor − Ψ(κ*)| / (ratio·factor)`.
    pub residual: f64,
    pub kernel_dim: usize,
    pub flags: ValidationFlags,
}

/// Output of [`find_crossings`].
#[derive(Debug, Clone)]
pub struct CrossingSet {
    pub kappa_c: f64,
    pub psi_limit: f64,
    pub psi_cap: f64,
    pub classes: Vec<ModeClass>,
    pub crossings: Vec<BifurcationPoint>,
    pub no_crossing: Vec<(ModeClass, NoCrossingReason)>,
}

/// Settings for the crossing search.
#[derive(Debug, Clone)]
pub struct CrossingOptions {
    pub k_max: usize,
    pub kappa_max: f64,
    pub modes: ModeTableOptions,
    /// Points of the logarithmic bracketing grid.
    pub scan_points: usize,
}

impl CrossingOptions {
    pub fn new(k_max: usize, kappa_max: f64) -> Self {
        CrossingOptions {
            k_max,
            kappa_max,
            modes: ModeTableOptions::default(),
            scan_points: 512,
        }
    }
}

/// Logarithmic κ grid over `(κ_c(1+1e-6), κ_max]`.
pub fn kappa_scan_grid(params: &ModelParams, kappa_max: f64, points: usize) -> Vec<f64> {
    let lo = kappa_c(params) * (1.0 + 1e-6);
    let (a, b) = (lo.ln(), kappa_max.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn bisect_crossing(params: &ModelParams, target: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let s_lo = psi(params, lo)? - target;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = psi(params, mid)? - target;
        if s == 0.0 {
            return Ok(mid);
        }
        if (s > 0.0) == (s_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = (psi(params, lo)? - target).abs();
    let b = (psi(params, hi)? - target).abs();
    Ok(if a <= b { lo } else { hi })
}

/// Locate every mode/κ crossing in `(κ_c, κ_max]`, sorted by κ*.
pub fn find_crossings(
    w: &Potential,
    params: &ModelParams,
    opts: &CrossingOptions,
) -> Result<CrossingSet> {
    let kc = kappa_c(params);
    if !(opts.kappa_max > kc) {
        return Err(Error::InvalidParameter(format!(
            "kappa_max {} must exceed kappa_c {kc}",
            opts.kappa_max
        )));
    }
    let classes = mode_table(w, opts.k_max, &opts.modes)?;
    let limit = psi_limit(params)?;
    let cap = psi_cap(params);
    let grid = kappa_scan_grid(params, opts.kappa_max, opts.scan_points.max(2));
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&k| psi(params, k))
        .collect::<Result<_>>()?;

    let nonzero: Vec<&ModeClass> = classes
        .iter()
        .filter(|c| c.representative.iter().any(|&v| v > 0))
        .collect();
    let found: Vec<Vec<(f64, f64)>> = nonzero
        .par_iter()
        .map(|c| {
            let target = c.effective_ratio();
            let mut roots = Vec::new();
            if !(target > 0.0) {
                return Ok(roots);
            }
            for i in 0..grid.len() - 1 {
                let (a, b) = (values[i] - target, values[i + 1] - target);
                if a == 0.0 || (a > 0.0) != (b > 0.0) {
                    let k = if a == 0.0 {
                        grid[i]
                    } else {
                        bisect_crossing(params, target, grid[i], grid[i + 1])?
                    };
                    let res = (psi(params, k)? - target).abs() / target;
                    roots.push((k, res));
                }
            }
            Ok(roots)
        })
        .collect::<Result<_>>()?;

    let mut crossings = Vec::new();
    let mut no_crossing = Vec::new();
    for (c, roots) in nonzero.iter().zip(found) {
        if roots.is_empty() {
            let t = c.effective_ratio();
            let reason = if t <= limit {
                NoCrossingReason::BelowLimit
            } else if t >= cap {
                NoCrossingReason::AboveCap
            } else {
                NoCrossingReason::BeyondKappaMax
            };
            no_crossing.push(((*c).clone(), reason));
            continue;
        }
        let single = roots.len() == 1;
        for (k, res) in roots {
            if res > 1e-9 {
                return Err(Error::Numerical(format!(
                    "crossing of {} at kappa={k} has relative residual {res:e}",
                    c.label()
                )));
            }
            let pt = BifurcationPoint {
                class: (*c).clone(),
                kappa_star: k,
                residual: res,
                kernel_dim: 0,
                flags: ValidationFlags {
                    unique_mode: true,
                    unique_in_kappa: single,
                    phi_convexity_ok: false,
                    relaxed_condition_ok: false,
                    transversality_ok: false,
                    in_range: k > kc,
                },
            };
            crossings.push(pt);
        }
    }
    crossings.sort_by(|a, b| {
        a.kappa_star
            .partial_cmp(&b.kappa_star)
            .unwrap()
            .then_with(|| a.class.representative.cmp(&b.class.representative))
    });
    for pt in crossings.iter_mut() {
        let (dim, _) = kernel_dimension(params, pt.kappa_star, &classes)?;
        pt.kernel_dim = dim;
        pt.flags = validate_point(pt, params, &classes)?;
    }
    Ok(CrossingSet {
        kappa_c: kc,
        psi_limit: limit,
        psi_cap: cap,
        classes,
        crossings,
        no_crossing,
    })
}

/// One row of the eigenvalue table.
#[derive(Debug, Clone, Serialize)]
pub struct Eigenvalue {
    pub class_id: usize,
    pub label: String,
    pub lambda: f64,
}

/// `λ_k = 1 − ratio·factor/Ψ(κ)` for every class; counts `|λ| ≤ 1e-8`.
pub fn kernel_dimension(
    params: &ModelParams,
    kappa: f64,
    classes: &[ModeClass],
) -> Result<(usize, Vec<Eigenvalue>)> {
    let p = psi(params, kappa)?;
    let table: Vec<Eigenvalue> = classes
        .iter()
        .map(|c| Eigenvalue {
            class_id: c.id,
            label: c.label(),
            lambda: 1.0 - c.effective_ratio() / p,
        })
        .collect();
    let dim = table.iter().filter(|e| e.lambda.abs() <= 1e-8).count();
    Ok((dim, table))
}

/// Right-hand side of the relaxed convexity condition on `Φ0''`.
pub fn relaxed_convexity_bound(params: &ModelParams, phi0: f64, phi0p: f64) -> f64 {
    let ld = params.volume();
    let w0 = params.w0;
    let b = params.b;
    2.0 * (4.0 - PI) / (PI - 2.0) * phi0 * phi0p / (ld * ld * PI * b * b)
        * (ld - phi0p * w0 * (1.0 - 2.0 / PI))
        / (1.0 + phi0 * (phi0 + ld * b / w0.abs()))
        * w0
}

/// Evaluate the hypothesis flags at a crossing.
pub fn validate_point(
    pt: &BifurcationPoint,
    params: &ModelParams,
    classes: &[ModeClass],
) -> Result<ValidationFlags> {
    let st = solve_rho_bar_inf(params, pt.kappa_star)?;
    let ld = params.volume();
    let target = pt.class.effective_ratio();
    let unique_mode = !classes
        .iter()
        .filter(|c| c.id != pt.class.id)
        .any(|c| (c.effective_ratio() - target).abs() <= 1e-9 * target.abs());
    let a3 = 1.0 - ld * ld * st.rho_bar_inf * st.rho_bar_inf * st.kappa / st.g;
    Ok(ValidationFlags {
        unique_mode,
        unique_in_kappa: pt.flags.unique_in_kappa,
        phi_convexity_ok: st.phi0pp >= 0.0,
        relaxed_condition_ok: st.phi0pp > relaxed_convexity_bound(params, st.phi0, st.phi0p),
        transversality_ok: a3 < 0.0,
        in_range: pt.kappa_star > kappa_c(params),
    })
}

/// Smallest κ* over all crossings.
pub fn linear_stability_threshold(
    w: &Potential,
    params: &ModelParams,
    opts: &CrossingOptions,
) -> Result<f64> {
    let set = find_crossings(w, params, opts)?;
    set.crossings
        .first()
        .map(|p| p.kappa_star)
        .ok_or(Error::NoCrossing)
}

/// Convenience: classes from a crossing set whose label contains `k`.
pub fn class_containing<'a>(classes: &'a [ModeClass], k: &[usize]) -> Option<&'a ModeClass> {
    classes.iter().find(|c| c.members.iter().any(|m| m == k))
}
