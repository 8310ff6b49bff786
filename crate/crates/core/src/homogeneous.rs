//! Spatially homogeneous stationary state of the Fokker–Planck field.
//!
//! For each κ the stationary density is the truncated Gaussian
//! `ρ∞(s) = Z⁻¹ e^{-κ(s-Φ0)²/2}` with `Φ0 = Φ(W0·ρ̄∞ + B)` and mean `ρ̄∞`
//! solving the scalar fixed point `G̃(ρ̄∞, κ) = 0`, where
//!
//! ```text
//! G̃(y, κ) = y - M_κ(Φ(W0 y + B)),   M_κ(P) = (√(2/κ) f(√(κ/2) P) + P) / L^d.
//! ```
//!
//! Below `κ_c = 2 W0² / (L^{2d} π B²)` the gain is switched off and the mean is
//! the closed form `L^{-d} √(2/(κπ))`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gain::GainFunction;
use crate::scalar::{f_eta, g_eta, one_minus_g, EtaValue};

/// Model constants shared by the analysis and the simulator.
#[derive(Debug, Clone)]
pub struct ModelParams {
    /// Torus side length.
    pub l: f64,
    /// Spatial dimension.
    pub d: usize,
    /// External input.
    pub b: f64,
    /// Time constant in ms.
    pub tau: f64,
    pub phi: GainFunction,
    /// Integral of the connectivity potential over the torus.
    pub w0: f64,
}

impl ModelParams {
    pub fn new(l: f64, d: usize, b: f64, tau: f64, phi: GainFunction, w0: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "L must be positive, got {l}"
            )));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("dimension d must be >= 1".into()));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "B must be positive, got {b}"
            )));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {tau}"
            )));
        }
        if !(w0 < 0.0) || !w0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "W0 must be negative, got {w0}"
            )));
        }
        Ok(ModelParams {
            l,
            d,
            b,
            tau,
            phi,
            w0,
        })
    }

    /// `L^d`, the torus volume.
    pub fn volume(&self) -> f64 {
        self.l.powi(self.d as i32)
    }

    /// `M_κ(P)`: mean activity of the normalised Gaussian centred at `P`.
    pub fn gaussian_mean(&self, kappa: f64, p: f64) -> f64 {
        let eta = EtaValue::new((0.5 * kappa).sqrt() * p.max(0.0)).expect("nonnegative eta");
        ((2.0 / kappa).sqrt() * f_eta(eta) + p) / self.volume()
    }

    /// `G̃(y, κ)`.
    pub fn fixed_point_map(&self, y: f64, kappa: f64) -> f64 {
        y - self.gaussian_mean(kappa, self.phi.value(self.w0 * y + self.b))
    }
}

/// `κ_c = 2 W0² / (L^{2d} π B²)`.
pub fn kappa_c(params: &ModelParams) -> f64 {
    let ld = params.volume();
    2.0 * params.w0 * params.w0 / (ld * ld * PI * params.b * params.b)
}

/// Homogeneous stationary state at one value of κ.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousState {
    pub kappa: f64,
    pub rho_bar_inf: f64,
    /// Gain argument `W0·ρ̄∞ + B`.
    pub u0: f64,
    pub phi0: f64,
    pub phi0p: f64,
    pub phi0pp: f64,
    /// `None` when the gain has no third derivative.
    pub phi0ppp: Option<f64>,
    /// `η = √(κ/2)·Φ0`.
    pub eta: f64,
    /// `g(η)`.
    pub g: f64,
    /// `ρ∞(0) = √(2κ) f(η) / L^d`.
    pub rho_inf_at_zero: f64,
    pub d_rho_bar_d_kappa: f64,
    /// True when the closed form below `κ_c` was used.
    pub closed_form: bool,
}

impl HomogeneousState {
    /// `ρ̄∞ − Φ0/L^d = √(2/κ) f(η) / L^d`, evaluated without cancellation.
    pub fn excess_mean(&self) -> f64 {
        self.rho_inf_at_zero / self.kappa
    }

    /// Stationary density `ρ∞(s)`, normalised to `1/L^d` on `[0, ∞)`.
    pub fn density(&self, s: f64) -> f64 {
        let z = s - self.phi0;
        self.rho_inf_at_zero * (0.5 * self.kappa * (self.phi0 * self.phi0 - z * z)).exp()
    }
}

fn populate(params: &ModelParams, kappa: f64, rho_bar: f64, closed_form: bool) -> HomogeneousState {
    let ld = params.volume();
    let u0 = params.w0 * rho_bar + params.b;
    let (phi0, phi0p, phi0pp, phi0ppp) = if closed_form {
        (0.0, 0.0, 0.0, Some(0.0))
    } else {
        let phi = &params.phi;
        (phi.value(u0), phi.d1(u0), phi.d2(u0), phi.d3(u0).ok())
    };
    let eta = EtaValue::from_kappa_phi(kappa, phi0).expect("nonnegative eta");
    let f = f_eta(eta);
    let g = g_eta(eta);
    let rho_inf_at_zero = (2.0 * kappa).sqrt() * f / ld;
    let excess = rho_inf_at_zero / kappa;
    let e = eta.get();
    let numer = (1.0 + 2.0 * e * (f + e)) * excess;
    let denom = 1.0 - phi0p * (g / ld) * params.w0;
    HomogeneousState {
        kappa,
        rho_bar_inf: rho_bar,
        u0,
        phi0,
        phi0p,
        phi0pp,
        phi0ppp,
        eta: e,
        g,
        rho_inf_at_zero,
        d_rho_bar_d_kappa: -numer / (2.0 * kappa * denom),
        closed_form,
    }
}

/// Solve `G̃(ρ̄∞, κ) = 0`: bisection to width 1e-14, then Newton polish.
pub fn solve_rho_bar_inf(params: &ModelParams, kappa: f64) -> Result<HomogeneousState> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    let ld = params.volume();
    let closed = (2.0 / (kappa * PI)).sqrt() / ld;
    if kappa <= kappa_c(params) {
        return Ok(populate(params, kappa, closed, true));
    }
    let map = |y: f64| params.fixed_point_map(y, kappa);
    let mut lo = 0.0;
    let mut hi = (params.b / params.w0.abs()).max(closed) * 1.001 + 1e-12;
    let (glo, ghi) = (map(lo), map(hi));
    if !(glo < 0.0 && ghi > 0.0) {
        return Err(Error::Bracket { lo, hi, kappa });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 || mid <= lo || mid >= hi {
            break;
        }
        if map(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..2 {
        let u = params.w0 * y + params.b;
        let p = params.phi.value(u);
        let g = g_eta(EtaValue::from_kappa_phi(kappa, p)?);
        let slope = 1.0 - params.phi.d1(u) * (g / ld) * params.w0;
        let next = y - map(y) / slope;
        if next.is_finite() && map(next).abs() <= map(y).abs() {
            y = next;
        }
    }
    Ok(populate(params, kappa, y, false))
}

/// Closed form of `dρ̄∞/dκ` for an already solved state.
pub fn d_rho_bar_d_kappa(state: &HomogeneousState, params: &ModelParams) -> f64 {
    populate(params, state.kappa, state.rho_bar_inf, state.closed_form).d_rho_bar_d_kappa
}

/// Large-κ limits `(ρ*, Φ*)`, taken at κ = 1e8.
pub fn asymptotic_limits(params: &ModelParams) -> Result<(f64, f64)> {
    let st = solve_rho_bar_inf(params, 1e8)?;
    Ok((st.rho_bar_inf, st.phi0))
}

/// `(1/L^d) − L^d ρ̄∞ (ρ̄∞ − Φ0/L^d) κ`, the raw form of `g/L^d`.
pub fn raw_g_over_volume(state: &HomogeneousState, params: &ModelParams) -> f64 {
    let ld = params.volume();
    1.0 / ld - ld * state.rho_bar_inf * (state.rho_bar_inf - state.phi0 / ld) * state.kappa
}

/// `1 − g(η)` for the state, accurate near `g → 1`.
pub fn one_minus_g_of(state: &HomogeneousState) -> f64 {
    one_minus_g(EtaValue::new(state.eta).expect("nonnegative eta"))
}
