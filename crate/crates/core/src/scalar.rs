//! Scalar kernels f, g, h of the stationary Gaussian profile.
//!
//! With `η = √(κ/2)·Φ0` the normalisation of the truncated Gaussian
//! `e^{-κ(s-Φ0)²/2}` on `[0, ∞)` produces
//!
//! ```text
//! f(η) = e^{-η²} / (√π (1 + erf η))
//! g(η) = 1 - 2 f (f + η)
//! h(η) = (f + η)(2f + η)
//! ```
//!
//! `g` controls the bifurcation threshold and lies in `[1 - 2/π, 1)`.

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Gauss error function (Sun fdlibm rational approximations, < 1 ulp).
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)` without cancellation for large x.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Nonnegative argument `η = √(κ/2)·Φ0` of the scalar kernels.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EtaValue(f64);

impl EtaValue {
    pub fn new(eta: f64) -> Result<Self> {
        if eta.is_nan() || eta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eta must be >= 0, got {eta}"
            )));
        }
        Ok(EtaValue(eta))
    }

    /// `η = √(κ/2)·Φ0` from a positive κ and nonnegative Φ0.
    pub fn from_kappa_phi(kappa: f64, phi0: f64) -> Result<Self> {
        Self::new((0.5 * kappa).sqrt() * phi0)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `ln f(η)`; finite for every η, used where `f` itself underflows.
pub fn ln_f_eta(eta: EtaValue) -> f64 {
    let e = eta.0;
    -e * e - SQRT_PI.ln() - (2.0 - erfc(e)).ln()
}

/// `f(η) = e^{-η²}/(√π(1+erf η))`.
pub fn f_eta(eta: EtaValue) -> f64 {
    let e = eta.0;
    if e > 30.0 {
        return ln_f_eta(eta).exp();
    }
    (-e * e).exp() / (SQRT_PI * (2.0 - erfc(e)))
}

/// `1 - g(η) = 2f(f+η)`, accurate where g is close to one.
pub fn one_minus_g(eta: EtaValue) -> f64 {
    let f = f_eta(eta);
    2.0 * f * (f + eta.0)
}

/// `ln(1 - g(η))`; finite for every η.
pub fn ln_one_minus_g(eta: EtaValue) -> f64 {
    let lf = ln_f_eta(eta);
    std::f64::consts::LN_2 + lf + (lf.exp() + eta.0).ln()
}

/// `g(η) = 1 - 2f(η)(f(η)+η)`.
pub fn g_eta(eta: EtaValue) -> f64 {
    1.0 - one_minus_g(eta)
}

/// `h(η) = (f(η)+η)(2f(η)+η)`.
pub fn h_eta(eta: EtaValue) -> f64 {
    let f = f_eta(eta);
    (f + eta.0) * (2.0 * f + eta.0)
}

/// `f'(η) = -2f(f+η)`.
pub fn f_prime(eta: EtaValue) -> f64 {
    -one_minus_g(eta)
}

/// `g'(η) = 2f(2h-1)`.
pub fn g_prime(eta: EtaValue) -> f64 {
    2.0 * f_eta(eta) * (2.0 * h_eta(eta) - 1.0)
}

/// `g''(η) = 2f'(2h-1) + 4f h'` with `h' = (4g-1)f + (3g-1)η`.
pub fn g_second(eta: EtaValue) -> f64 {
    let e = eta.0;
    let f = f_eta(eta);
    let g = 1.0 - 2.0 * f * (f + e);
    let h = (f + e) * (2.0 * f + e);
    let fp = -2.0 * f * (f + e);
    let hp = (4.0 * g - 1.0) * f + (3.0 * g - 1.0) * e;
    2.0 * fp * (2.0 * h - 1.0) + 4.0 * f * hp
}
