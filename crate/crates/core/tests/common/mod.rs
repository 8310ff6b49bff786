//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nfbif::connectivity::Potential;
use nfbif::grid::PeriodicGrid;

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `J0(z) = (1/π)∫₀^π cos(z sin t) dt`.
pub fn bessel_j0(z: f64) -> f64 {
    simpson(0.0, PI, 400, |t| (z * t.sin()).cos()) / PI
}

/// `J1(z) = (1/π)∫₀^π cos(t − z sin t) dt`.
pub fn bessel_j1(z: f64) -> f64 {
    simpson(0.0, PI, 400, |t| (t - z * t.sin()).cos()) / PI
}

/// Isotropic ring `−81.92(1 + tanh(10 − 50r))`.
pub fn ring_profile(r: f64) -> f64 {
    -81.92 * (1.0 + (10.0 - 50.0 * r).tanh())
}

/// `2π∫₀^{1/2} r W(r) J0(q r) dr` for the isotropic ring.
pub fn radial_transform(q: f64) -> f64 {
    2.0 * PI * simpson(0.0, 0.5, 20_000, |r| r * ring_profile(r) * bessel_j0(q * r))
}

pub fn smooth_gain(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        0.5 * u * (1.0 + u / (u * u + 0.1).sqrt())
    }
}

pub fn smooth_gain_d1(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        let q = (u * u + 0.1).sqrt();
        0.5 * (1.0 + u / q) + 0.5 * u * 0.1 / (q * q * q)
    }
}

/// Mean of `exp(−κ(s−p)²/2)` restricted to `s ≥ 0`.
pub fn quadrature_mean(kappa: f64, p: f64) -> f64 {
    let hi = p + 12.0 / kappa.sqrt();
    let m0 = simpson(0.0, hi, 20_000, |s| {
        (-0.5 * kappa * (s - p) * (s - p)).exp()
    });
    let m1 = simpson(0.0, hi, 20_000, |s| {
        s * (-0.5 * kappa * (s - p) * (s - p)).exp()
    });
    m1 / m0
}

/// Solve `ρ̄ = M_κ(Φ(W0ρ̄ + B))/L^d` (B = 3) by bisection and quadrature.
pub fn oracle_solve(l: f64, d: usize, w0: f64, kappa: f64, phi: impl Fn(f64) -> f64) -> f64 {
    let ld = l.powi(d as i32);
    let (mut lo, mut hi) = (0.0, 10.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid - quadrature_mean(kappa, phi(w0 * mid + 3.0)) / ld > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Threshold `1/(L^{d/2} Φ0' (1/L^d − L^d ρ̄(ρ̄ − Φ0/L^d)κ))` from the oracle solve.
pub fn oracle_psi(
    l: f64,
    d: usize,
    w0: f64,
    kappa: f64,
    phi: impl Fn(f64) -> f64 + Copy,
    phi_d1: impl Fn(f64) -> f64,
) -> f64 {
    let ld = l.powi(d as i32);
    let rho = oracle_solve(l, d, w0, kappa, phi);
    let u = w0 * rho + 3.0;
    let p0 = phi(u);
    1.0 / (l.powf(d as f64 / 2.0) * phi_d1(u) * (1.0 / ld - ld * rho * (rho - p0 / ld) * kappa))
}

/// Bisection for `Ψ(κ) = target` on a bracket where Ψ decreases.
pub fn oracle_crossing(mut lo: f64, mut hi: f64, target: f64, psi: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if psi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One-dimensional potential `Σ_k c_k cos(2πkx)` on the unit circle.
pub fn cosine_table(n: usize, coeffs: &[f64]) -> Potential {
    let g = PeriodicGrid::new(n, 1, 1.0);
    let mut x = [0.0];
    let samples = (0..n)
        .map(|i| {
            g.wrapped_coords(i, &mut x);
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * (2.0 * PI * k as f64 * x[0]).cos())
                .sum()
        })
        .collect();
    Potential::from_samples(g, samples).unwrap()
}
