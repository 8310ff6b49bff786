//! Column-local flux coefficients and updates.

use super::config::FluxKind;

/// `B(z) = z/(eᶻ − 1)` for `(z, e^{−|z|})`, returning `(B(z), B(−z))`.
fn bernoulli_pair(z: f64, e_neg_abs: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        let z2 = z * z;
        let b = 1.0 - 0.5 * z + z2 / 12.0 - z2 * z2 / 720.0 + z2 * z2 * z2 / 30240.0;
        return (b, b + z);
    }
    let a = z.abs();
    let b_abs = a * e_neg_abs / (1.0 - e_neg_abs);
    if z > 0.0 {
        (b_abs, b_abs + a)
    } else {
        (b_abs + a, b_abs)
    }
}

/// Interface data shared by all columns.
#[derive(Debug, Clone)]
pub struct SGrid {
    pub ns: usize,
    pub ds: f64,
    pub kappa: f64,
    /// `exp(−κ s_{j+1/2} Δs)` for interior interfaces.
    decay: Vec<f64>,
}

impl SGrid {
    pub fn new(ns: usize, s_max: f64, kappa: f64) -> Self {
        let ds = s_max / ns as f64;
        let decay = (0..ns - 1)
            .map(|j| (-kappa * (j + 1) as f64 * ds * ds).exp())
            .collect();
        SGrid {
            ns,
            ds,
            kappa,
            decay,
        }
    }

    /// Cell centre `s_j`.
    pub fn center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.ds
    }

    /// Interface `s_{j+1/2}`.
    pub fn interface(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.ds
    }

    /// Flux `F_{j+1/2} = a_j ρ_j − b_j ρ_{j+1}` coefficients for drift `Φ − s`, `j < ns − 1`.
    pub fn coefficients(&self, flux: FluxKind, phi: f64, a: &mut [f64], b: &mut [f64]) {
        let d = 1.0 / (self.kappa * self.ds);
        match flux {
            FluxKind::ScharfetterGummel => {
                let col = (self.kappa * phi * self.ds).exp();
                for j in 0..self.ns - 1 {
                    let v = phi - self.interface(j);
                    let pe = self.kappa * v * self.ds;
                    let mut e = col * self.decay[j];
                    if !(e.is_finite() && e > 0.0) {
                        e = pe.exp();
                    }
                    let e_neg_abs = if pe > 0.0 { 1.0 / e } else { e };
                    let e_neg_abs = if e_neg_abs.is_finite() {
                        e_neg_abs
                    } else {
                        (-pe.abs()).exp()
                    };
                    let (bp, bm) = bernoulli_pair(pe, e_neg_abs);
                    a[j] = d * bm;
                    b[j] = d * bp;
                }
            }
            FluxKind::Upwind => {
                for j in 0..self.ns - 1 {
                    let v = phi - self.interface(j);
                    a[j] = d + v.max(0.0);
                    b[j] = d + (-v).max(0.0);
                }
            }
        }
    }
}

/// Largest outflow rate `max_j (a_j + b_{j−1})`.
pub fn max_outflow(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() + 1;
    (0..n)
        .map(|j| {
            let out = if j + 1 < n { a[j] } else { 0.0 };
            let back = if j > 0 { b[j - 1] } else { 0.0 };
            out + back
        })
        .fold(0.0, f64::max)
}

/// Explicit update with `c = dt/(τΔs)`; zero flux at both ends.
pub fn explicit_update(rho: &mut [f64], a: &[f64], b: &[f64], c: f64) {
    let n = rho.len();
    let mut prev = 0.0;
    let mut left = rho[0];
    for j in 0..n {
        let flux = if j + 1 < n {
            a[j] * left - b[j] * rho[j + 1]
        } else {
            0.0
        };
        let next_left = if j + 1 < n { rho[j + 1] } else { 0.0 };
        rho[j] = left - c * (flux - prev);
        prev = flux;
        left = next_left;
    }
}

/// Backward Euler `(I + cA)ρ⁺ = ρ` by the Thomas algorithm; `scratch` holds at least `ns` values.
pub fn implicit_update(rho: &mut [f64], a: &[f64], b: &[f64], c: f64, scratch: &mut [f64]) {
    let n = rho.len();
    let diag = |j: usize| {
        1.0 + c * (if j + 1 < n { a[j] } else { 0.0 } + if j > 0 { b[j - 1] } else { 0.0 })
    };
    let upper = |j: usize| -c * b[j];
    let lower = |j: usize| -c * a[j - 1];
    let cp = &mut scratch[..n];
    let d0 = diag(0);
    cp[0] = upper(0) / d0;
    rho[0] /= d0;
    for j in 1..n {
        let l = lower(j);
        let m = diag(j) - l * cp[j - 1];
        if j + 1 < n {
            cp[j] = upper(j) / m;
        }
        rho[j] = (rho[j] - l * rho[j - 1]) / m;
    }
    for j in (0..n - 1).rev() {
        rho[j] -= cp[j] * rho[j + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bernoulli(z: f64) -> f64 {
        if z == 0.0 {
            1.0
        } else {
            z / z.exp_m1()
        }
    }

    #[test]
    fn bernoulli_pair_matches_definition() {
        for &z in &[
            -40.0, -3.0, -0.2, -0.09, -1e-6, 0.0, 1e-6, 0.05, 0.099, 0.11, 2.5, 40.0,
        ] {
            let (bp, bm) = bernoulli_pair(z, (-f64::abs(z)).exp());
            assert!((bp - bernoulli(z)).abs() <= 1e-14 * (1.0 + bp.abs()), "{z}");
            assert!(
                (bm - bernoulli(-z)).abs() <= 1e-14 * (1.0 + bm.abs()),
                "{z}"
            );
        }
    }

    #[test]
    fn sampled_gaussian_has_zero_flux() {
        let g = SGrid::new(64, 3.0, 40.0);
        let phi = 0.7;
        let mut a = vec![0.0; 63];
        let mut b = vec![0.0; 63];
        g.coefficients(FluxKind::ScharfetterGummel, phi, &mut a, &mut b);
        let rho: Vec<f64> = (0..64)
            .map(|j| (-0.5 * 40.0 * (g.center(j) - phi).powi(2)).exp())
            .collect();
        for j in 0..63 {
            let f = a[j] * rho[j] - b[j] * rho[j + 1];
            assert!(
                f.abs() <= 1e-13 * a[j] * rho[j].max(rho[j + 1]) + 1e-300,
                "{j} {f}"
            );
        }
    }

    #[test]
    fn implicit_update_conserves_and_solves() {
        let g = SGrid::new(16, 2.0, 10.0);
        let mut a = vec![0.0; 15];
        let mut b = vec![0.0; 15];
        g.coefficients(FluxKind::ScharfetterGummel, 0.4, &mut a, &mut b);
        let rho0: Vec<f64> = (0..16).map(|j| 1.0 + (j as f64).sin().abs()).collect();
        let mut rho = rho0.clone();
        let mut scratch = vec![0.0; 16];
        let c = 0.7;
        implicit_update(&mut rho, &a, &b, c, &mut scratch);
        let m0: f64 = rho0.iter().sum();
        let m1: f64 = rho.iter().sum();
        assert!((m0 - m1).abs() < 1e-13 * m0);
        let mut back = rho.clone();
        explicit_update(&mut back, &a, &b, -c);
        for (x, y) in back.iter().zip(&rho0) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(rho.iter().all(|&v| v > 0.0));
    }
}
