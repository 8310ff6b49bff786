//! Branch coefficients C1, C2, A3, K1, K2, K3 and the curvature κ''(0).
//!
//! Writing the mean functional as `Ḡ(ρ̄) = ρ̄ − N(W∗ρ̄)` with
//! `N(u) = M_κ(Φ(u + B))`, the derivatives of `N` at the homogeneous state are
//!
//! ```text
//! N'   = Φ' g / L^d
//! N''  = (Φ'' g + Φ'² g' √(κ/2)) / L^d
//! N''' = (Φ''' g + 3 Φ' Φ'' g' √(κ/2) + Φ'³ g'' κ/2) / L^d
//! ```
//!
//! and along a kernel direction `⟨D³Ḡ[ω,ω,ω], ω⟩ = −N''' C1³ ‖ω²‖²`.
//! K1 is kept in several forms side by side; see [`BranchCoefficients`].

use serde::Serialize;

use crate::connectivity::{norm_omega_sq, ModeClass, Potential};
use crate::error::{Error, Result};
use crate::grid::Convolver;
use crate::homogeneous::{solve_rho_bar_inf, HomogeneousState, ModelParams};
use crate::scalar::{g_prime, g_second, EtaValue};

use super::oracle::FdOracle;
use super::BifurcationPoint;

/// Sign of the branch curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    Subcritical,
    Supercritical,
    Degenerate,
}

impl Criticality {
    pub fn of(kappa_pp0: f64, kappa_star: f64) -> Self {
        let tol = 1e-9 * (1.0 + kappa_star.abs());
        if kappa_pp0 > tol {
            Criticality::Supercritical
        } else if kappa_pp0 < -tol {
            Criticality::Subcritical
        } else {
            Criticality::Degenerate
        }
    }
}

/// Curvature from the second-order Lyapunov–Schmidt reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedCurvature {
    /// `N''' C1³ ‖ω²‖² / (3 dλ/dκ)`, the cubic term alone.
    pub cubic_part: f64,
    /// `2 N'' C1 ⟨ω², W∗ψ₂⟩ / (dλ/dκ)` with `ψ₂` the quadratic correction.
    pub quadratic_part: f64,
    pub kappa_pp0: f64,
    pub label: Criticality,
}

/// All branch quantities at one crossing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub a3: f64,
    pub k3: f64,
    /// K1 in printed closed form.
    pub k1: f64,
    /// K1 from the intermediate expression with the positive C2.
    pub k1_intermediate: f64,
    /// `⟨D³Ḡ[ω,ω,ω], ω⟩` by the chain rule.
    pub k1_chain_rule: f64,
    /// K2 in printed closed form.
    pub k2: f64,
    /// `dλ_k/dκ` in closed form.
    pub k2_eigenvalue_slope: f64,
    /// `−K1/(3 K2)` from the printed closed forms.
    pub kappa_pp0: f64,
    pub label: Criticality,
    /// `−⟨D³Ḡ⟩/(3 dλ/dκ)` assembled from the finite-difference oracle.
    pub kappa_pp0_fd: Option<f64>,
    pub reduced: Option<ReducedCurvature>,
    pub warnings: Vec<String>,
}

/// Which optional cross-checks to run.
#[derive(Debug, Clone, Copy)]
pub struct BranchOptions {
    pub fd_oracle: bool,
    pub reduced: bool,
}

impl Default for BranchOptions {
    fn default() -> Self {
        BranchOptions {
            fd_oracle: true,
            reduced: true,
        }
    }
}

/// Derivatives `(N', N'', N''')` at the homogeneous state.
pub fn response_derivatives(
    st: &HomogeneousState,
    params: &ModelParams,
) -> Result<(f64, f64, f64)> {
    let ld = params.volume();
    let eta = EtaValue::new(st.eta)?;
    let (g, g1, g2) = (st.g, g_prime(eta), g_second(eta));
    let p1 = st.phi0p;
    let p2 = st.phi0pp;
    let p3 = st.phi0ppp.ok_or(Error::MissingThirdDerivative)?;
    let r = (0.5 * st.kappa).sqrt();
    let n1 = p1 * g / ld;
    let n2 = (p2 * g + p1 * p1 * g1 * r) / ld;
    let n3 = (p3 * g + 3.0 * p1 * p2 * g1 * r + p1 * p1 * p1 * g2 * 0.5 * st.kappa) / ld;
    Ok((n1, n2, n3))
}

/// Closed-form `dλ_k/dκ = −Φ0''W0ρ̄'/Φ0' + L^d(Φ0/2 + κΦ0'W0ρ̄')A3(ρ̄ − Φ0/L^d)` at a crossing.
pub fn eigenvalue_slope(st: &HomogeneousState, params: &ModelParams) -> f64 {
    let ld = params.volume();
    let a3 = 1.0 - ld * ld * st.rho_bar_inf * st.rho_bar_inf * st.kappa / st.g;
    let dr = st.d_rho_bar_d_kappa;
    -st.phi0pp * params.w0 * dr / st.phi0p
        + ld * (0.5 * st.phi0 + st.kappa * st.phi0p * params.w0 * dr) * a3 * st.excess_mean()
}

/// Coefficients at a crossing; `w` enables the oracle and reduction cross-checks.
pub fn branch_coefficients(
    pt: &BifurcationPoint,
    params: &ModelParams,
    w: Option<&Potential>,
    opts: BranchOptions,
) -> Result<BranchCoefficients> {
    let st = solve_rho_bar_inf(params, pt.kappa_star)?;
    let p3 = st.phi0ppp.ok_or(Error::MissingThirdDerivative)?;
    let ld = params.volume();
    let (p0, p1, p2) = (st.phi0, st.phi0p, st.phi0pp);
    let kappa = st.kappa;
    let rho = st.rho_bar_inf;
    let excess = st.excess_mean();
    let rho0 = st.rho_inf_at_zero;
    let class = &pt.class;
    let c1 = class.conv_eigenvalue(params.l);
    let norm4 = norm_omega_sq(&class.members, params.l);

    let c2 = crate::homogeneous::one_minus_g_of(&st) / st.g;
    let a3 = 1.0 - ld * ld * rho * rho * kappa / st.g;
    let k3 = 1.0 - ld * rho * kappa * p1 * c1;
    let dr = st.d_rho_bar_d_kappa;

    let k1 = (-p3 / p1
        + 2.0 * p2 * ld * k3 * rho0
        + p1 * ld
            * (-(2.0 * ld / c1 - 2.0 * p1 / ld + rho * p2 * c1) * kappa
                + (rho0 / kappa) * (p2 / p1 - p1 * ld * k3 * rho0)))
        * c1
        * c1
        * norm4;
    let k1_intermediate = (-p3 / p1 * c1 * c1
        + 2.0 * p2 * ld * a3 * c1 * c1 * excess * kappa
        + p1 * ld
            * (-(2.0 * c2 + rho * p2 * c1 * c1) * kappa
                + excess * (p2 / p1 - p1 * ld * a3 * excess * kappa))
            * c1)
        * norm4;
    let (_, n2, n3) = response_derivatives(&st, params)?;
    let k1_chain_rule = -n3 * c1.powi(3) * norm4;

    let k2 = -p2 * params.w0 * dr / p1 + ld * (0.5 * p0 + p1 * params.w0 * dr) * a3 * excess;
    let k2_eigenvalue_slope = eigenvalue_slope(&st, params);
    let kappa_pp0 = -k1 / (3.0 * k2);
    let label = Criticality::of(kappa_pp0, pt.kappa_star);

    let mut warnings = Vec::new();
    let mut kappa_pp0_fd = None;
    let mut reduced = None;
    if let Some(w) = w {
        if opts.fd_oracle && class.four_comp_factor == 1.0 {
            let oracle = FdOracle::new(params, w)?;
            let d3 = oracle.derivative(pt.kappa_star, &class.members, 3)?;
            let slope = oracle.eigenvalue_slope(pt.kappa_star, &class.members)?;
            let fd = -d3 / (3.0 * slope);
            if (fd - kappa_pp0).abs() > 1e-3 * fd.abs() {
                warnings.push(format!(
                    "kappa''(0) from the closed-form K1/K2 ({kappa_pp0:.6e}) differs from the finite-difference \
                     third-derivative assembly ({fd:.6e}); C2 sign ambiguity"
                ));
            }
            kappa_pp0_fd = Some(fd);
        }
        if opts.reduced && class.four_comp_factor == 1.0 {
            match quadratic_correction(w, class, n2, c1) {
                Ok(inner) => {
                    let cubic_part = n3 * c1.powi(3) * norm4 / (3.0 * k2_eigenvalue_slope);
                    let quadratic_part = 2.0 * n2 * c1 * inner / k2_eigenvalue_slope;
                    let total = cubic_part + quadratic_part;
                    reduced = Some(ReducedCurvature {
                        cubic_part,
                        quadratic_part,
                        kappa_pp0: total,
                        label: Criticality::of(total, pt.kappa_star),
                    });
                }
                Err(e) => warnings.push(format!("second-order reduction skipped: {e}")),
            }
        }
    }
    if let Some(r) = reduced {
        if r.label != label {
            warnings.push(format!(
                "second-order reduction gives kappa''(0) = {:.6e} ({:?}), opposite to the closed-form value",
                r.kappa_pp0, r.label
            ));
        }
    }
    Ok(BranchCoefficients {
        c1,
        c2,
        a3,
        k3,
        k1,
        k1_intermediate,
        k1_chain_rule,
        k2,
        k2_eigenvalue_slope,
        kappa_pp0,
        label,
        kappa_pp0_fd,
        reduced,
        warnings,
    })
}

/// `⟨ω², W∗ψ₂⟩` where `(I − N'W∗)ψ₂ = ½ N'' C1² ω²` on the complement of the kernel.
fn quadratic_correction(w: &Potential, class: &ModeClass, n2: f64, c1: f64) -> Result<f64> {
    let g = w.grid();
    let kmax = class.members.iter().flatten().copied().max().unwrap_or(0);
    if 4 * kmax >= g.n {
        return Err(Error::Aliasing {
            k: class.representative.clone(),
            n: g.n,
        });
    }
    let omega = crate::connectivity::class_field(g, &class.members);
    let sq: Vec<f64> = omega.iter().map(|v| v * v).collect();
    let conv = Convolver::new(g, w.samples().to_vec());
    let spec = conv.transform(&sq);
    let n1 = 1.0 / c1;
    let norm = g.cell_volume() / g.len() as f64;
    let total: f64 = sq.iter().map(|v| v * v).sum::<f64>() * g.cell_volume();
    let mut acc = 0.0;
    for (u, c) in spec.iter().zip(conv.spectrum()) {
        let e = u.norm_sqr() * norm;
        let denom = 1.0 - n1 * c.re;
        if denom.abs() < 1e-6 {
            if e > 1e-20 * total {
                return Err(Error::Numerical(
                    "omega squared resonates with the kernel".into(),
                ));
            }
            continue;
        }
        acc += c.re * e / denom;
    }
    Ok(0.5 * n2 * c1 * c1 * acc)
}
