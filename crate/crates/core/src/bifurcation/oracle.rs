//! Finite-difference directional derivatives of the discretised mean functional
//! `Ḡ(ρ̄, κ) = ρ̄ − M_κ(Φ(W∗ρ̄ + B))`, independent of the closed forms.

use crate::connectivity::{class_field, Potential};
use crate::error::{Error, Result};
use crate::grid::{Convolver, PeriodicGrid};
use crate::homogeneous::{solve_rho_bar_inf, ModelParams};

/// Step multipliers tried in order until coarse and fine estimates agree.
const STEP_LADDER: [f64; 5] = [1.0, 4.0, 16.0, 0.25, 64.0];

/// Mean functional on the potential's grid.
#[derive(Debug, Clone)]
pub struct FdOracle {
    params: ModelParams,
    conv: Convolver,
    grid: PeriodicGrid,
    /// Relative base step; the order-dependent step is this times `ρ̄∞`.
    pub rel_step: [f64; 3],
}

impl FdOracle {
    /// Uses the grid sum of the sampled kernel as `W0`, so the homogeneous
    /// state is an exact zero of the discrete functional.
    pub fn new(params: &ModelParams, w: &Potential) -> Result<Self> {
        let grid = w.grid();
        let conv = Convolver::new(grid, w.samples().to_vec());
        let w0 = conv.spectrum()[0].re;
        let mut p = params.clone();
        p.w0 = w0;
        let p = ModelParams::new(p.l, p.d, p.b, p.tau, p.phi, p.w0)?;
        Ok(FdOracle {
            params: p,
            conv,
            grid,
            rel_step: [1e-4, 1e-3, 1e-3],
        })
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    /// `Ḡ(ρ̄, κ)` pointwise.
    pub fn functional(&self, rho: &[f64], kappa: f64) -> Vec<f64> {
        let u = self.conv.convolve(rho);
        rho.iter()
            .zip(u)
            .map(|(&r, ui)| {
                r - self
                    .params
                    .gaussian_mean(kappa, self.params.phi.value(ui + self.params.b))
            })
            .collect()
    }

    fn pointwise(&self, base: &[f64], dir: &[f64], kappa: f64, order: usize, h: f64) -> Vec<f64> {
        let at = |t: f64| {
            let x: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + t * d).collect();
            self.functional(&x, kappa)
        };
        let comb = |terms: &[(f64, f64)], scale: f64| {
            let evals: Vec<(f64, Vec<f64>)> = terms.iter().map(|&(t, c)| (c, at(t * h))).collect();
            (0..base.len())
                .map(|i| evals.iter().map(|(c, v)| c * v[i]).sum::<f64>() / scale)
                .collect()
        };
        match order {
            1 => comb(&[(1.0, 1.0), (-1.0, -1.0)], 2.0 * h),
            2 => comb(&[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)], h * h),
            _ => comb(
                &[(2.0, 1.0), (1.0, -2.0), (-1.0, 2.0), (-2.0, -1.0)],
                2.0 * h * h * h,
            ),
        }
    }

    /// `⟨D^m Ḡ[ω,…,ω], ω⟩` along `ω_[k]` for the given class members, with Richardson extrapolation.
    pub fn derivative(&self, kappa: f64, members: &[Vec<usize>], order: usize) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidParameter(format!(
                "oracle order must be 1, 2 or 3, got {order}"
            )));
        }
        let kmax = members.iter().flatten().copied().max().unwrap_or(0);
        if 2 * kmax >= self.grid.n {
            return Err(Error::Aliasing {
                k: members[0].clone(),
                n: self.grid.n,
            });
        }
        let st = solve_rho_bar_inf(&self.params, kappa)?;
        let base = vec![st.rho_bar_inf; self.grid.len()];
        let dir = class_field(self.grid, members);
        let spread = self
            .conv
            .convolve(&dir)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let cap = if st.u0 > 0.0 && spread > 0.0 {
            0.1 * st.u0 / spread
        } else {
            f64::INFINITY
        };
        let mut last = (f64::NAN, f64::NAN);
        let mut tried: Vec<f64> = Vec::new();
        for mult in STEP_LADDER {
            let h = (mult * self.rel_step[order - 1] * st.rho_bar_inf).min(cap);
            if tried.contains(&h) {
                continue;
            }
            tried.push(h);
            let coarse_v = self.pointwise(&base, &dir, kappa, order, h);
            let fine_v = self.pointwise(&base, &dir, kappa, order, 0.5 * h);
            let coarse = self.grid.inner(&coarse_v, &dir);
            let fine = self.grid.inner(&fine_v, &dir);
            let floor = if order == 1 {
                1.0
            } else {
                self.grid.inner(&fine_v, &fine_v).sqrt()
            };
            let scale = coarse.abs().max(fine.abs()).max(floor);
            if (coarse - fine).abs() <= 1e-2 * scale {
                return Ok(fine + (fine - coarse) / 3.0);
            }
            last = (coarse, fine);
        }
        Err(Error::StepCollapse {
            coarse: last.0,
            fine: last.1,
        })
    }

    /// `dλ/dκ` by central differences of the order-1 oracle.
    pub fn eigenvalue_slope(&self, kappa: f64, members: &[Vec<usize>]) -> Result<f64> {
        let dk = 1e-4 * kappa;
        let up = self.derivative(kappa + dk, members, 1)?;
        let down = self.derivative(kappa - dk, members, 1)?;
        Ok((up - down) / (2.0 * dk))
    }
}

/// One-shot oracle evaluation.
pub fn frechet_fd_oracle(
    params: &ModelParams,
    w: &Potential,
    kappa: f64,
    members: &[Vec<usize>],
    order: usize,
) -> Result<f64> {
    FdOracle::new(params, w)?.derivative(kappa, members, order)
}
