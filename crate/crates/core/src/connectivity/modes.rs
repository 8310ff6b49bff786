//! Cosine basis `ω_k`, Fourier modes `W̃(k)` and permutation classes.
//!
//! `ω_k(x) = Θ(k)/L^{d/2} ∏ cos(2π k_i x_i / L)` with `Θ(k) = ∏ √(2 − δ_{k_i,0})`
//! is orthonormal on the even subspace of `L²(T^d)`, and `W∗ω_k = C(k)·ω_k`
//! with `C(k) = L^{d/2} W̃(k)/Θ(k)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

use super::potential::Potential;

/// `cos(2π t)` with exact values at quarter turns.
pub fn cos_turns(t: f64) -> f64 {
    let r = t.rem_euclid(1.0);
    let q = 4.0 * r;
    if q == q.round() {
        return [1.0, 0.0, -1.0, 0.0][q as usize % 4];
    }
    (2.0 * PI * r).cos()
}

/// `Θ(k)`.
pub fn theta(k: &[usize]) -> f64 {
    k.iter()
        .map(|&ki| if ki == 0 { 1.0 } else { 2f64.sqrt() })
        .product()
}

/// `W̃(k) = ⟨W, ω_k⟩` by periodic trapezoid quadrature.
pub fn fourier_mode(w: &Potential, k: &[usize]) -> Result<f64> {
    let g = w.grid();
    if k.len() != g.d {
        return Err(Error::InvalidParameter(format!(
            "mode {k:?} has wrong dimension for d={}",
            g.d
        )));
    }
    if k.iter().any(|&ki| 2 * ki >= g.n) {
        return Err(Error::Aliasing {
            k: k.to_vec(),
            n: g.n,
        });
    }
    let q = w.quadrature_grid();
    let mut vals = w.quadrature_samples().to_vec();
    for a in (0..q.d).rev() {
        let table: Vec<f64> = (0..q.n)
            .map(|i| cos_turns((k[a] * i % q.n) as f64 / q.n as f64))
            .collect();
        vals = vals
            .chunks(q.n)
            .map(|c| c.iter().zip(&table).map(|(v, t)| v * t).sum())
            .collect();
    }
    Ok(vals[0] * q.cell_volume() * theta(k) / q.l.powf(q.d as f64 / 2.0))
}

/// `(1/4) Σ_β ∏_i cos(2π k_i r_i^β / L)`.
pub fn four_comp_factor(k: &[usize], shifts: &[Vec<f64>], l: f64) -> f64 {
    let terms: f64 = shifts
        .iter()
        .map(|r| {
            k.iter()
                .zip(r)
                .map(|(&ki, &ri)| cos_turns(ki as f64 * ri / l))
                .product::<f64>()
        })
        .sum();
    terms / shifts.len() as f64
}

/// How permutation classes are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exchangeable {
    /// Merge when the potential passes the exchangeability test.
    #[default]
    Auto,
    /// Always merge.
    On,
    /// Never merge.
    Off,
}

/// A Fourier index or a permutation class `[k]` of indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeClass {
    pub id: usize,
    pub representative: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub theta: f64,
    pub w_tilde: f64,
    /// `W̃(k)/Θ(k)`.
    pub ratio: f64,
    pub card: usize,
    pub four_comp_factor: f64,
}

impl ModeClass {
    /// `ratio·factor`, the quantity compared with the threshold function.
    pub fn effective_ratio(&self) -> f64 {
        self.ratio * self.four_comp_factor
    }

    /// Convolution eigenvalue `C = L^{d/2}·ratio·factor`.
    pub fn conv_eigenvalue(&self, l: f64) -> f64 {
        l.powf(self.representative.len() as f64 / 2.0) * self.effective_ratio()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.members.iter().map(|m| format_mode(m)).collect();
        format!("[{}]", parts.join(","))
    }
}

/// `(a,b,...)`.
pub fn format_mode(k: &[usize]) -> String {
    let s: Vec<String> = k.iter().map(|v| v.to_string()).collect();
    format!("({})", s.join(","))
}

fn all_indices(d: usize, k_max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=k_max).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn permutations(k: &[usize]) -> Vec<Vec<usize>> {
    let mut base = k.to_vec();
    base.sort_unstable();
    let mut out = vec![base.clone()];
    // next lexicographic permutation
    loop {
        let n = base.len();
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| base[i] < base[i + 1])
        else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| base[j] > base[i]).unwrap();
        base.swap(i, j);
        base[i + 1..].reverse();
        out.push(base.clone());
    }
}

/// Options for [`mode_table`].
#[derive(Debug, Clone, Default)]
pub struct ModeTableOptions {
    pub exchangeable: Exchangeable,
    /// Four-component shifts; `None` for the one-component model.
    pub shifts: Option<Vec<Vec<f64>>>,
}

/// All classes with components up to `k_max`, sorted by descending ratio.
pub fn mode_table(w: &Potential, k_max: usize, opts: &ModeTableOptions) -> Result<Vec<ModeClass>> {
    let g = w.grid();
    let merge = match opts.exchangeable {
        Exchangeable::Auto => w.is_exchangeable(),
        Exchangeable::On => true,
        Exchangeable::Off => false,
    };
    let l = g.l;
    let factor = |k: &[usize]| {
        opts.shifts
            .as_ref()
            .map_or(1.0, |s| four_comp_factor(k, s, l))
    };
    let indices = all_indices(g.d, k_max);
    let values: Vec<f64> = indices
        .par_iter()
        .map(|k| fourier_mode(w, k))
        .collect::<Result<_>>()?;
    let lookup = |k: &[usize]| values[indices.iter().position(|i| i == k).unwrap()];

    let mut groups: Vec<Vec<Vec<usize>>> = Vec::new();
    for k in &indices {
        let is_rep = {
            let mut s = k.clone();
            s.sort_unstable();
            &s == k
        };
        if merge {
            if !is_rep {
                continue;
            }
            let members = permutations(k);
            let f0 = factor(k);
            if members.iter().all(|m| (factor(m) - f0).abs() <= 1e-12) {
                groups.push(members);
            } else {
                groups.extend(members.into_iter().map(|m| vec![m]));
            }
        } else {
            groups.push(vec![k.clone()]);
        }
    }

    let mut classes: Vec<ModeClass> = groups
        .into_iter()
        .map(|members| {
            let rep = members[0].clone();
            let th = theta(&rep);
            let wt = lookup(&rep);
            ModeClass {
                id: 0,
                card: members.len(),
                four_comp_factor: factor(&rep),
                theta: th,
                w_tilde: wt,
                ratio: wt / th,
                representative: rep,
                members,
            }
        })
        .collect();
    classes.sort_by(|a, b| {
        b.ratio
            .partial_cmp(&a.ratio)
            .unwrap()
            .then_with(|| a.representative.cmp(&b.representative))
    });
    for (i, c) in classes.iter_mut().enumerate() {
        c.id = i;
    }
    Ok(classes)
}

/// Largest spread of `W̃` across the members of any merged class.
pub fn class_spread(w: &Potential, classes: &[ModeClass]) -> Result<f64> {
    let mut worst = 0.0f64;
    for c in classes.iter().filter(|c| c.card > 1) {
        for m in &c.members {
            worst = worst.max((fourier_mode(w, m)? - c.w_tilde).abs());
        }
    }
    Ok(worst)
}

/// Offending mode indices paired with their coefficient.
pub type Violations = Vec<(Vec<usize>, f64)>;

/// H-stability: all modes up to `k_max` nonnegative. Returns offending indices.
pub fn h_stability_check(w: &Potential, k_max: usize) -> Result<(bool, Violations)> {
    let indices = all_indices(w.grid().d, k_max);
    let values: Vec<f64> = indices
        .par_iter()
        .map(|k| fourier_mode(w, k))
        .collect::<Result<_>>()?;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale.max(1e-300);
    let bad: Vec<(Vec<usize>, f64)> = indices
        .into_iter()
        .zip(values)
        .filter(|(_, v)| *v < -tol)
        .collect();
    Ok((bad.is_empty(), bad))
}

/// `ω_k` sampled on a grid.
pub fn omega_field(grid: PeriodicGrid, k: &[usize]) -> Vec<f64> {
    let amp = theta(k) / grid.l.powf(grid.d as f64 / 2.0);
    let tables: Vec<Vec<f64>> = k
        .iter()
        .map(|&ki| {
            (0..grid.n)
                .map(|i| cos_turns((ki * i % grid.n) as f64 / grid.n as f64))
                .collect()
        })
        .collect();
    let mut ix = vec![0; grid.d];
    (0..grid.len())
        .map(|i| {
            grid.multi_index(i, &mut ix);
            amp * ix.iter().zip(&tables).map(|(&j, t)| t[j]).product::<f64>()
        })
        .collect()
}

/// `ω_[k] = card^{-1/2} Σ_{l∈[k]} ω_l` sampled on a grid.
pub fn class_field(grid: PeriodicGrid, members: &[Vec<usize>]) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    for m in members {
        for (o, v) in out.iter_mut().zip(omega_field(grid, m)) {
            *o += v;
        }
    }
    let s = 1.0 / (members.len() as f64).sqrt();
    out.iter_mut().for_each(|v| *v *= s);
    out
}

/// `‖ω²‖₂²` for a mode or class, by quadrature exact for these trigonometric polynomials.
pub fn norm_omega_sq(members: &[Vec<usize>], l: f64) -> f64 {
    let d = members[0].len();
    let kmax = members.iter().flatten().copied().max().unwrap_or(0);
    let n = (4 * kmax + 4).next_power_of_two();
    let grid = PeriodicGrid::new(n, d, l);
    let w = class_field(grid, members);
    w.iter().map(|v| v.powi(4)).sum::<f64>() * grid.cell_volume()
}
