//! Tangent patterns `ρ̄_{κ(z)} − ρ̄∞ ≈ z·Σ weights·ω_k` on a grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::connectivity::{theta, ModeClass};
use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

/// `weight·∏_i trig(2π k_i x_i / L)` with `trig` cosine or sine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: Vec<usize>,
    pub weight: f64,
    #[serde(default)]
    pub sine: bool,
}

impl TrigTerm {
    pub fn cos(k: &[usize], weight: f64) -> Self {
        TrigTerm {
            k: k.to_vec(),
            weight,
            sine: false,
        }
    }

    pub fn sin(k: &[usize], weight: f64) -> Self {
        TrigTerm {
            k: k.to_vec(),
            weight,
            sine: true,
        }
    }

    /// `weight·ω_k`.
    pub fn omega(k: &[usize], weight: f64, l: f64) -> Self {
        TrigTerm::cos(k, weight * theta(k) / l.powf(k.len() as f64 / 2.0))
    }
}

/// Named patterns of the crossing study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum PatternPreset {
    /// `ω_k`.
    ModeK { k: Vec<usize> },
    /// `ω_[k]`, normalised sum over coordinate permutations.
    ClassK { k: Vec<usize> },
    /// `cos8πx cos2πy + cos2πx cos8πy + cos6πx cos6πy`.
    Superpose2nd3rd,
    /// `cos8πx + cos8πy + cos6πx cos6πy`.
    Superpose1st3rd,
    /// `cos8πx + cos8πy + cos8πx cos2πy + cos2πx cos8πy`.
    Superpose1st2nd,
    /// `Σ cos·cos + sin·sin` over (3,3), (4,1), (1,4): one orientation of a hexagonal lattice.
    Hex,
    /// Zero field.
    Zero,
}

/// Terms of a preset in dimension `d` (presets other than mode/class need d = 2).
pub fn pattern_preset(preset: &PatternPreset, d: usize, l: f64) -> Result<Vec<TrigTerm>> {
    let two_d = |terms: Vec<TrigTerm>| {
        if d == 2 {
            Ok(terms)
        } else {
            Err(Error::InvalidParameter(format!(
                "preset {preset:?} is two-dimensional"
            )))
        }
    };
    match preset {
        PatternPreset::ModeK { k } | PatternPreset::ClassK { k } if k.len() != d => Err(
            Error::InvalidParameter(format!("mode {k:?} does not have {d} components")),
        ),
        PatternPreset::ModeK { k } => Ok(vec![TrigTerm::omega(k, 1.0, l)]),
        PatternPreset::ClassK { k } => {
            let mut sorted = k.clone();
            sorted.sort_unstable();
            let mut members = vec![sorted.clone()];
            let mut cur = sorted;
            while next_permutation(&mut cur) {
                members.push(cur.clone());
            }
            let s = 1.0 / (members.len() as f64).sqrt();
            Ok(members.iter().map(|m| TrigTerm::omega(m, s, l)).collect())
        }
        PatternPreset::Superpose2nd3rd => two_d(vec![
            TrigTerm::cos(&[4, 1], 1.0),
            TrigTerm::cos(&[1, 4], 1.0),
            TrigTerm::cos(&[3, 3], 1.0),
        ]),
        PatternPreset::Superpose1st3rd => two_d(vec![
            TrigTerm::cos(&[4, 0], 1.0),
            TrigTerm::cos(&[0, 4], 1.0),
            TrigTerm::cos(&[3, 3], 1.0),
        ]),
        PatternPreset::Superpose1st2nd => two_d(vec![
            TrigTerm::cos(&[4, 0], 1.0),
            TrigTerm::cos(&[0, 4], 1.0),
            TrigTerm::cos(&[4, 1], 1.0),
            TrigTerm::cos(&[1, 4], 1.0),
        ]),
        PatternPreset::Hex => two_d(
            [[3, 3], [4, 1], [1, 4]]
                .iter()
                .flat_map(|k| [TrigTerm::cos(k, 1.0), TrigTerm::sin(k, 1.0)])
                .collect(),
        ),
        PatternPreset::Zero => Ok(vec![]),
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Terms of `ω_[k]` for a class.
pub fn class_terms(class: &ModeClass, l: f64) -> Vec<TrigTerm> {
    let s = 1.0 / (class.card as f64).sqrt();
    class
        .members
        .iter()
        .map(|m| TrigTerm::omega(m, s, l))
        .collect()
}

/// Sample `Σ terms` on an `n^d` grid; requires `n ≥ 4·max component`.
pub fn pattern_field(terms: &[TrigTerm], grid_n: usize, d: usize, l: f64) -> Result<Vec<f64>> {
    let grid = PeriodicGrid::new(grid_n, d, l);
    for t in terms {
        if t.k.len() != d {
            return Err(Error::InvalidParameter(format!(
                "term {:?} does not have {d} components",
                t.k
            )));
        }
        if t.k.iter().any(|&ki| grid_n < 4 * ki) {
            return Err(Error::Aliasing {
                k: t.k.clone(),
                n: grid_n,
            });
        }
    }
    let mut x = vec![0.0; d];
    Ok((0..grid.len())
        .map(|i| {
            grid.coords(i, &mut x);
            terms
                .iter()
                .map(|t| {
                    t.weight
                        * t.k
                            .iter()
                            .zip(&x)
                            .map(|(&k, &xi)| {
                                let a = 2.0 * PI * k as f64 * xi / l;
                                if t.sine {
                                    a.sin()
                                } else {
                                    a.cos()
                                }
                            })
                            .product::<f64>()
                })
                .sum()
        })
        .collect())
}
