//! Spectral summaries of the mean field.

use std::collections::BTreeMap;

use crate::grid::{signed_frequency, FftNd, PeriodicGrid};

/// `‖ρ̄ − mean(ρ̄)‖₂` on the torus.
pub fn deviation_l2(grid: PeriodicGrid, rho_bar: &[f64]) -> f64 {
    let mean = rho_bar.iter().sum::<f64>() / rho_bar.len() as f64;
    (rho_bar.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() * grid.cell_volume()).sqrt()
}

/// `‖ρ̄ − c‖∞`.
pub fn deviation_sup(rho_bar: &[f64], c: f64) -> f64 {
    rho_bar.iter().fold(0.0, |m, v| m.max((v - c).abs()))
}

/// Power spectrum of a field keyed by signed frequency.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: PeriodicGrid,
    energy: Vec<f64>,
}

impl Spectrum {
    pub fn new(grid: PeriodicGrid, field: &[f64]) -> Self {
        let fft = FftNd::new(grid);
        let energy = fft
            .forward_real(field)
            .iter()
            .map(|c| c.norm_sqr())
            .collect();
        Spectrum { grid, energy }
    }

    fn at(&self, k: &[i64]) -> f64 {
        let n = self.grid.n as i64;
        let idx: Vec<usize> = k.iter().map(|&ki| ki.rem_euclid(n) as usize).collect();
        self.energy[self.grid.flat_index(&idx)]
    }

    /// Energy of all non-constant modes.
    pub fn non_dc(&self) -> f64 {
        self.energy.iter().skip(1).sum()
    }

    /// Folded mode `(|k_1|, …, |k_d|)` carrying the most energy; ties go to the smallest index.
    pub fn dominant_mode(&self) -> Option<Vec<usize>> {
        let mut folded: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut ix = vec![0usize; self.grid.d];
        for (i, &e) in self.energy.iter().enumerate().skip(1) {
            self.grid.multi_index(i, &mut ix);
            let key = ix
                .iter()
                .map(|&j| signed_frequency(j, self.grid.n).unsigned_abs() as usize)
                .collect();
            *folded.entry(key).or_insert(0.0) += e;
        }
        let mut best: Option<(Vec<usize>, f64)> = None;
        for (k, e) in folded {
            if e > 0.0 && best.as_ref().is_none_or(|(_, b)| e > *b) {
                best = Some((k, e));
            }
        }
        best.map(|(k, _)| k)
    }

    /// Energy fraction in `±(3,−3), ±(4,−1), ±(1,−4)` or its mirror image, whichever is larger.
    pub fn hexagonality(&self) -> f64 {
        if self.grid.d != 2 || self.grid.n < 10 {
            return 0.0;
        }
        let total = self.non_dc();
        if total <= 0.0 {
            return 0.0;
        }
        let set = |sign: i64| -> f64 {
            [[3, 3], [4, 1], [1, 4]]
                .iter()
                .map(|k| self.at(&[k[0], -sign * k[1]]) + self.at(&[-k[0], sign * k[1]]))
                .sum()
        };
        set(1).max(set(-1)) / total
    }
}
