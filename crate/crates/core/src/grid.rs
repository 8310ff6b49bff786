//! Periodic tensor grids on `[0, L)^d` and FFT-based circular convolution.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Uniform periodic grid with `n` points per axis, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    pub n: usize,
    pub d: usize,
    pub l: f64,
}

impl PeriodicGrid {
    pub fn new(n: usize, d: usize, l: f64) -> Self {
        PeriodicGrid { n, d, l }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Quadrature weight of one grid point.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Per-axis indices of a flat index, first axis slowest.
    pub fn multi_index(&self, mut idx: usize, out: &mut [usize]) {
        for a in (0..self.d).rev() {
            out[a] = idx % self.n;
            idx /= self.n;
        }
    }

    pub fn flat_index(&self, ix: &[usize]) -> usize {
        ix.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Coordinates in `[0, L)` of a flat index.
    pub fn coords(&self, idx: usize, out: &mut [f64]) {
        let mut ix = vec![0; self.d];
        self.multi_index(idx, &mut ix);
        for a in 0..self.d {
            out[a] = ix[a] as f64 * self.spacing();
        }
    }

    /// Coordinates wrapped into `[-L/2, L/2]`, the displacement from the origin.
    pub fn wrapped_coords(&self, idx: usize, out: &mut [f64]) {
        let mut ix = vec![0; self.d];
        self.multi_index(idx, &mut ix);
        for a in 0..self.d {
            out[a] = signed_frequency(ix[a], self.n) as f64 * self.spacing();
        }
    }

    /// Evaluate `f` at every grid point (unwrapped coordinates).
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let mut x = vec![0.0; self.d];
        (0..self.len())
            .map(|i| {
                self.coords(i, &mut x);
                f(&x)
            })
            .collect()
    }

    /// Grid quadrature `Σ u v dA`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() * self.cell_volume()
    }
}

/// DFT index `i` as a signed frequency in `(-n/2, n/2]`.
pub fn signed_frequency(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Unnormalised d-dimensional FFT built from 1-D plans applied axis by axis.
#[derive(Clone)]
pub struct FftNd {
    grid: PeriodicGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("grid", &self.grid).finish()
    }
}

impl FftNd {
    pub fn new(grid: PeriodicGrid) -> Self {
        let mut planner = FftPlanner::new();
        FftNd {
            grid,
            fwd: planner.plan_fft_forward(grid.n),
            inv: planner.plan_fft_inverse(grid.n),
        }
    }

    pub fn forward(&self, data: &mut [Complex<f64>]) {
        self.apply(data, &self.fwd);
    }

    /// Inverse transform including the `1/n^d` normalisation.
    pub fn inverse(&self, data: &mut [Complex<f64>]) {
        self.apply(data, &self.inv);
        let s = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= s);
    }

    pub fn forward_real(&self, u: &[f64]) -> Vec<Complex<f64>> {
        let mut c: Vec<Complex<f64>> = u.iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.forward(&mut c);
        c
    }

    fn apply(&self, data: &mut [Complex<f64>], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n;
        let total = self.grid.len();
        let mut line = vec![Complex::new(0.0, 0.0); n];
        for a in 0..self.grid.d {
            let stride = n.pow((self.grid.d - 1 - a) as u32);
            let block = stride * n;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    plan.process(&mut line);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Circular convolution `(W∗u)(x) = Σ_y W(x−y) u(y) dA` on a periodic grid.
#[derive(Debug, Clone)]
pub struct Convolver {
    grid: PeriodicGrid,
    fft: FftNd,
    kernel: Vec<f64>,
    spectrum: Vec<Complex<f64>>,
}

impl Convolver {
    /// `kernel[i]` holds `W` at the wrapped displacement of grid point `i`.
    pub fn new(grid: PeriodicGrid, kernel: Vec<f64>) -> Self {
        assert_eq!(kernel.len(), grid.len());
        let fft = FftNd::new(grid);
        let dv = grid.cell_volume();
        let spectrum = fft
            .forward_real(&kernel)
            .into_iter()
            .map(|c| c * dv)
            .collect();
        Convolver {
            grid,
            fft,
            kernel,
            spectrum,
        }
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// Convolution eigenvalues `Σ_x W(x) e^{-2πi q·x/L} dA`, indexed like the grid.
    pub fn spectrum(&self) -> &[Complex<f64>] {
        &self.spectrum
    }

    /// Copy of this operator with the kernel translated by `shift`, `W(x − r)`.
    pub fn shifted(&self, shift: &[f64]) -> Self {
        let g = self.grid;
        let mut ix = vec![0; g.d];
        let spectrum = self
            .spectrum
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                g.multi_index(i, &mut ix);
                let phase: f64 = (0..g.d)
                    .map(|a| signed_frequency(ix[a], g.n) as f64 * shift[a])
                    .sum::<f64>()
                    * (-2.0 * std::f64::consts::PI / g.l);
                c * Complex::from_polar(1.0, phase)
            })
            .collect();
        Convolver {
            grid: g,
            fft: self.fft.clone(),
            kernel: self.kernel.clone(),
            spectrum,
        }
    }

    pub fn convolve(&self, u: &[f64]) -> Vec<f64> {
        let mut c = self.fft.forward_real(u);
        for (a, b) in c.iter_mut().zip(&self.spectrum) {
            *a *= b;
        }
        self.fft.inverse(&mut c);
        c.into_iter().map(|z| z.re).collect()
    }

    /// Spectral transform of a real field (for diagnostics).
    pub fn transform(&self, u: &[f64]) -> Vec<Complex<f64>> {
        self.fft.forward_real(u)
    }

    /// Direct `O(n^{2d})` sum, used to cross-check the FFT path.
    pub fn convolve_direct(&self, u: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let dv = g.cell_volume();
        let mut xi = vec![0; g.d];
        let mut yj = vec![0; g.d];
        let mut diff = vec![0; g.d];
        (0..g.len())
            .map(|i| {
                g.multi_index(i, &mut xi);
                let mut acc = 0.0;
                for (j, &uj) in u.iter().enumerate() {
                    g.multi_index(j, &mut yj);
                    for a in 0..g.d {
                        diff[a] = (xi[a] + g.n - yj[a]) % g.n;
                    }
                    acc += self.kernel[g.flat_index(&diff)] * uj;
                }
                acc * dv
            })
            .collect()
    }
}
