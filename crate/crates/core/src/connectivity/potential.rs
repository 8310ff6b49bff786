//! Connectivity potentials on the torus.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

/// Serializable description of a potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `amplitude·(1 + tanh(offset − steepness·√(Σ aniso_i x_i²)))`.
    TanhRing {
        amplitude: f64,
        offset: f64,
        steepness: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        aniso: Option<Vec<f64>>,
    },
    /// `amplitude·(exp(−ratio·width·|x|²) − exp(−width·|x|²))`.
    DifferenceOfGaussians {
        amplitude: f64,
        width: f64,
        ratio: f64,
    },
    /// `amplitude·1{|x| < radius}`.
    BallIndicator { amplitude: f64, radius: f64 },
    /// Samples from a CSV file (header `N,L,d`, then `N^d` row-major values).
    GridTable { path: String },
}

impl PotentialSpec {
    /// Potential of the crossing diagrams, `−0.005·2^14(1 + tanh(10 − 50√(a x² + y²)))`.
    pub fn standard_tanh_ring(a: f64) -> Self {
        PotentialSpec::TanhRing {
            amplitude: -0.005 * 16384.0,
            offset: 10.0,
            steepness: 50.0,
            aniso: Some(vec![a, 1.0]),
        }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    TanhRing {
        amplitude: f64,
        offset: f64,
        steepness: f64,
        aniso: Vec<f64>,
    },
    DifferenceOfGaussians {
        amplitude: f64,
        width: f64,
        ratio: f64,
    },
    BallIndicator {
        amplitude: f64,
        radius: f64,
    },
    Table,
}

impl Shape {
    fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Shape::TanhRing {
                amplitude,
                offset,
                steepness,
                aniso,
            } => {
                let q: f64 = x.iter().zip(aniso).map(|(v, a)| a * v * v).sum();
                amplitude * (1.0 + (offset - steepness * q.sqrt()).tanh())
            }
            Shape::DifferenceOfGaussians {
                amplitude,
                width,
                ratio,
            } => amplitude * ((-ratio * width * r2).exp() - (-width * r2).exp()),
            Shape::BallIndicator { amplitude, radius } => {
                if r2 < radius * radius {
                    *amplitude
                } else {
                    0.0
                }
            }
            Shape::Table => unreachable!("tables are never evaluated pointwise"),
        }
    }
}

/// Coordinate-wise even potential sampled on a periodic grid.
///
/// `samples` is indexed like [`PeriodicGrid`], holding `W` at the displacement
/// of each grid point from the origin. Quadratures use `quadrature`, which is a
/// 4× finer grid for the discontinuous ball indicator and `samples` otherwise.
#[derive(Debug, Clone)]
pub struct Potential {
    shape: Shape,
    grid: PeriodicGrid,
    samples: Vec<f64>,
    quad_grid: PeriodicGrid,
    quadrature: Vec<f64>,
}

const OVERSAMPLE: usize = 4;

impl Potential {
    /// Build from a spec; `grid_n` is ignored for tables, which carry their own size.
    pub fn from_spec(spec: &PotentialSpec, l: f64, d: usize, grid_n: usize) -> Result<Self> {
        if let PotentialSpec::GridTable { path } = spec {
            let pot = Self::load_csv(Path::new(path))?;
            if (pot.grid.l - l).abs() > 1e-12 * l || pot.grid.d != d {
                return Err(Error::Config(format!(
                    "grid table {path} has L={}, d={} but the model has L={l}, d={d}",
                    pot.grid.l, pot.grid.d
                )));
            }
            return Ok(pot);
        }
        if grid_n < 4 || !grid_n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid_n must be a power of two >= 4, got {grid_n}"
            )));
        }
        let shape = match spec {
            PotentialSpec::TanhRing {
                amplitude,
                offset,
                steepness,
                aniso,
            } => {
                let aniso = aniso.clone().unwrap_or_else(|| vec![1.0; d]);
                if aniso.len() != d || aniso.iter().any(|&a| !(a > 0.0)) {
                    return Err(Error::InvalidParameter(format!(
                        "aniso needs {d} positive weights"
                    )));
                }
                Shape::TanhRing {
                    amplitude: *amplitude,
                    offset: *offset,
                    steepness: *steepness,
                    aniso,
                }
            }
            PotentialSpec::DifferenceOfGaussians {
                amplitude,
                width,
                ratio,
            } => Shape::DifferenceOfGaussians {
                amplitude: *amplitude,
                width: *width,
                ratio: *ratio,
            },
            PotentialSpec::BallIndicator { amplitude, radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidParameter(
                        "ball radius must be positive".into(),
                    ));
                }
                Shape::BallIndicator {
                    amplitude: *amplitude,
                    radius: *radius,
                }
            }
            PotentialSpec::GridTable { .. } => unreachable!(),
        };
        let grid = PeriodicGrid::new(grid_n, d, l);
        let sample_on = |g: PeriodicGrid| {
            let mut x = vec![0.0; d];
            (0..g.len())
                .map(|i| {
                    g.wrapped_coords(i, &mut x);
                    shape.eval(&x)
                })
                .collect::<Vec<f64>>()
        };
        let (samples, quad_grid, quadrature) = if let Shape::BallIndicator { .. } = shape {
            let fine = PeriodicGrid::new(grid_n * OVERSAMPLE, d, l);
            let q = sample_on(fine);
            (cell_average(&q, fine, grid), fine, q)
        } else {
            let s = sample_on(grid);
            (s.clone(), grid, s)
        };
        let pot = Potential {
            shape,
            grid,
            samples,
            quad_grid,
            quadrature,
        };
        pot.check_even()?;
        Ok(pot)
    }

    /// Wrap raw samples (index 0 at the origin) as a table potential.
    pub fn from_samples(grid: PeriodicGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Config(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("potential samples must be finite".into()));
        }
        let pot = Potential {
            shape: Shape::Table,
            grid,
            quad_grid: grid,
            quadrature: samples.clone(),
            samples,
        };
        pot.check_even()?;
        Ok(pot)
    }

    /// Read a CSV table: a header `N,L,d`, one line with those values, then
    /// `N^d` row-major samples separated by commas or newlines.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let io = |source| Error::Io {
            path: path.display().to_string(),
            source,
        };
        let text = std::fs::read_to_string(path).map_err(io)?;
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(text.as_bytes());
        let header = rdr
            .headers()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            .clone();
        let names: Vec<&str> = header.iter().map(str::trim).collect();
        if names != ["N", "L", "d"] {
            return Err(Error::Config(format!(
                "{}: header must be N,L,d, found {:?}",
                path.display(),
                names
            )));
        }
        let mut numbers = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            for field in rec.iter().map(str::trim).filter(|f| !f.is_empty()) {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Config(format!(
                        "{}: line {}: cannot parse {field:?}",
                        path.display(),
                        line + 2
                    ))
                })?;
                numbers.push(v);
            }
        }
        if numbers.len() < 3 {
            return Err(Error::Config(format!(
                "{}: missing N,L,d values",
                path.display()
            )));
        }
        let (n, l, d) = (numbers[0], numbers[1], numbers[2]);
        if n.fract() != 0.0 || n < 1.0 || d.fract() != 0.0 || d < 1.0 || !(l > 0.0) {
            return Err(Error::Config(format!(
                "{}: invalid N={n}, L={l}, d={d}",
                path.display()
            )));
        }
        let grid = PeriodicGrid::new(n as usize, d as usize, l);
        Self::from_samples(grid, numbers[3..].to_vec())
    }

    /// Write in the format read by [`Potential::load_csv`].
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.display().to_string(),
            source,
        };
        let mut out = format!("N,L,d\n{},{},{}\n", self.grid.n, self.grid.l, self.grid.d);
        for row in self.samples.chunks(self.grid.n) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        std::fs::write(path, out).map_err(io)
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    /// `W` at the displacement of every grid point from the origin.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn quadrature_grid(&self) -> PeriodicGrid {
        self.quad_grid
    }

    pub fn quadrature_samples(&self) -> &[f64] {
        &self.quadrature
    }

    /// `W0 = ∫ W`.
    pub fn w0(&self) -> f64 {
        self.quadrature.iter().sum::<f64>() * self.quad_grid.cell_volume()
    }

    /// `∫ W²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.quadrature.iter().map(|v| v * v).sum::<f64>() * self.quad_grid.cell_volume()
    }

    /// Closed-form value at a displacement; `None` for tables.
    pub fn eval(&self, x: &[f64]) -> Option<f64> {
        match self.shape {
            Shape::Table => None,
            ref s => Some(s.eval(x)),
        }
    }

    /// Potential with every sample negated.
    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.shape = Shape::Table;
        p.samples.iter_mut().for_each(|v| *v = -*v);
        p.quadrature.iter_mut().for_each(|v| *v = -*v);
        p
    }

    fn check_even(&self) -> Result<()> {
        let defect = max_defect(&self.samples, self.grid, |ix, a, g| {
            ix[a] = (g.n - ix[a]) % g.n;
        });
        let scale = self
            .samples
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
        if defect > 1e-12 * scale {
            return Err(Error::NotEven { defect });
        }
        Ok(())
    }

    /// Largest relative change of the samples under a swap of two axes.
    pub fn exchange_defect(&self) -> f64 {
        if self.grid.d < 2 {
            return 0.0;
        }
        let scale = self
            .samples
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
        let defect = max_defect(&self.samples, self.grid, |ix, a, g| {
            let b = (a + 1) % g.d;
            ix.swap(a, b);
        });
        defect / scale
    }

    /// Invariance under all axis permutations (adjacent swaps generate them).
    pub fn is_exchangeable(&self) -> bool {
        self.exchange_defect() <= 1e-10
    }
}

fn max_defect(v: &[f64], g: PeriodicGrid, map: impl Fn(&mut [usize], usize, PeriodicGrid)) -> f64 {
    let mut ix = vec![0; g.d];
    let mut worst = 0.0f64;
    for a in 0..g.d {
        for (i, &vi) in v.iter().enumerate() {
            g.multi_index(i, &mut ix);
            map(&mut ix, a, g);
            worst = worst.max((vi - v[g.flat_index(&ix)]).abs());
        }
    }
    worst
}

/// Trapezoid cell averages of fine samples over `[-h/2, h/2]^d` around each coarse point.
fn cell_average(fine: &[f64], fg: PeriodicGrid, cg: PeriodicGrid) -> Vec<f64> {
    let r = fg.n / cg.n;
    let half = (r / 2) as i64;
    let weights: Vec<f64> = (-half..=half)
        .map(|o| if o.abs() == half { 0.5 } else { 1.0 } / r as f64)
        .collect();
    let d = cg.d;
    let mut ci = vec![0; d];
    let mut fi = vec![0; d];
    let mut offs = vec![0usize; d];
    let m = weights.len();
    (0..cg.len())
        .map(|c| {
            cg.multi_index(c, &mut ci);
            let mut acc = 0.0;
            offs.iter_mut().for_each(|o| *o = 0);
            loop {
                let mut w = 1.0;
                for a in 0..d {
                    let o = offs[a] as i64 - half;
                    fi[a] = ((ci[a] * r) as i64 + o).rem_euclid(fg.n as i64) as usize;
                    w *= weights[offs[a]];
                }
                acc += w * fine[fg.flat_index(&fi)];
                let mut a = d;
                loop {
                    if a == 0 {
                        return acc;
                    }
                    a -= 1;
                    offs[a] += 1;
                    if offs[a] < m {
                        break;
                    }
                    offs[a] = 0;
                }
            }
        })
        .collect()
}
