//! Gain functions Φ: continuous, zero on ℝ₋, increasing on ℝ₊.
//!
//! Derivatives at and below zero are taken as zero; for `u > 0` they are the
//! analytic right-hand values, so `Φ'(0⁺)` is reported separately as
//! [`GainFunction::right_slope_at_zero`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializable description of a gain function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GainSpec {
    /// `Φ(u) = max(u, 0)`.
    Relu,
    /// `Φ(u) = scale·u·(1 + u/√(u² + softness))` for `u > 0`, zero otherwise.
    SmoothTanh {
        #[serde(default = "default_scale")]
        scale: f64,
        #[serde(default = "default_softness")]
        softness: f64,
    },
    /// Monotone cubic (Fritsch–Carlson) through `(x, phi)` samples.
    UserTable { x: Vec<f64>, phi: Vec<f64> },
}

fn default_scale() -> f64 {
    0.5
}

fn default_softness() -> f64 {
    0.1
}

/// Evaluated gain function with derivatives up to third order.
#[derive(Debug, Clone)]
pub enum GainFunction {
    Relu,
    SmoothTanh { scale: f64, softness: f64 },
    UserTable(MonotoneCubic),
}

impl GainFunction {
    pub fn from_spec(spec: &GainSpec) -> Result<Self> {
        match spec {
            GainSpec::Relu => Ok(GainFunction::Relu),
            GainSpec::SmoothTanh { scale, softness } => {
                if !(*scale > 0.0 && *softness > 0.0) {
                    return Err(Error::InvalidParameter(
                        "smooth_tanh needs scale > 0 and softness > 0".into(),
                    ));
                }
                Ok(GainFunction::SmoothTanh {
                    scale: *scale,
                    softness: *softness,
                })
            }
            GainSpec::UserTable { x, phi } => {
                Ok(GainFunction::UserTable(MonotoneCubic::new(x, phi)?))
            }
        }
    }

    /// The gain used in the crossing diagrams: `0.5·u·(1 + u/√(u²+0.1))⁺`.
    pub fn standard_smooth() -> Self {
        GainFunction::SmoothTanh {
            scale: 0.5,
            softness: 0.1,
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self {
            GainFunction::Relu => u,
            GainFunction::SmoothTanh { scale, softness } => {
                scale * u * (1.0 + u / (u * u + softness).sqrt())
            }
            GainFunction::UserTable(t) => t.value(u),
        }
    }

    pub fn d1(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self {
            GainFunction::Relu => 1.0,
            GainFunction::SmoothTanh { scale, softness } => {
                let q2 = u * u + softness;
                let q3 = q2 * q2.sqrt();
                scale * (1.0 + (u * u * u + 2.0 * softness * u) / q3)
            }
            GainFunction::UserTable(t) => t.d1(u),
        }
    }

    pub fn d2(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self {
            GainFunction::Relu => 0.0,
            GainFunction::SmoothTanh { scale, softness } => {
                let q2 = u * u + softness;
                let q5 = q2 * q2 * q2.sqrt();
                scale * softness * (2.0 * softness - u * u) / q5
            }
            GainFunction::UserTable(t) => t.d2(u),
        }
    }

    pub fn d3(&self, u: f64) -> Result<f64> {
        if let GainFunction::UserTable(_) = self {
            return Err(Error::MissingThirdDerivative);
        }
        if u <= 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            GainFunction::SmoothTanh { scale, softness } => {
                let q2 = u * u + softness;
                let q7 = q2 * q2 * q2 * q2.sqrt();
                3.0 * scale * softness * u * (u * u - 4.0 * softness) / q7
            }
            _ => 0.0,
        })
    }

    /// Right limit `Φ'(0⁺)`; zero exactly when Φ is C¹ at the origin.
    pub fn right_slope_at_zero(&self) -> f64 {
        match self {
            GainFunction::Relu => 1.0,
            GainFunction::SmoothTanh { scale, .. } => *scale,
            GainFunction::UserTable(t) => t.d1(0.0),
        }
    }

    pub fn has_third_derivative(&self) -> bool {
        !matches!(self, GainFunction::UserTable(_))
    }
}

/// Shape-preserving piecewise cubic Hermite interpolant on `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    /// Requires `x[0] = 0`, `phi[0] = 0`, strictly increasing `x` and nondecreasing `phi`.
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidParameter(
                "user_table needs >= 2 matching samples".into(),
            ));
        }
        if x[0] != 0.0 || y[0] != 0.0 {
            return Err(Error::InvalidParameter(
                "user_table must start at (0, 0)".into(),
            ));
        }
        for i in 1..n {
            if !(x[i] > x[i - 1]) || !(y[i] >= y[i - 1]) || !y[i].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "user_table must be increasing in x and nondecreasing in phi (sample {i})"
                )));
            }
        }
        if y[n - 1] <= 0.0 {
            return Err(Error::InvalidParameter(
                "user_table gain is identically zero".into(),
            ));
        }
        let delta: Vec<f64> = (0..n - 1)
            .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
            .collect();
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            m[i] = if delta[i - 1] * delta[i] <= 0.0 {
                0.0
            } else {
                0.5 * (delta[i - 1] + delta[i])
            };
        }
        for i in 0..n - 1 {
            if delta[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
                continue;
            }
            let a = m[i] / delta[i];
            let b = m[i + 1] / delta[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                m[i] = t * a * delta[i];
                m[i + 1] = t * b * delta[i];
            }
        }
        Ok(MonotoneCubic {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn segment(&self, u: f64) -> usize {
        match self.x.partition_point(|&xi| xi <= u) {
            0 => 0,
            p => (p - 1).min(self.x.len() - 2),
        }
    }

    fn local(&self, u: f64) -> Option<(usize, f64, f64)> {
        let last = self.x.len() - 1;
        if u >= self.x[last] {
            return None;
        }
        let i = self.segment(u);
        let h = self.x[i + 1] - self.x[i];
        Some((i, (u - self.x[i]) / h, h))
    }

    pub fn value(&self, u: f64) -> f64 {
        let Some((i, t, h)) = self.local(u) else {
            let last = self.x.len() - 1;
            return self.y[last] + self.m[last] * (u - self.x[last]);
        };
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.y[i]
            + (t3 - 2.0 * t2 + t) * h * self.m[i]
            + (-2.0 * t3 + 3.0 * t2) * self.y[i + 1]
            + (t3 - t2) * h * self.m[i + 1]
    }

    pub fn d1(&self, u: f64) -> f64 {
        let Some((i, t, h)) = self.local(u) else {
            return self.m[self.x.len() - 1];
        };
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * self.y[i] + (-6.0 * t2 + 6.0 * t) * self.y[i + 1]) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self.m[i]
            + (3.0 * t2 - 2.0 * t) * self.m[i + 1]
    }

    pub fn d2(&self, u: f64) -> f64 {
        let Some((i, t, h)) = self.local(u) else {
            return 0.0;
        };
        ((12.0 * t - 6.0) * (self.y[i] - self.y[i + 1]) / h
            + (6.0 * t - 4.0) * self.m[i]
            + (6.0 * t - 2.0) * self.m[i + 1])
            / h
    }
}
