use thiserror::Error;

/// Errors surfaced by the library and mapped to CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("kappa = {kappa} is not above kappa_c = {kappa_c}")]
    Domain { kappa: f64, kappa_c: f64 },

    #[error("no sign change of the fixed-point map in [{lo}, {hi}] at kappa = {kappa}")]
    Bracket { lo: f64, hi: f64, kappa: f64 },

    #[error("mode {k:?} aliases on a grid with {n} points per axis")]
    Aliasing { k: Vec<usize>, n: usize },

    #[error("potential is not coordinate-wise even (max defect {defect:e})")]
    NotEven { defect: f64 },

    #[error("gain function has no third derivative (user_table)")]
    MissingThirdDerivative,

    #[error("no crossing of the threshold function for any mode up to k_max")]
    NoCrossing,

    #[error("finite-difference steps disagree: {coarse} vs {fine}")]
    StepCollapse { coarse: f64, fine: f64 },

    #[error("time step {dt} exceeds the positivity bound {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("density {value:e} below -1e-12 at x-index {x}, s-index {s}, t = {t} ms")]
    Negativity {
        value: f64,
        x: usize,
        s: usize,
        t: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit code: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::Config(_)
            | Error::Io { .. }
            | Error::Aliasing { .. }
            | Error::NotEven { .. }
            | Error::MissingThirdDerivative => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
