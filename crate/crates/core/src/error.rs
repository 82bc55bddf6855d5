use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A type-level contract (hermiticity, unitarity, normalization) does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Malformed or out-of-range user input.
    #[error("invalid input: {0}")]
    Input(String),

    /// Consecutive eigenframes do not overlap; a level crossing lies between samples.
    #[error("frame discontinuity at sample {index}: overlap {overlap:.3e} <= 0.5")]
    Discontinuity { index: usize, overlap: f64 },

    /// A closed-form expression was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mixing angles requested exactly at a crossing point.
    #[error("mixing angles undefined at the crossing point")]
    CrossingPoint,

    /// The path carries no drive, so any time dependence is adiabatic.
    #[error("path drive vanishes identically; any schedule is adiabatic")]
    TriviallyAdiabatic,

    /// The near-crossing behaviour is not a clean power law.
    #[error("indeterminate feasibility: fit residual {residual:.3} over window [{window_lo:.3e}, {window_hi:.3e}]")]
    Indeterminate {
        residual: f64,
        exponent: f64,
        window_lo: f64,
        window_hi: f64,
    },

    /// Richardson extrapolation of eigenframes toward a crossing did not settle.
    #[error("no directional limit: extrapolation residual {residual:.3e}")]
    NoDirectionalLimit { residual: f64 },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
