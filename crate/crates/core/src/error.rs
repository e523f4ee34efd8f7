use thiserror::Error;

/// Errors produced by the spectral, transport and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("requested {requested} eigenvalues but the grid only has {available} nodes")]
    TooManyEigenvalues { requested: usize, available: usize },

    #[error("bisection for eigenvalue index {index} did not converge")]
    BisectionFailed { index: usize },

    #[error("potential is not finite at x = {x}")]
    NonFinitePotential { x: f64 },

    #[error("sublevel set {{W < {lambda}}} reaches the grid boundary; widen the grid")]
    SublevelTouchesBoundary { lambda: f64 },

    #[error("all density weights underflow on [{a}, {b}]")]
    WeightUnderflow { a: f64, b: f64 },

    #[error("quadrature on [{a}, {b}] did not converge (error estimate {error:e})")]
    QuadratureFailed { a: f64, b: f64, error: f64 },

    #[error("quantile level must lie in (0, 1), got {0}")]
    LevelOutOfRange(f64),

    #[error("potential is not confining: {0}")]
    NotConfining(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
