use thiserror::Error;

/// Errors produced anywhere in the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {estimate:e})")]
    NonConvergence { a: f64, b: f64, estimate: f64 },

    #[error("accuracy loss evaluating {0}")]
    AccuracyLoss(String),

    #[error("diffusivity not positive at x = {x} (value {value})")]
    NonPositiveDiffusivity { x: f64, value: f64 },

    #[error("zero pivot in tridiagonal elimination at row {row}")]
    ZeroPivot { row: usize },

    #[error("solution became non-finite at time step {step}")]
    Divergence { step: usize },

    #[error("step {step} failed: {source}")]
    Step { step: usize, source: Box<Error> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
