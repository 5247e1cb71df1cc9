use thiserror::Error;

/// Errors raised by the numerical kernels and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent p = {0}")]
    InvalidExponent(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e}, tolerance {tolerance:e})")]
    NotPsd { min_eigenvalue: f64, tolerance: f64 },

    #[error("operator of norm {norm} is not a contraction (tolerance {tolerance:e})")]
    NotContraction { norm: f64, tolerance: f64 },

    #[error("ratio undefined: {0}")]
    UndefinedRatio(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("function is decreasing between x = {x0} and x = {x1}")]
    NotMonotone { x0: f64, x1: f64 },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("blocks overlap at pair ({0}, {1})")]
    OverlappingBlocks(usize, usize),

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("unknown construction `{0}`")]
    UnknownConstruction(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input document: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
