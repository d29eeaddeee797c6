use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("configuration has coincident points {0} and {1}")]
    CoincidentPoints(usize, usize),
    #[error("near-coincident configuration: condition number {condition:.3e} of the value covariance exceeds 1e12")]
    NearCoincident { condition: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e}")]
    NotPositiveSemidefinite { eigenvalue: f64 },
    #[error("moment pattern of size {size} exceeds the exact limit of 12; use the Monte Carlo estimator")]
    PatternTooLarge { size: usize },
    #[error("n*k = {nk} exceeds the exact path limit of 4; use mc_det_product_moment")]
    ExactPathExceeded { nk: usize },
    #[error("size {size} exceeds the enumeration limit {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("degenerate sample: all polynomial coefficients vanish")]
    DegenerateSample,
    #[error("internal consistency violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
