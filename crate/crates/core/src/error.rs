use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |h - h^dagger| = {max_dev:e})")]
    NotHermitian { max_dev: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {index} out of range for {len} sites")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("impurity coincides with chain spin {site}")]
    DegenerateGeometry { site: usize },
    #[error("Bloch vector not normalized (|z|^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numeric invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
