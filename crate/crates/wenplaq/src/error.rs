use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("machine error: {0}")]
    Machine(String),
    #[error("eigensolver did not converge: {0}")]
    Convergence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("incomplete measurement record: {missing} words absent (first: {first})")]
    Incomplete { missing: usize, first: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("verification failed: distance {0:.3e} exceeds threshold {1:.3e}")]
    Verification(f64, f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("linear algebra backend error: {0}")]
    Linalg(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
