use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is not positive semidefinite")]
    NotPsd,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("range violation: {0}")]
    RangeViolation(String),
    #[error("index out of bounds: {0}")]
    BoundsViolation(String),
    #[error("invalid family parameter k = {0} (need k >= 2)")]
    InvalidK(usize),
    #[error("state is not PPT")]
    NotPpt,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("assembled extension failed the exact PPT check")]
    PptFailure,
    #[error("decomposition mismatch: {0}")]
    DecompositionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}
