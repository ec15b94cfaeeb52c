use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgError {
    #[error(transparent)]
    Core(#[from] locext_core::Error),
    #[error("witness vector is not in the range of the state")]
    WitnessNotInRange,
    #[error("overlap with the witness is not a single variable: {0}")]
    NonSingleVariableOverlap(String),
    #[error("range basis vectors {0} and {1} are not orthogonal")]
    NonOrthogonalBasis(String, String),
    #[error("decomposition mismatch: {0}")]
    DecompositionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("certificate rejected: {0}")]
    Rejected(String),
}
