use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("rank decision for {what} is ambiguous: singular value {value:.3e} within a decade of {tol:.1e}")]
    RankAmbiguity { what: String, value: f64, tol: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Core(#[from] locext_core::Error),
}
