use locext_algcert::AlgError;
use locext_numlab::NumError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input; `field` names the flag or file field at fault.
    #[error("{field}: {message}")]
    Input { field: String, message: String },
    #[error(transparent)]
    Core(#[from] locext_core::Error),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Num(#[from] NumError),
}

impl CliError {
    pub fn input(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Input { field: field.into(), message: message.to_string() }
    }
}
