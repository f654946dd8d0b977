//! CLI failure taxonomy: what the user got wrong (exit 1) vs what went
//! wrong underneath (exit 2). Every failure prints as a single line on
//! standard error.

use deft_core::Error as CoreError;

/// A command failure with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or bad input files; exit status 1.
    #[error("{0}")]
    Validation(String),
    /// Broken invariants, non-finite numerics, failed writes; exit status 2.
    #[error("{0}")]
    Internal(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CliError::Internal(msg.into())
    }

    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

/// Core errors split by blame: a non-finite loss or gradient means the run
/// itself went numerically wrong, everything else traces back to the inputs.
impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        fn is_internal(err: &CoreError) -> bool {
            match err {
                CoreError::NonFiniteLoss { .. }
                | CoreError::NonFiniteGradient { .. }
                | CoreError::RowNotNormalized { .. } => true,
                CoreError::Sample { source, .. } => is_internal(source),
                _ => false,
            }
        }
        if is_internal(&err) {
            CliError::Internal(err.to_string())
        } else {
            CliError::Validation(err.to_string())
        }
    }
}
