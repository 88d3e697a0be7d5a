//! Error type shared by every module.

use thiserror::Error;

/// Failure categories. Each maps to a distinct process exit code in the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: wrong lengths, unparsable numbers, unknown tags.
    #[error("schema error: {0}")]
    Schema(String),
    /// Well-formed input that violates a precondition of the operation.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An iterative numerical method did not reach its tolerance.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    /// A self-check found a mismatch.
    #[error("verification failure: {0}")]
    Verification(String),
}

impl Error {
    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn non_convergence(msg: impl Into<String>) -> Self {
        Error::NonConvergence(msg.into())
    }

    pub fn verification(msg: impl Into<String>) -> Self {
        Error::Verification(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) => 2,
            Error::Precondition(_) => 3,
            Error::NonConvergence(_) => 4,
            Error::Verification(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
