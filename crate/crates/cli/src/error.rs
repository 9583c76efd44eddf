use serde::Serialize;
use thiserror::Error;

/// Failure of one invocation, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// The job file could not be read or does not match its schema.
    #[error("{0}")]
    Schema(String),
    /// A well-formed job that the mathematics rejects.
    #[error(transparent)]
    Domain(#[from] kreg_core::Error),
    /// I/O on the outputs, or a panic inside a task.
    #[error("{0}")]
    Internal(String),
}

#[derive(Serialize)]
pub struct ErrorReport<'a> {
    pub error: &'static str,
    pub detail: &'a str,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Domain(_) => "domain",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn schema(e: impl std::fmt::Display) -> Self {
        CliError::Schema(e.to_string())
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }
}
