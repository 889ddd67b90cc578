use std::path::PathBuf;

use thiserror::Error;

/// Exit status for usage and configuration problems.
pub const EXIT_USAGE: u8 = 2;
/// Exit status for numerical failures and failed verdicts.
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(#[source] chernoff_core::Error),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing column '{field}'")]
    MissingColumn { path: PathBuf, field: String },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Numerical(chernoff_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_)
            | CliError::Config(_)
            | CliError::Read { .. }
            | CliError::MissingColumn { .. }
            | CliError::Format { .. } => EXIT_USAGE,
            CliError::Write { .. } | CliError::Numerical(_) => EXIT_FAILURE,
        }
    }
}
