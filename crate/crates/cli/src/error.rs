use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Exit code for malformed input or configuration.
pub const EXIT_INPUT: i32 = 2;
/// Exit code when the exact solver refuses a tournament as too large.
pub const EXIT_LIMIT: i32 = 3;
/// Exit code for output failures and numerical breakdowns.
pub const EXIT_RUNTIME: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] tourney_core::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        use tourney_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Input { .. } => EXIT_INPUT,
            CliError::Core(E::SolveLimit { .. }) => EXIT_LIMIT,
            CliError::Core(E::Numerical(_) | E::NonFinite { .. }) => EXIT_RUNTIME,
            CliError::Core(_) => EXIT_INPUT,
            CliError::Output { .. } => EXIT_RUNTIME,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
