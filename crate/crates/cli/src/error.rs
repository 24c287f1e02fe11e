//! CLI error channel: configuration problems exit with 2, numerical
//! failures during a run exit with 3, and both print a one-line
//! machine-parseable reason on stderr.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// Wrap a solver error raised while building the run (parameters,
    /// operating point, grids): the configuration is at fault.
    pub fn config_from(err: omcav_core::Error) -> Self {
        CliError::Config(err.to_string())
    }

    /// Wrap a solver error raised while producing data.
    pub fn numeric_from(err: omcav_core::Error) -> Self {
        CliError::Numeric(err.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
