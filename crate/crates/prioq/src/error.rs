use std::fmt;

use prioq_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_TOLERANCE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_TRUNCATION: u8 = 3;
pub const EXIT_ENGINE: u8 = 4;

/// An error carrying the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn engine(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_ENGINE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidParameter { .. }
            | Error::Unstable { .. }
            | Error::Domain { .. }
            | Error::Config(_) => EXIT_INPUT,
            Error::TruncationBudget { .. } => EXIT_TRUNCATION,
            Error::Solver(_) => EXIT_ENGINE,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}
