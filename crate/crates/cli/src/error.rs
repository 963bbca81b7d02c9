//! CLI error type with the exit-code contract: 0 success, 1 suite failure,
//! 2 usage / configuration / I/O problems.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Io(std::io::Error),
    /// A file did not match its on-disk format.
    Format(String),
    Config(String),
    Core(sass_core::Error),
    /// A verification suite ran and failed.
    Suite(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Suite(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "i/o: {e}"),
            CliError::Format(m) => write!(f, "{m}"),
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Suite(m) => write!(f, "suite failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<sass_core::Error> for CliError {
    fn from(e: sass_core::Error) -> Self {
        CliError::Core(e)
    }
}
