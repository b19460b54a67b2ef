use std::fmt;
use std::path::Path;

/// Failure classes, each with its own process exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Validation(String),
    Invariant(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("cli: I/O error on {}: {err}", path.display()))
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(format!("cli: {}", msg.into()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Validation(m) | CliError::Invariant(m) => f.write_str(m),
        }
    }
}

impl From<topophase::Error> for CliError {
    fn from(err: topophase::Error) -> Self {
        if err.is_io() {
            CliError::Io(err.to_string())
        } else if err.is_invariant() {
            CliError::Invariant(err.to_string())
        } else {
            CliError::Validation(err.to_string())
        }
    }
}
