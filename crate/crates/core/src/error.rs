use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the analysis modules.
///
/// Every variant carries the name of the module that raised it so that
/// front-ends can surface tagged messages.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input violated an operation's precondition.
    #[error("{module}: {reason}")]
    InvalidInput { module: &'static str, reason: String },

    /// An input file could not be parsed.
    #[error("{module}: line {line}: {reason}")]
    Format {
        module: &'static str,
        line: usize,
        reason: String,
    },

    #[error("surface: non-uniform abscissa spacing (max relative deviation {max_deviation:.3e})")]
    NonUniformSpacing { max_deviation: f64 },

    #[error("surface: ragged grid, row {row} has {found} columns, expected {expected}")]
    RaggedGrid {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{module}: I/O error on {path}: {source}")]
    Io {
        module: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An internal consistency check failed. Never expected in practice.
    #[error("{module}: internal invariant violated: {reason}")]
    Invariant { module: &'static str, reason: String },
}

impl Error {
    pub(crate) fn invalid(module: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            module,
            reason: reason.into(),
        }
    }

    pub(crate) fn format(module: &'static str, line: usize, reason: impl Into<String>) -> Self {
        Error::Format {
            module,
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(module: &'static str, path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            module,
            path: path.into(),
            source,
        }
    }

    /// True for I/O failures (as opposed to validation failures).
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }

    /// True for internal invariant violations.
    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant { .. })
    }
}
