use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading inputs, running a command or writing outputs.
#[derive(Debug, Error)]
pub enum Error {
    /// A file could not be read or written.
    #[error("{path}: {source}")]
    Io {
        /// The file involved.
        path: PathBuf,
        /// The underlying error.
        source: std::io::Error,
    },

    /// A JSON document is malformed or does not follow the schema.
    #[error("{origin}: line {line}, column {column}: {message}")]
    Parse {
        /// Where the document came from.
        origin: String,
        /// 1-based line of the error.
        line: usize,
        /// 1-based column of the error.
        column: usize,
        /// What went wrong.
        message: String,
    },

    /// A CSV file is malformed or violates the series rules.
    #[error("{origin}: {message}")]
    Csv {
        /// Where the file came from.
        origin: String,
        /// What went wrong, including the line when known.
        message: String,
    },

    /// The inputs are well formed but inconsistent.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The command line is inconsistent.
    #[error("usage: {0}")]
    Usage(String),

    /// Belief store, elicitation or exchangeable model error.
    #[error(transparent)]
    Core(#[from] bayeslin_core::Error),

    /// Matrix-space error.
    #[error(transparent)]
    Matrix(#[from] bayeslin_matrix::Error),

    /// Diagnostics error.
    #[error(transparent)]
    Diagnostics(#[from] bayeslin_diagnostics::Error),

    /// Dynamic linear model error.
    #[error(transparent)]
    Dlm(#[from] bayeslin_dlm::Error),

    /// Symbolic moment error.
    #[error(transparent)]
    Moments(#[from] bayeslin_moments::Error),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(origin: &str, e: serde_json::Error) -> Self {
        Error::Parse {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        }
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}
