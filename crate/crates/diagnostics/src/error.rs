use thiserror::Error;

/// Errors raised by the diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar belief-store operation failed.
    #[error(transparent)]
    Core(#[from] bayeslin_core::Error),

    /// A matrix-space operation failed.
    #[error(transparent)]
    Matrix(#[from] bayeslin_matrix::Error),

    /// The target span has no variance, so no orthonormal basis exists.
    #[error("degenerate span: {0}")]
    Degenerate(String),

    /// Inputs have incompatible sizes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An argument is outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
