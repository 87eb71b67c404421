use thiserror::Error;

/// Errors raised by the dynamic linear model machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Failure in the scalar machinery.
    #[error(transparent)]
    Core(#[from] bayeslin_core::Error),

    /// Failure in the matrix-space machinery.
    #[error(transparent)]
    Matrix(#[from] bayeslin_matrix::Error),

    /// Failure in the symbolic moment engine.
    #[error(transparent)]
    Moments(#[from] bayeslin_moments::Error),

    /// No `H` satisfies `HFᵀ = FᵀG`.
    #[error("model is not two-step invertible: ‖HFᵀ − FᵀG‖ = {residual:.3e} for the best H")]
    NotTwoStepInvertible { residual: f64 },

    /// An operation needs an invertible `H`.
    #[error("H is singular (smallest singular value {smallest:.3e})")]
    SingularH { smallest: f64 },

    /// Operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The data series is shorter than the operation needs.
    #[error("series of length {len} is too short; at least {min} observations are needed")]
    TooShort { len: usize, min: usize },

    /// An argument is outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
