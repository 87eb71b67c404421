use thiserror::Error;

/// Errors raised while deriving or evaluating moment expressions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A monomial carries more residual structure than the rules cover.
    #[error("monomial `{0}` exceeds the supported fourth-order structure")]
    DegreeTooHigh(String),

    /// The specification has no value for an expectation the expression needs.
    #[error("no specification for {0}")]
    Uncovered(String),

    /// An argument is malformed.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
