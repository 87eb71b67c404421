use thiserror::Error;

/// Errors raised by the scalar adjustment machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Two operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix that should be symmetric is not, even after allowing for the
    /// relative tolerance.
    #[error("matrix `{name}` is not symmetric (max relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { name: String, asymmetry: f64 },

    /// A matrix that should be non-negative definite has a negative eigenvalue
    /// beyond tolerance.
    #[error("matrix `{name}` is not non-negative definite: eigenvalue {eigenvalue:.6e} (tolerance {tolerance:.3e})")]
    NotNnd {
        name: String,
        eigenvalue: f64,
        tolerance: f64,
    },

    /// A matrix that must be strictly positive definite is singular. The
    /// eigenvector spanning the offending direction is reported.
    #[error("matrix `{name}` is singular: eigenvalue {eigenvalue:.6e} along direction {direction:?}")]
    Singular {
        name: String,
        eigenvalue: f64,
        direction: Vec<f64>,
    },

    /// Labels in a belief store must be unique.
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    /// A label was requested that the store does not contain.
    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    /// Subspaces built over different stores were combined.
    #[error("subspaces refer to different belief stores")]
    StoreMismatch,

    /// The spanning rows of a subspace are linearly dependent.
    #[error("subspace rows are linearly dependent (rank {rank} < {rows} non-degenerate rows)")]
    RankDeficient { rank: usize, rows: usize },

    /// Observed data contradict a linear combination whose value is known
    /// with certainty.
    #[error("observation inconsistent with a zero-variance direction: discrepancy {discrepancy:.6e} (tolerance {tolerance:.1e})")]
    InconsistentObservation { discrepancy: f64, tolerance: f64 },

    /// An argument is outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numeric input was not finite.
    #[error("non-finite value in `{0}`")]
    NonFinite(String),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
