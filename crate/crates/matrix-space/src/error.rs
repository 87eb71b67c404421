use thiserror::Error;

/// Errors raised while building or projecting within a matrix space.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Propagated from the scalar machinery.
    #[error(transparent)]
    Core(#[from] bayeslin_core::Error),

    /// Two primitive objects, or a primitive and a derived object, have no
    /// declared inner product.
    #[error("no covariance declared between `{0}` and `{1}`")]
    MissingGram(String, String),

    /// An object name is not present in the space.
    #[error("unknown matrix object `{0}`")]
    UnknownObject(String),

    /// Two objects share a name.
    #[error("duplicate matrix object `{0}`")]
    DuplicateObject(String),

    /// An object refers to a quantity outside the base store, or a derived
    /// object was added to a space without a store.
    #[error("object `{0}` references quantities outside the base store")]
    ForeignQuantity(String),

    /// An object flagged symmetric has entries `(i,j)` and `(j,i)` that differ.
    #[error("object `{name}` is flagged symmetric but entries ({i},{j}) and ({j},{i}) differ")]
    NotSymmetric { name: String, i: usize, j: usize },

    /// Objects of different dimensions were combined.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The target of a resolution has no variance to resolve.
    #[error("target `{0}` has zero constant-adjusted norm")]
    ZeroNorm(String),

    /// An observation needed to realize an object is missing.
    #[error("no observed value for quantity `{0}`")]
    MissingObservation(String),

    /// The operation needs element access that this kind of object lacks.
    #[error("object `{0}` is primitive; its elements are not available")]
    Primitive(String),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
