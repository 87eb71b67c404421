//! Scalar Bayes linear machinery.
//!
//! A [`BeliefStore`] holds a collection of labelled quantities together with
//! their expectations and an NND covariance matrix. Spans of linear
//! combinations of those quantities are described by [`Subspace`], and
//! [`adjust`] projects one subspace onto another to give adjusted
//! expectations and adjusted covariances.
//!
//! The crate also provides belief transforms between covariance matrices,
//! Cholesky-based elicitation of covariance matrices, and checks for
//! generalized conditional independence.
//!
//! ```
//! use bayeslin_core::{adjust, BeliefStore};
//! use nalgebra::{DMatrix, DVector};
//!
//! let store = BeliefStore::new(
//!     vec!["x".into(), "y".into()],
//!     DVector::from_vec(vec![0.0, 0.0]),
//!     DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 4.0]),
//! )
//! .unwrap();
//! let b = store.select(&["x"]).unwrap();
//! let d = store.select(&["y"]).unwrap();
//! let adj = adjust(&store, &b, &d).unwrap();
//! let realized = adj.realize(&DVector::from_vec(vec![2.0])).unwrap();
//! assert!((realized[0] - 1.0).abs() < 1e-12);
//! assert!((adj.adjusted_cov[(0, 0)] - 3.0).abs() < 1e-12);
//! ```

mod adjust;
mod elicit;
mod error;
pub mod linalg;
mod store;
mod transform;

pub use adjust::{adjust, ScalarAdjustment};
pub use elicit::{cov_from_cholesky, gci_check, precision_zero_pattern};
pub use error::{Error, Result};
pub use linalg::Tolerances;
pub use store::{BeliefStore, Subspace};
pub use transform::{belief_transform_eigen, transform_matrix, EigenReport, RatioFlag};
