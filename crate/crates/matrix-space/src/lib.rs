//! Inner-product spaces of random matrices.
//!
//! A [`MatrixSpace`] holds matrix objects whose entries are affine in the
//! quantities of a belief store, primitive objects with declared inner
//! products, and constant matrices. The inner product is
//! `(P, Q) = E(Σ w_jk P_jk Q_jk)`, with weights chosen by [`Weighting`].
//! Matrix objects are adjusted by orthogonal projection onto a collection of
//! other objects together with a constant basis.
//!
//! ```
//! use bayeslin_core::BeliefStore;
//! use bayeslin_matrix::{adjust_matrix, ConstantBasis, MatrixObject, MatrixSpace, Weighting};
//! use nalgebra::{DMatrix, DVector};
//!
//! // Scalar case: v and s with Var(v) = 1, Var(s) = 2, Cov(v, s) = 1.
//! let store = BeliefStore::new(
//!     vec!["v".into(), "s".into()],
//!     DVector::from_vec(vec![1.0, 1.0]),
//!     DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]),
//! )
//! .unwrap();
//! let space = MatrixSpace::builder(Some(store), Weighting::FullTrace)
//!     .object(MatrixObject::from_indices("V", &[vec![0]], true))
//!     .object(MatrixObject::from_indices("S", &[vec![1]], true))
//!     .build()
//!     .unwrap();
//! let adj = adjust_matrix(&space, "V", &["S"], &ConstantBasis::symmetric(1)).unwrap();
//! assert!((adj.coefficients[0] - 0.5).abs() < 1e-12);
//! let realized = adj.realize(&[DMatrix::from_element(1, 1, 3.0)]).unwrap();
//! assert!((realized[(0, 0)] - 2.0).abs() < 1e-12);
//! ```

mod adjust;
mod collections;
mod error;
mod object;
mod repair;
mod space;

pub use adjust::{adjust_matrix, resolution, MatrixAdjustment};
pub use collections::{
    build_collections, full_collection, individual_collection, upper_pairs, Collections, ConstantBasis,
};
pub use error::{Error, Result};
pub use object::{Affine, MatrixObject, ObjectKind};
pub use repair::{nnd_repair, NndRepair};
pub use space::{MatrixSpace, MatrixSpaceBuilder, Weighting};
