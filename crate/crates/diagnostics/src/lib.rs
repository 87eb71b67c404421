//! Diagnostics for Bayes linear adjustments.
//!
//! For scalar adjustments the size, bearing and size ratio measure how far
//! an observed change in expectation is from its prior expectation. For
//! general adjustments the observed belief transform `E_d|_B* E_d|_B` plays
//! the role of the belief transform: its trace is the observed size and
//! its eigenvectors are the bearings. The subspace bearing gives a
//! Riesz-representation summary of a matrix adjustment for a chosen
//! constant matrix.

mod basis;
mod error;
mod matrix;
mod scalar;
mod transform;

pub use basis::{gram_schmidt, orthonormal_combinations};
pub use error::{Error, Result};
pub use matrix::{matrix_transforms, realized_changes, subspace_bearing, SubspaceBearing};
pub use scalar::{scalar_diagnose, scalar_transforms, ScalarDiagnostics};
pub use transform::{shading_transform, ObservedTransform, SizeRatio, TransformComparison, DEFAULT_SHADING_SCALE};
