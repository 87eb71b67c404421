use bayeslin_core::linalg::{checked_symmetric, sorted_eigen};
use bayeslin_core::Tolerances;
use nalgebra::DMatrix;

use crate::error::Result;

/// A symmetric matrix with negative eigenvalues truncated to zero.
#[derive(Debug, Clone)]
pub struct NndRepair {
    /// The repaired NND matrix.
    pub matrix: DMatrix<f64>,
    /// Negative eigenvalues that were set to zero, most negative first.
    pub truncated: Vec<f64>,
}

impl NndRepair {
    /// Whether any eigenvalue was truncated. A repair signals that the
    /// adjusted specification was incoherent and deserves scrutiny.
    pub fn was_repaired(&self) -> bool {
        !self.truncated.is_empty()
    }
}

/// Nearest NND matrix in Frobenius norm: diagonalize, set negative
/// eigenvalues to zero, and recompose.
pub fn nnd_repair(x: &DMatrix<f64>) -> Result<NndRepair> {
    let x = checked_symmetric("X", x, Tolerances::default().sym)?;
    let (values, vectors) = sorted_eigen(&x);
    let mut truncated: Vec<f64> = values.iter().copied().filter(|v| *v < 0.0).collect();
    if truncated.is_empty() {
        return Ok(NndRepair { matrix: x, truncated });
    }
    truncated.sort_by(|a, b| a.total_cmp(b));
    let clamped = values.map(|v| v.max(0.0));
    let m = &vectors * DMatrix::from_diagonal(&clamped) * vectors.transpose();
    Ok(NndRepair {
        matrix: bayeslin_core::linalg::symmetrize(&m),
        truncated,
    })
}
