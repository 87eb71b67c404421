//! Shared numerical helpers for symmetric matrices.
//!
//! All pseudo-inverses in the workspace go through [`pinv_sym`], which uses a
//! symmetric eigendecomposition with a relative cutoff, so that every module
//! treats near-singular Gram matrices the same way.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Numerical tolerances used throughout the workspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative asymmetry allowed before a matrix is rejected as non-symmetric.
    pub sym: f64,
    /// Negative eigenvalues down to `-psd * trace` are accepted as NND.
    pub psd: f64,
    /// Smallest eigenvalue must exceed `pd * trace` for positive definiteness.
    pub pd: f64,
    /// Eigenvalues below `rank * largest eigenvalue` are treated as zero.
    pub rank: f64,
    /// Allowed discrepancy when observing a quantity of known value.
    pub obs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sym: 1e-9,
            psd: 1e-8,
            pd: 1e-12,
            rank: 1e-10,
            obs: 1e-6,
        }
    }
}

/// Returns `(A + Aᵀ)/2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Largest absolute entry of a matrix (zero for an empty matrix).
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Checks that `a` is square and symmetric within the relative tolerance
/// `tol`, then returns its symmetrized copy.
pub fn checked_symmetric(name: &str, a: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "`{name}` must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(name.to_string()));
    }
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    let asym = max_abs(&(a - a.transpose())) / scale;
    if asym > tol {
        return Err(Error::NotSymmetric {
            name: name.to_string(),
            asymmetry: asym,
        });
    }
    Ok(symmetrize(a))
}

/// Symmetric eigendecomposition with eigenvalues sorted in descending order.
/// Eigenvectors are the columns of the returned matrix.
pub fn sorted_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vectors.set_column(c, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix (`+∞` for an empty matrix).
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return f64::INFINITY;
    }
    let eig = SymmetricEigen::new(symmetrize(a));
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Trace-scaled NND threshold: `tol * max(|trace|, largest |entry|)`.
pub fn nnd_threshold(a: &DMatrix<f64>, tol: f64) -> f64 {
    let tr = a.trace().abs();
    tol * tr.max(max_abs(a)).max(f64::MIN_POSITIVE)
}

/// Verifies that a symmetric matrix is NND within `tol * trace`.
pub fn check_nnd(name: &str, a: &DMatrix<f64>, tol: f64) -> Result<()> {
    let min = min_eigenvalue(a);
    let threshold = nnd_threshold(a, tol);
    if min < -threshold {
        return Err(Error::NotNnd {
            name: name.to_string(),
            eigenvalue: min,
            tolerance: threshold,
        });
    }
    Ok(())
}

/// Moore–Penrose pseudo-inverse of a symmetric matrix together with an
/// orthonormal basis (columns) of its numerical null space.
#[derive(Debug, Clone)]
pub struct SymPinv {
    /// The pseudo-inverse.
    pub inverse: DMatrix<f64>,
    /// Orthonormal basis of the directions dropped by the cutoff.
    pub null_space: DMatrix<f64>,
    /// Numerical rank.
    pub rank: usize,
}

/// Pseudo-inverse of a symmetric matrix by eigendecomposition. Eigenvalues
/// whose magnitude is at most `tol_rank * λmax` are discarded.
pub fn pinv_sym_full(a: &DMatrix<f64>, tol_rank: f64) -> SymPinv {
    let n = a.nrows();
    if n == 0 {
        return SymPinv {
            inverse: DMatrix::zeros(0, 0),
            null_space: DMatrix::zeros(0, 0),
            rank: 0,
        };
    }
    let (values, vectors) = sorted_eigen(a);
    let lmax = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cutoff = tol_rank * lmax;
    let mut inverse = DMatrix::zeros(n, n);
    let mut null_cols = Vec::new();
    let mut rank = 0;
    for i in 0..n {
        let v = vectors.column(i);
        if lmax > 0.0 && values[i].abs() > cutoff {
            inverse += (v * v.transpose()) / values[i];
            rank += 1;
        } else {
            null_cols.push(v.into_owned());
        }
    }
    let null_space = if null_cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&null_cols)
    };
    SymPinv {
        inverse: symmetrize(&inverse),
        null_space,
        rank,
    }
}

/// Moore–Penrose pseudo-inverse of a symmetric matrix.
pub fn pinv_sym(a: &DMatrix<f64>, tol_rank: f64) -> DMatrix<f64> {
    pinv_sym_full(a, tol_rank).inverse
}

/// Numerical rank of an arbitrary matrix from its singular values, using the
/// relative cutoff `tol_rank * σmax`.
pub fn rank(a: &DMatrix<f64>, tol_rank: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_rank * smax).count()
}

/// Symmetric square root and inverse square root of an NND matrix. The inverse
/// square root uses the same cutoff as [`pinv_sym`].
pub fn sqrt_and_inv_sqrt(a: &DMatrix<f64>, tol_rank: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let (values, vectors) = sorted_eigen(a);
    let lmax = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut root = DMatrix::zeros(n, n);
    let mut inv_root = DMatrix::zeros(n, n);
    for i in 0..n {
        let v = vectors.column(i);
        let outer = v * v.transpose();
        let lam = values[i].max(0.0);
        root += &outer * lam.sqrt();
        if lmax > 0.0 && values[i] > tol_rank * lmax {
            inv_root += &outer / lam.sqrt();
        }
    }
    (symmetrize(&root), symmetrize(&inv_root))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_of_singular_matrix_satisfies_penrose_identities() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 2.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let p = pinv_sym_full(&a, 1e-10);
        assert_eq!(p.rank, 2);
        assert_eq!(p.null_space.ncols(), 1);
        let apa = &a * &p.inverse * &a;
        assert!(max_abs(&(apa - &a)) < 1e-12);
        let pap = &p.inverse * &a * &p.inverse;
        assert!(max_abs(&(pap - &p.inverse)) < 1e-12);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(
            checked_symmetric("a", &a, 1e-9),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn nnd_check_reports_offending_eigenvalue() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        match check_nnd("a", &a, 1e-8) {
            Err(Error::NotNnd { eigenvalue, .. }) => assert!((eigenvalue + 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn square_roots_multiply_back() {
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let (r, ir) = sqrt_and_inv_sqrt(&a, 1e-10);
        assert!(max_abs(&(&r * &r - &a)) < 1e-12);
        assert!(max_abs(&(&ir * &a * &ir - DMatrix::identity(2, 2))) < 1e-12);
    }
}
