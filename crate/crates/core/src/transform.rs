use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{checked_symmetric, sorted_eigen, sqrt_and_inv_sqrt, Tolerances};

/// Direction of variance change along one eigenvector of a belief transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioFlag {
    /// Variance ratio above one: the second matrix has more variance.
    Increase,
    /// Variance ratio equal to one within tolerance.
    Unchanged,
    /// Variance ratio below one: the second matrix has less variance.
    Decrease,
}

/// Eigenstructure of the belief transform `S·R⁻¹` from `R` to `S`.
#[derive(Debug, Clone)]
pub struct EigenReport {
    /// Eigenvalues in descending order. Each is the ratio `vᵀSv / vᵀRv`.
    pub eigenvalues: DVector<f64>,
    /// Columns `v` solving `S v = λ R v`, scaled so that `vᵀSv = 1` and with the
    /// largest-magnitude entry positive. When `vᵀSv = 0` the scale is `vᵀRv = 1`.
    pub eigenvectors: DMatrix<f64>,
    /// Whether each eigen-direction gains or loses variance.
    pub flags: Vec<RatioFlag>,
}

/// The transform matrix `S·R⁻¹`. Fails when `R` is singular.
pub fn transform_matrix(r: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let tol = Tolerances::default();
    let r = checked_symmetric("R", r, tol.sym)?;
    let s = checked_symmetric("S", s, tol.sym)?;
    check_pd(&r, tol)?;
    let inv = r.clone().cholesky().ok_or_else(|| singular(&r))?.inverse();
    Ok(s * inv)
}

/// Eigenvalues and eigenvectors of the belief transform from `R` to `S`.
///
/// The eigenvalues of `S·R⁻¹` are real because the matrix is similar to the
/// symmetric `R^{-1/2} S R^{-1/2}`.
pub fn belief_transform_eigen(r: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<EigenReport> {
    let tol = Tolerances::default();
    let r = checked_symmetric("R", r, tol.sym)?;
    let s = checked_symmetric("S", s, tol.sym)?;
    if r.nrows() != s.nrows() {
        return Err(Error::Dimension(format!(
            "R is {}x{} but S is {}x{}",
            r.nrows(),
            r.ncols(),
            s.nrows(),
            s.ncols()
        )));
    }
    check_pd(&r, tol)?;
    let (_, inv_root) = sqrt_and_inv_sqrt(&r, 0.0);
    let c = &inv_root * &s * &inv_root;
    let (values, u) = sorted_eigen(&c);
    let n = r.nrows();
    let mut vectors = DMatrix::zeros(n, n);
    let mut flags = Vec::with_capacity(n);
    for i in 0..n {
        let mut v: DVector<f64> = &inv_root * u.column(i);
        let s_norm = (v.transpose() * &s * &v)[(0, 0)];
        let scale = if s_norm > tol.rank * s.trace().abs().max(f64::MIN_POSITIVE) {
            s_norm.sqrt()
        } else {
            (v.transpose() * &r * &v)[(0, 0)].sqrt()
        };
        v /= scale;
        let lead = v
            .iter()
            .cloned()
            .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            v = -v;
        }
        vectors.set_column(i, &v);
        let lam = values[i];
        flags.push(if lam > 1.0 + 1e-9 {
            RatioFlag::Increase
        } else if lam < 1.0 - 1e-9 {
            RatioFlag::Decrease
        } else {
            RatioFlag::Unchanged
        });
    }
    Ok(EigenReport {
        eigenvalues: values,
        eigenvectors: vectors,
        flags,
    })
}

fn check_pd(r: &DMatrix<f64>, tol: Tolerances) -> Result<()> {
    let (values, _) = sorted_eigen(r);
    let n = r.nrows();
    if n == 0 {
        return Ok(());
    }
    let threshold = tol.pd * r.trace().abs().max(f64::MIN_POSITIVE);
    if values[n - 1] <= threshold {
        return Err(singular(r));
    }
    Ok(())
}

fn singular(r: &DMatrix<f64>) -> Error {
    let (values, vectors) = sorted_eigen(r);
    let n = r.nrows();
    Error::Singular {
        name: "R".into(),
        eigenvalue: values[n - 1],
        direction: vectors.column(n - 1).iter().cloned().collect(),
    }
}
