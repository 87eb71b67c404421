use nalgebra::DMatrix;

use crate::adjust::adjust;
use crate::error::{Error, Result};
use crate::linalg::checked_symmetric;
use crate::store::{BeliefStore, Subspace};
use crate::transform::transform_matrix;

/// Covariance `ΛΛᵀ` from a lower-triangular Cholesky factor.
pub fn cov_from_cholesky(lambda: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if lambda.nrows() != lambda.ncols() {
        return Err(Error::Dimension(format!(
            "Cholesky factor must be square, got {}x{}",
            lambda.nrows(),
            lambda.ncols()
        )));
    }
    for i in 0..lambda.nrows() {
        for j in (i + 1)..lambda.ncols() {
            if lambda[(i, j)] != 0.0 {
                return Err(Error::Dimension(format!(
                    "Cholesky factor has nonzero entry above the diagonal at ({i}, {j})"
                )));
            }
        }
    }
    if lambda.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("cholesky factor".into()));
    }
    Ok(lambda * lambda.transpose())
}

/// Marks the entries of `M⁻¹` that vanish after standardization by
/// `√((M⁻¹)ᵢᵢ (M⁻¹)ⱼⱼ)`. Diagonal entries are never marked.
pub fn precision_zero_pattern(m: &DMatrix<f64>, tol: f64) -> Result<Vec<Vec<bool>>> {
    let n = m.nrows();
    let m = checked_symmetric("M", m, 1e-9)?;
    // `transform_matrix(M, I)` is `M⁻¹` and reports the null direction when M is singular.
    let p = transform_matrix(&m, &DMatrix::identity(n, n))?;
    let mut pattern = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let s = (p[(i, i)] * p[(j, j)]).sqrt();
                pattern[i][j] = (p[(i, j)] / s).abs() < tol;
            }
        }
    }
    Ok(pattern)
}

/// Tests whether `E_{C+D}(B) = E_D(B)`.
///
/// Both adjustments are expressed as linear maps of the store quantities and
/// their difference is measured in the prior variance norm, relative to the
/// prior variance of `B`: `√(tr Var(Δ) / tr Var(B)) ≤ tol`.
pub fn gci_check(store: &BeliefStore, b: &Subspace, c: &Subspace, d: &Subspace, tol: f64) -> Result<bool> {
    let cd = store.join(c, d)?;
    let joint = adjust(store, b, &cd)?;
    let single = adjust(store, b, d)?;
    let delta = &joint.coeff * &cd.combinations - &single.coeff * &d.combinations;
    let var_delta = &delta * store.covariance() * delta.transpose();
    let var_b = store.var_of(b).trace();
    if var_b <= 0.0 {
        return Ok(true);
    }
    Ok((var_delta.trace().max(0.0) / var_b).sqrt() <= tol)
}
