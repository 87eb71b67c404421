use bayeslin_core::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Column-stacked vector of `a`. Entry `(i, j)` lands at position `rows·j + i`.
pub fn vec(a: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec`]: reshapes a column-stacked vector into `rows` rows.
pub fn unvec(v: &DVector<f64>, rows: usize) -> Result<DMatrix<f64>> {
    if rows == 0 || !v.len().is_multiple_of(rows) {
        return Err(Error::Dimension(format!(
            "vector of length {} cannot be reshaped to {rows} rows",
            v.len()
        )));
    }
    Ok(DMatrix::from_column_slice(rows, v.len() / rows, v.as_slice()))
}

fn check_square_pair(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<usize> {
    let r = a.nrows();
    if a.ncols() != r || b.nrows() != r || b.ncols() != r {
        return Err(Error::Dimension(format!(
            "expected two square matrices of equal size, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(r)
}

/// The left direct product: `a_jk·b_lm` sits in row `r·l + j`, column `r·m + k`
/// (zero-based).
pub fn direct_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let r = check_square_pair(a, b)?;
    let mut out = DMatrix::zeros(r * r, r * r);
    for j in 0..r {
        for k in 0..r {
            for l in 0..r {
                for m in 0..r {
                    out[(r * l + j, r * m + k)] = a[(j, k)] * b[(l, m)];
                }
            }
        }
    }
    Ok(out)
}

/// The star product: `a_jk·b_lm` sits in row `r·k + m`, column `r·l + j`
/// (zero-based).
pub fn star_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let r = check_square_pair(a, b)?;
    let mut out = DMatrix::zeros(r * r, r * r);
    for j in 0..r {
        for k in 0..r {
            for l in 0..r {
                for m in 0..r {
                    out[(r * k + m, r * l + j)] = a[(j, k)] * b[(l, m)];
                }
            }
        }
    }
    Ok(out)
}

/// The vec-permutation matrix `I_{m,n}` with `I_{m,n}·vec(A) = vec(Aᵀ)` for an
/// `m×n` matrix `A`.
pub fn vec_permutation(m: usize, n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            // A_ij is at m·j + i in vec(A) and at n·i + j in vec(Aᵀ).
            p[(n * i + j, m * j + i)] = 1.0;
        }
    }
    p
}
