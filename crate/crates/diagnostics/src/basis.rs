use bayeslin_core::linalg::sorted_eigen;
use nalgebra::DMatrix;

/// Columns `q_a/√λ_a` of the eigen-decomposition `K = Σ λ_a q_a q_aᵀ`,
/// keeping eigenvalues above `tol_rank·λ_max`.
///
/// If `K` is the Gram matrix of elements `g_1…g_m`, the combinations
/// `Σ_i T_ia g_i` are orthonormal and span the same space.
pub fn orthonormal_combinations(gram: &DMatrix<f64>, tol_rank: f64) -> DMatrix<f64> {
    let m = gram.nrows();
    if m == 0 {
        return DMatrix::zeros(0, 0);
    }
    let (values, vectors) = sorted_eigen(gram);
    let top = values[0];
    let keep: Vec<usize> = (0..m).filter(|&a| top > 0.0 && values[a] > tol_rank * top).collect();
    DMatrix::from_fn(m, keep.len(), |i, a| vectors[(i, keep[a])] / values[keep[a]].sqrt())
}

/// Gram–Schmidt coordinates of elements with Gram matrix `gram`.
///
/// Column `i` of the result gives element `i` in an orthonormal basis of
/// their span built in input order. Elements whose residual norm² falls
/// below `tol_rank` times the largest input norm² add no direction.
pub fn gram_schmidt(gram: &DMatrix<f64>, tol_rank: f64) -> DMatrix<f64> {
    let m = gram.nrows();
    let scale = (0..m).map(|i| gram[(i, i)]).fold(0.0_f64, f64::max);
    // Each retained direction as a combination of the inputs.
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    let inner = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += a[i] * gram[(i, j)] * b[j];
            }
        }
        s
    };
    for i in 0..m {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        for d in &dirs {
            let c = inner(&v, d);
            for k in 0..m {
                v[k] -= c * d[k];
            }
        }
        let n2 = inner(&v, &v);
        if scale > 0.0 && n2 > tol_rank * scale {
            let n = n2.sqrt();
            dirs.push(v.iter().map(|x| x / n).collect());
        }
    }
    DMatrix::from_fn(dirs.len(), m, |a, i| {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        inner(&dirs[a], &e)
    })
}
