use bayeslin_core::linalg::pinv_sym;
use bayeslin_core::Tolerances;
use bayeslin_matrix::{adjust_matrix, ConstantBasis, MatrixSpace};
use nalgebra::{DMatrix, DVector};

use crate::basis::{gram_schmidt, orthonormal_combinations};
use crate::error::{Error, Result};
use crate::transform::{ObservedTransform, TransformComparison};

/// Realized changes `E_d(A_i) − E(A_i)` for each target object.
pub fn realized_changes(
    space: &MatrixSpace,
    targets: &[&str],
    collection: &[&str],
    observed: &[DMatrix<f64>],
    constants: &ConstantBasis,
) -> Result<Vec<DMatrix<f64>>> {
    targets
        .iter()
        .map(|t| {
            let adj = adjust_matrix(space, t, collection, constants)?;
            Ok(adj.realize(observed)? - space.expectation(t)?)
        })
        .collect()
}

/// Observed and a priori transforms for adjusting the span of the centred
/// `targets` by the centred `collection` in a matrix space.
///
/// Realized matrices are compared with the space's weighted trace form.
pub fn matrix_transforms(
    space: &MatrixSpace,
    targets: &[&str],
    collection: &[&str],
    observed: &[DMatrix<f64>],
    constants: &ConstantBasis,
) -> Result<TransformComparison> {
    let tol = Tolerances::default();
    let t_b = orthonormal_combinations(&space.cov_gram_of(targets, targets)?, tol.rank);
    if t_b.ncols() == 0 {
        return Err(Error::Degenerate("target span has zero variance".into()));
    }
    let t_d = orthonormal_combinations(&space.cov_gram_of(collection, collection)?, tol.rank);
    let prior = t_d.transpose() * space.cov_gram_of(collection, targets)? * &t_b;

    let changes = realized_changes(space, targets, collection, observed, constants)?;
    let r = space.r();
    let basis_changes: Vec<DMatrix<f64>> = (0..t_b.ncols())
        .map(|a| {
            let mut m = DMatrix::zeros(r, r);
            for (i, c) in changes.iter().enumerate() {
                m += c * t_b[(i, a)];
            }
            m
        })
        .collect();
    let w = space.weighting();
    let k = basis_changes.len();
    let gram = DMatrix::from_fn(k, k, |a, b| w.pair(&basis_changes[a], &basis_changes[b]));
    let alpha = gram_schmidt(&gram, tol.rank);
    Ok(TransformComparison::new(
        ObservedTransform::from_representation(alpha),
        ObservedTransform::from_representation(prior),
    ))
}

/// The subspace bearing for a constant matrix `G`.
#[derive(Debug, Clone)]
pub struct SubspaceBearing {
    /// Bearing `Σ_i c_i (A_i − E(A_i))` over the centred target objects.
    pub coefficients: DVector<f64>,
    /// The functional `(E_d(A_i) − E(A_i), G)` on each target.
    pub functional: DVector<f64>,
    /// Squared norm of the bearing.
    pub size: f64,
}

/// Solves `(A_k − E(A_k), Bearing) = (E_d(A_k) − E(A_k), G)` over the span of
/// the centred targets. `g` defaults to the all-ones matrix.
pub fn subspace_bearing(
    space: &MatrixSpace,
    targets: &[&str],
    collection: &[&str],
    observed: &[DMatrix<f64>],
    constants: &ConstantBasis,
    g: Option<&DMatrix<f64>>,
) -> Result<SubspaceBearing> {
    let tol = Tolerances::default();
    let r = space.r();
    let ones = DMatrix::from_element(r, r, 1.0);
    let g = g.unwrap_or(&ones);
    if g.shape() != (r, r) {
        return Err(Error::Dimension(format!("G must be {r}x{r}")));
    }
    let changes = realized_changes(space, targets, collection, observed, constants)?;
    let w = space.weighting();
    let functional = DVector::from_iterator(changes.len(), changes.iter().map(|c| w.pair(c, g)));
    let k = space.cov_gram_of(targets, targets)?;
    if k.trace() <= 0.0 {
        return Err(Error::Degenerate("target span has zero variance".into()));
    }
    let coefficients = pinv_sym(&k, tol.rank) * &functional;
    let residual = (&k * &coefficients - &functional).amax();
    if residual > 1e-8 * functional.amax().max(1.0) {
        return Err(Error::Degenerate(format!(
            "functional does not vanish on the null directions of the targets (residual {residual:e})"
        )));
    }
    let size = (coefficients.transpose() * &k * &coefficients)[(0, 0)];
    Ok(SubspaceBearing {
        coefficients,
        functional,
        size,
    })
}
