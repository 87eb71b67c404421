use bayeslin_core::{adjust, BeliefStore, Subspace};
use nalgebra::{DMatrix, DVector};

use crate::basis::orthonormal_combinations;
use crate::error::{Error, Result};
use crate::transform::{ObservedTransform, SizeRatio, TransformComparison};

/// Size, bearing and size ratio of a scalar adjustment.
#[derive(Debug, Clone)]
pub struct ScalarDiagnostics {
    /// `E_d(B) − E(B)` for each target element.
    pub change: DVector<f64>,
    /// Row `a` gives the orthonormal element `U_a = Σ_i basis[a,i]·(B_i − E(B_i))`.
    pub basis: DMatrix<f64>,
    /// Coefficients `E_d(U_a)` of the bearing over the orthonormal basis.
    pub bearing: DVector<f64>,
    /// The bearing as a combination of the centred target elements:
    /// `Z_d(B) = Σ_i w_i·(B_i − E(B_i))`.
    pub bearing_weights: DVector<f64>,
    /// `Var(Z_d(B))`, the squared norm of the bearing.
    pub size: f64,
    /// Trace of the belief transform, the prior expectation of the size.
    pub expected_size: f64,
    /// `size / expected_size`.
    pub size_ratio: SizeRatio,
}

impl ScalarDiagnostics {
    /// `Cov(X, Z_d(B))` for `X = Σ_i c_i B_i`, which equals `E_d(X) − E(X)`.
    pub fn covariance_with_bearing(&self, store: &BeliefStore, target: &Subspace, c: &DVector<f64>) -> f64 {
        let var_b = store.var_of(target);
        (c.transpose() * var_b * &self.bearing_weights)[(0, 0)]
    }
}

fn target_basis(store: &BeliefStore, b: &Subspace) -> Result<DMatrix<f64>> {
    let t = orthonormal_combinations(&store.var_of(b), store.tolerances().rank);
    if t.ncols() == 0 {
        return Err(Error::Degenerate("target span has zero variance".into()));
    }
    Ok(t)
}

/// Diagnoses the adjustment of `b` by `d` after observing `d_obs`.
pub fn scalar_diagnose(
    store: &BeliefStore,
    b: &Subspace,
    d: &Subspace,
    d_obs: &DVector<f64>,
) -> Result<ScalarDiagnostics> {
    let adj = adjust(store, b, d)?;
    let change = adj.change(d_obs)?;
    let t = target_basis(store, b)?;
    let bearing = t.transpose() * &change;
    let bearing_weights = &t * &bearing;
    let size = bearing.norm_squared();
    let expected_size = adj.transform_trace();
    Ok(ScalarDiagnostics {
        change,
        basis: t.transpose(),
        bearing,
        bearing_weights,
        size,
        expected_size,
        size_ratio: SizeRatio::new(size, expected_size),
    })
}

/// Observed and a priori transforms of a scalar adjustment.
///
/// The known space is spanned by the unit constant, so the observed
/// representation is the single row of bearing coefficients. The a priori
/// representation maps the orthonormal target basis onto an orthonormal
/// basis of the centred data.
pub fn scalar_transforms(
    store: &BeliefStore,
    b: &Subspace,
    d: &Subspace,
    d_obs: &DVector<f64>,
) -> Result<TransformComparison> {
    let diag = scalar_diagnose(store, b, d, d_obs)?;
    let t_b = diag.basis.transpose();
    let t_d = orthonormal_combinations(&store.var_of(d), store.tolerances().rank);
    let prior = t_d.transpose() * store.cov_of(d, b) * &t_b;
    let observed = DMatrix::from_row_slice(1, diag.bearing.len(), diag.bearing.as_slice());
    Ok(TransformComparison::new(
        ObservedTransform::from_representation(observed),
        ObservedTransform::from_representation(prior),
    ))
}
