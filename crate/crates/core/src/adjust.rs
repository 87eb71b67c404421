use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{pinv_sym, pinv_sym_full, symmetrize};
use crate::store::{BeliefStore, Subspace};

/// The Bayes linear adjustment of a target subspace by a data subspace.
#[derive(Debug, Clone)]
pub struct ScalarAdjustment {
    /// Quantities being adjusted.
    pub target: Subspace,
    /// Quantities being observed.
    pub data: Subspace,
    /// `Cov(B,D)·Var(D)⁺`, one row per target element.
    pub coeff: DMatrix<f64>,
    /// `E(B) − coeff·E(D)`.
    pub intercept: DVector<f64>,
    /// `Var(B) − Cov(B,D)·Var(D)⁺·Cov(D,B)`.
    pub adjusted_cov: DMatrix<f64>,
    /// `Var(B)⁺·Cov(B,D)·Var(D)⁺·Cov(D,B)`, the belief transform over the target.
    pub resolution_transform: DMatrix<f64>,
    /// Prior expectation of the target.
    pub prior_mean: DVector<f64>,
    /// Prior variance of the target.
    pub prior_var: DMatrix<f64>,
    /// Prior expectation of the data.
    pub data_mean: DVector<f64>,
    /// Orthonormal directions of the data with zero prior variance.
    pub data_null_space: DMatrix<f64>,
    obs_tol: f64,
}

/// Adjusts the target subspace `b` by the data subspace `d`.
pub fn adjust(store: &BeliefStore, b: &Subspace, d: &Subspace) -> Result<ScalarAdjustment> {
    store.owns(b)?;
    store.owns(d)?;
    let tol = store.tolerances();
    let var_b = store.var_of(b);
    let var_d = store.var_of(d);
    let cov_bd = store.cov_of(b, d);
    let pinv_d = pinv_sym_full(&var_d, tol.rank);
    let coeff = &cov_bd * &pinv_d.inverse;
    let prior_mean = store.mean_of(b);
    let data_mean = store.mean_of(d);
    let intercept = &prior_mean - &coeff * &data_mean;
    let explained = symmetrize(&(&coeff * cov_bd.transpose()));
    let adjusted_cov = symmetrize(&(&var_b - &explained));
    let resolution_transform = pinv_sym(&var_b, tol.rank) * &explained;
    Ok(ScalarAdjustment {
        target: b.clone(),
        data: d.clone(),
        coeff,
        intercept,
        adjusted_cov,
        resolution_transform,
        prior_mean,
        prior_var: var_b,
        data_mean,
        data_null_space: pinv_d.null_space,
        obs_tol: tol.obs,
    })
}

impl ScalarAdjustment {
    /// Realized adjusted expectation `intercept + coeff·d_obs`.
    ///
    /// Fails when the observation contradicts a data direction whose value is
    /// known with certainty.
    pub fn realize(&self, d_obs: &DVector<f64>) -> Result<DVector<f64>> {
        if d_obs.len() != self.data.dim() {
            return Err(Error::Dimension(format!(
                "observation of length {} for {} data elements",
                d_obs.len(),
                self.data.dim()
            )));
        }
        if d_obs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observation".into()));
        }
        let centred = d_obs - &self.data_mean;
        let scale = 1.0_f64.max(self.data_mean.amax());
        for u in self.data_null_space.column_iter() {
            let disc = u.dot(&centred).abs();
            if disc > self.obs_tol * scale {
                return Err(Error::InconsistentObservation {
                    discrepancy: disc,
                    tolerance: self.obs_tol * scale,
                });
            }
        }
        Ok(&self.intercept + &self.coeff * d_obs)
    }

    /// Change in expectation `E_d(B) − E(B)` for an observation.
    pub fn change(&self, d_obs: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.realize(d_obs)? - &self.prior_mean)
    }

    /// Proportion of prior variance resolved for each target element; zero for
    /// elements whose prior variance is zero.
    pub fn resolutions(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.target.dim(),
            (0..self.target.dim()).map(|i| {
                let v = self.prior_var[(i, i)];
                if v > 0.0 {
                    1.0 - self.adjusted_cov[(i, i)] / v
                } else {
                    0.0
                }
            }),
        )
    }

    /// Trace of the belief transform, the expected size of the adjustment.
    pub fn transform_trace(&self) -> f64 {
        self.resolution_transform.trace()
    }
}
