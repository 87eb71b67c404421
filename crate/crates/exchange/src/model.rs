use bayeslin_core::linalg::{check_nnd, checked_symmetric};
use bayeslin_core::{Error, Result, Tolerances};
use nalgebra::DMatrix;

use crate::coords::SymCoords;
use crate::fourth::mvn_fourth_moments_in;

/// Second-order exchangeable vectors `X_k = M + R_k`.
///
/// `sigma` is `Var(X_k)` and `delta` is `Cov(X_k, X_l)` for `k ≠ l`, so that
/// `Var(M) = delta` and `Var(R_k) = sigma − delta`.
#[derive(Debug, Clone)]
pub struct ExchangeableModel {
    /// Dimension of each vector.
    pub r: usize,
    /// `Var(X_k)`.
    pub sigma: DMatrix<f64>,
    /// `Cov(X_k, X_l)` for distinct `k, l`.
    pub delta: DMatrix<f64>,
}

impl ExchangeableModel {
    /// Validates coherence: both `delta` and `sigma − delta` must be NND.
    pub fn new(sigma: DMatrix<f64>, delta: DMatrix<f64>) -> Result<Self> {
        let (mean_var, _) = exchangeable_decompose(&sigma, &delta)?;
        Ok(Self {
            r: mean_var.nrows(),
            sigma: checked_symmetric("sigma", &sigma, Tolerances::default().sym)?,
            delta: mean_var,
        })
    }

    /// Variance of the common mean component `M`.
    pub fn mean_var(&self) -> DMatrix<f64> {
        self.delta.clone()
    }

    /// Variance of each residual `R_k`.
    pub fn residual_var(&self) -> DMatrix<f64> {
        &self.sigma - &self.delta
    }
}

/// Splits an exchangeable specification into `(Var(M), Var(R_k))`.
///
/// Fails with [`Error::NotNnd`], naming the offending eigenvalue, when either
/// part is not NND.
pub fn exchangeable_decompose(sigma: &DMatrix<f64>, delta: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let tol = Tolerances::default();
    let sigma = checked_symmetric("sigma", sigma, tol.sym)?;
    let delta = checked_symmetric("delta", delta, tol.sym)?;
    if sigma.shape() != delta.shape() {
        return Err(Error::Dimension(format!(
            "sigma is {}x{} but delta is {}x{}",
            sigma.nrows(),
            sigma.ncols(),
            delta.nrows(),
            delta.ncols()
        )));
    }
    let residual = &sigma - &delta;
    check_nnd("Var(M)", &delta, tol.psd)?;
    // The tolerance is relative to sigma so that a residual of exactly zero passes.
    let scale = sigma.trace().abs().max(residual.trace().abs());
    let min = bayeslin_core::linalg::min_eigenvalue(&residual);
    if min < -tol.psd * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotNnd {
            name: "Var(R)".into(),
            eigenvalue: min,
            tolerance: tol.psd * scale,
        });
    }
    Ok((delta, residual))
}

/// Second-order beliefs about `R_k R_kᵀ = V + U_k` over distinct coordinates.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    /// Ordering of the distinct elements of `V`.
    pub coords: SymCoords,
    /// Covariance of the distinct elements of `V`.
    pub var_vec_v: DMatrix<f64>,
    /// Covariance of the distinct elements of each `U_k`.
    pub var_vec_u: DMatrix<f64>,
    /// `E(V) = Var(R_k)`.
    pub expectation_v: DMatrix<f64>,
}

impl QuadraticModel {
    /// Validates shapes, symmetry and NND of every component.
    pub fn new(
        coords: SymCoords,
        var_vec_v: DMatrix<f64>,
        var_vec_u: DMatrix<f64>,
        expectation_v: DMatrix<f64>,
    ) -> Result<Self> {
        let tol = Tolerances::default();
        let d = coords.len();
        for (name, m) in [("Var(vec V)", &var_vec_v), ("Var(vec U)", &var_vec_u)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {d}x{d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if expectation_v.nrows() != coords.r() || expectation_v.ncols() != coords.r() {
            return Err(Error::Dimension(format!(
                "E(V) is {}x{}, expected {r}x{r}",
                expectation_v.nrows(),
                expectation_v.ncols(),
                r = coords.r()
            )));
        }
        let var_vec_v = checked_symmetric("Var(vec V)", &var_vec_v, tol.sym)?;
        let var_vec_u = checked_symmetric("Var(vec U)", &var_vec_u, tol.sym)?;
        let expectation_v = checked_symmetric("E(V)", &expectation_v, tol.sym)?;
        check_nnd("Var(vec V)", &var_vec_v, tol.psd)?;
        check_nnd("Var(vec U)", &var_vec_u, tol.psd)?;
        check_nnd("E(V)", &expectation_v, tol.psd)?;
        Ok(Self {
            coords,
            var_vec_v,
            var_vec_u,
            expectation_v,
        })
    }

    /// Fills the residual fourth moments from `E(V)` with the normal-theory
    /// form `E(V)⊗E(V) + E(V)⋆E(V)`. This is an approximation that must be
    /// chosen explicitly.
    pub fn mvn_auto(coords: SymCoords, var_vec_v: DMatrix<f64>, expectation_v: DMatrix<f64>) -> Result<Self> {
        let fm = mvn_fourth_moments_in(&expectation_v, coords.clone())?;
        Self::new(coords, var_vec_v, fm.distinct, expectation_v)
    }

    /// Matrix dimension.
    pub fn r(&self) -> usize {
        self.coords.r()
    }
}
