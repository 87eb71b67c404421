use bayeslin_core::linalg::{pinv_sym, symmetrize};
use bayeslin_core::Tolerances;
use nalgebra::{DMatrix, DVector};

use crate::collections::ConstantBasis;
use crate::error::{Error, Result};
use crate::space::MatrixSpace;

/// Orthogonal projection of a matrix object onto a collection plus constants.
#[derive(Debug, Clone)]
pub struct MatrixAdjustment {
    /// Name of the adjusted object.
    pub target: String,
    /// Names of the collection members, in coefficient order.
    pub collection: Vec<String>,
    /// Coefficient of each collection member.
    pub coefficients: DVector<f64>,
    /// Coefficient of each constant basis matrix.
    pub constant_coefficients: DVector<f64>,
    /// `Σ γ_b C_b`, the constant part of the adjusted expectation.
    pub constant_component: DMatrix<f64>,
    /// Constant-adjusted norm² of the target before adjustment.
    pub prior_variance: f64,
    /// Constant-adjusted norm² of the adjusted-expectation object.
    pub resolved_variance: f64,
    /// `resolved_variance / prior_variance`, zero when the prior variance is zero.
    pub resolution: f64,
}

impl MatrixAdjustment {
    /// The adjusted expectation for realized values of the collection members.
    pub fn realize(&self, observed: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
        if observed.len() != self.collection.len() {
            return Err(Error::Dimension(format!(
                "{} observed matrices for {} collection members",
                observed.len(),
                self.collection.len()
            )));
        }
        let mut out = self.constant_component.clone();
        for (b, m) in self.coefficients.iter().zip(observed) {
            if m.shape() != out.shape() {
                return Err(Error::Dimension("observed matrix has wrong shape".into()));
            }
            out += m * *b;
        }
        Ok(out)
    }
}

/// Projects `target` onto `span(collection ∪ constants)`.
///
/// The normal equations are solved by first projecting onto the constants and
/// then onto the residual collection, each with a pseudo-inverse.
pub fn adjust_matrix(
    space: &MatrixSpace,
    target: &str,
    collection: &[&str],
    constants: &ConstantBasis,
) -> Result<MatrixAdjustment> {
    let tol = Tolerances::default();
    let w = space.weighting();
    let q = constants.len();
    let p = collection.len();
    let r = space.r();
    for c in &constants.matrices {
        if c.nrows() != r || c.ncols() != r {
            return Err(Error::Dimension(format!(
                "constant basis matrix is {}x{}, objects are {r}x{r}",
                c.nrows(),
                c.ncols()
            )));
        }
    }
    let g_cc = DMatrix::from_fn(q, q, |a, b| w.pair(&constants.matrices[a], &constants.matrices[b]));
    let mut g_xc = DMatrix::zeros(p, q);
    for (i, name) in collection.iter().enumerate() {
        for (b, c) in constants.matrices.iter().enumerate() {
            g_xc[(i, b)] = space.inner_with_constant(name, c)?;
        }
    }
    let mut g_tc = DVector::zeros(q);
    for (b, c) in constants.matrices.iter().enumerate() {
        g_tc[b] = space.inner_with_constant(target, c)?;
    }
    let g_xx = space.gram_of(collection)?;
    let g_xt = DVector::from_iterator(
        p,
        collection
            .iter()
            .map(|n| space.inner_product(n, target))
            .collect::<Result<Vec<_>>>()?,
    );
    let p_cc = pinv_sym(&g_cc, tol.rank);
    let k_res = symmetrize(&(&g_xx - &g_xc * &p_cc * g_xc.transpose()));
    let k_t = &g_xt - &g_xc * &p_cc * &g_tc;
    let beta = pinv_sym(&k_res, tol.rank) * k_t;
    let gamma = &p_cc * (&g_tc - g_xc.transpose() * &beta);
    let mut constant_component = DMatrix::zeros(r, r);
    for (g, c) in gamma.iter().zip(&constants.matrices) {
        constant_component += c * *g;
    }
    let k_xx = space.cov_gram_of(collection, collection)?;
    let prior_variance = space.matrix_covariance(target, target)?;
    let resolved_variance = (beta.transpose() * &k_xx * &beta)[(0, 0)];
    let resolution = if prior_variance > 0.0 {
        resolved_variance / prior_variance
    } else {
        0.0
    };
    Ok(MatrixAdjustment {
        target: target.to_string(),
        collection: collection.iter().map(|s| s.to_string()).collect(),
        coefficients: beta,
        constant_coefficients: gamma,
        constant_component,
        prior_variance,
        resolved_variance,
        resolution,
    })
}

/// Proportion of the target's constant-adjusted variance resolved by the
/// collection, with constants spanning every expectation.
pub fn resolution(space: &MatrixSpace, target: &str, collection: &[&str]) -> Result<f64> {
    let tol = Tolerances::default();
    let k_tt = space.matrix_covariance(target, target)?;
    if k_tt <= 0.0 {
        return Err(Error::ZeroNorm(target.to_string()));
    }
    let k_xx = space.cov_gram_of(collection, collection)?;
    let k_xt = space.cov_gram_of(collection, &[target])?;
    let explained = (k_xt.transpose() * pinv_sym(&k_xx, tol.rank) * &k_xt)[(0, 0)];
    Ok((explained / k_tt).clamp(0.0, 1.0))
}
