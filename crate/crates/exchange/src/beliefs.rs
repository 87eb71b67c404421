use bayeslin_core::linalg::{pinv_sym, symmetrize};
use bayeslin_core::{adjust, BeliefStore, Error, Result, Subspace};
use nalgebra::{DMatrix, DVector};

use crate::model::QuadraticModel;

/// Joint beliefs over the distinct elements of `V` and of one or more sample
/// covariance matrices.
#[derive(Debug, Clone)]
pub struct SampleCovBeliefs {
    /// Store with labels `V(i,j)` followed by `S(i,j)` (or `S1(i,j)`, `S2(i,j)`, …
    /// for several samples).
    pub store: BeliefStore,
    /// Sample sizes, one per sample matrix.
    pub sizes: Vec<usize>,
    d: usize,
}

impl SampleCovBeliefs {
    /// The span of the distinct elements of `V`.
    pub fn v_subspace(&self) -> Subspace {
        self.block(0)
    }

    /// The span of the distinct elements of sample matrix `k` (zero-based).
    pub fn s_subspace(&self, k: usize) -> Subspace {
        self.block(k + 1)
    }

    fn block(&self, b: usize) -> Subspace {
        let n = self.store.len();
        let comb = DMatrix::from_fn(self.d, n, |i, j| if j == b * self.d + i { 1.0 } else { 0.0 });
        self.store
            .subspace(comb, DVector::zeros(self.d))
            .expect("unit rows over existing quantities")
    }
}

/// Beliefs over `V` and one sample covariance matrix from `n` residuals:
/// `E(S) = E(V)`, `Cov(V, S) = Var(V)`, `Var(S) = Var(V) + Var(U)/n`.
pub fn sample_cov_beliefs(q: &QuadraticModel, n: usize) -> Result<SampleCovBeliefs> {
    sample_cov_beliefs_multi(q, &[n])
}

/// Beliefs over `V` and several sample covariance matrices from disjoint
/// samples. Matrices from different samples have covariance `Var(V)`.
pub fn sample_cov_beliefs_multi(q: &QuadraticModel, sizes: &[usize]) -> Result<SampleCovBeliefs> {
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("no sample sizes given".into()));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidArgument(format!(
            "sample size {n} is below the minimum of 2"
        )));
    }
    let d = q.coords.len();
    let blocks = sizes.len() + 1;
    let mut cov = DMatrix::zeros(blocks * d, blocks * d);
    for a in 0..blocks {
        for b in 0..blocks {
            cov.view_mut((a * d, b * d), (d, d)).copy_from(&q.var_vec_v);
        }
    }
    for (k, &n) in sizes.iter().enumerate() {
        let o = (k + 1) * d;
        let block = &q.var_vec_v + &q.var_vec_u / n as f64;
        cov.view_mut((o, o), (d, d)).copy_from(&block);
    }
    let ev = q.coords.half_vec(&q.expectation_v)?;
    let mut mean = DVector::zeros(blocks * d);
    for b in 0..blocks {
        mean.rows_mut(b * d, d).copy_from(&ev);
    }
    let mut labels: Vec<String> = (0..d).map(|c| q.coords.label("V", c)).collect();
    for k in 0..sizes.len() {
        let prefix = if sizes.len() == 1 {
            "S".to_string()
        } else {
            format!("S{}", k + 1)
        };
        labels.extend((0..d).map(|c| q.coords.label(&prefix, c)));
    }
    let store = BeliefStore::new(labels, mean, symmetrize(&cov))?;
    Ok(SampleCovBeliefs {
        store,
        sizes: sizes.to_vec(),
        d,
    })
}

/// Result of adjusting `V` by an observed sample covariance matrix.
#[derive(Debug, Clone)]
pub struct QuadraticAdjustment {
    /// Adjusted expectation of `V` as a symmetric matrix.
    pub adjusted: DMatrix<f64>,
    /// Adjusted covariance over the distinct coordinates of `V`.
    pub adjusted_cov: DMatrix<f64>,
    /// Coefficients of the distinct elements of `S` in the adjusted expectation.
    pub coeff: DMatrix<f64>,
}

/// `E(V) + Var(V)·(Var(V) + Var(U)/n)⁺·(s − E(V))` over distinct elements,
/// re-expanded to a symmetric matrix.
pub fn quadratic_adjust(q: &QuadraticModel, s_obs: &DMatrix<f64>, n: usize) -> Result<QuadraticAdjustment> {
    let beliefs = sample_cov_beliefs(q, n)?;
    let v = beliefs.v_subspace();
    let s = beliefs.s_subspace(0);
    let adj = adjust(&beliefs.store, &v, &s)?;
    let realized = adj.realize(&q.coords.half_vec(s_obs)?)?;
    Ok(QuadraticAdjustment {
        adjusted: q.coords.from_half(&realized)?,
        adjusted_cov: adj.adjusted_cov,
        coeff: adj.coeff,
    })
}

/// The same adjustment written out directly from the closed form, without a
/// belief store. Used to cross-check [`quadratic_adjust`].
pub fn quadratic_adjust_closed_form(q: &QuadraticModel, s_obs: &DMatrix<f64>, n: usize) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "sample size {n} is below the minimum of 2"
        )));
    }
    let var_s = &q.var_vec_v + &q.var_vec_u / n as f64;
    let coeff = &q.var_vec_v * pinv_sym(&var_s, 1e-10);
    let ev = q.coords.half_vec(&q.expectation_v)?;
    let sv = q.coords.half_vec(s_obs)?;
    q.coords.from_half(&(&ev + coeff * (sv - &ev)))
}
