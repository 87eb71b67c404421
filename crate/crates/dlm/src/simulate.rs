use bayeslin_core::linalg::sorted_eigen;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::DlmSpec;

/// Symmetric square root of an NND matrix, with tiny negative eigenvalues
/// clipped to zero.
fn root(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (values, vectors) = sorted_eigen(a);
    let d = DMatrix::from_diagonal(&values.map(|v| v.max(0.0).sqrt()));
    &vectors * d * vectors.transpose()
}

fn draw<R: Rng + ?Sized>(rng: &mut R, root: &DMatrix<f64>) -> DVector<f64> {
    let z = DVector::from_fn(root.ncols(), |_, _| rng.sample::<f64, _>(StandardNormal));
    root * z
}

/// Simulates `T` observations from the model with Gaussian residuals whose
/// variances are the model's `V` and `W`, and an initial state drawn from
/// `N(μ₀, Σ₀)`. Returns the observations and the states `θ_1..θ_T`.
pub fn simulate_gaussian<R: Rng + ?Sized>(
    spec: &DlmSpec,
    t: usize,
    rng: &mut R,
) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let root_v = root(&spec.v);
    let root_w = root(&spec.w);
    let root_s = root(&spec.sigma0);
    let mut theta = &spec.mu0 + draw(rng, &root_s);
    let mut obs = Vec::with_capacity(t);
    let mut states = Vec::with_capacity(t);
    for _ in 0..t {
        theta = &spec.g * &theta + draw(rng, &root_w);
        obs.push(spec.f.transpose() * &theta + draw(rng, &root_v));
        states.push(theta.clone());
    }
    (obs, states)
}
