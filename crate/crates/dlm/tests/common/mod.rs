#![allow(dead_code)]

use bayeslin_dlm::{simulate_gaussian, DlmSpec, QuarticSpec};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn mat(r: usize, c: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(r, c, v)
}

/// Observation variance used to simulate the synthetic series.
pub fn true_v() -> DMatrix<f64> {
    mat(2, 2, &[1.0, 0.3, 0.3, 1.2])
}

/// Evolution variance used to simulate the synthetic series.
pub fn true_w() -> DMatrix<f64> {
    mat(2, 2, &[2.0, 0.5, 0.5, 1.5])
}

/// Identity model with the given variances, a vague initial state and a
/// normal-guided fourth-order specification.
pub fn identity_model(v: DMatrix<f64>, w: DMatrix<f64>, dof: f64) -> (DlmSpec, QuarticSpec) {
    let quartic = QuarticSpec::normal_guided(&v, &w, dof, dof).unwrap();
    let spec = DlmSpec::identity(DVector::zeros(2), DMatrix::identity(2, 2) * 10.0, v, w).unwrap();
    (spec, quartic)
}

/// A series of length `t` simulated from the true identity model.
pub fn synthetic_series(seed: u64, t: usize) -> Vec<DVector<f64>> {
    let truth = DlmSpec::identity(DVector::zeros(2), DMatrix::identity(2, 2) * 10.0, true_v(), true_w()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_gaussian(&truth, t, &mut rng).0
}

pub fn rel_frobenius(est: &DMatrix<f64>, truth: &DMatrix<f64>) -> f64 {
    (est - truth).norm() / truth.norm()
}
