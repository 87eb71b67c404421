use bayeslin_core::linalg::{max_abs, min_eigenvalue};
use bayeslin_core::{adjust, BeliefStore, Error};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

fn random_store(rng: &mut ChaCha8Rng, n: usize, rank_deficit: usize) -> BeliefStore {
    let k = n - rank_deficit;
    let a = DMatrix::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
    let cov = &a * a.transpose();
    let mean = DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
    BeliefStore::new(labels(n), mean, cov).unwrap()
}

/// Brute-force oracle: minimize E[(X1 - a - b X2)^2] over a dense grid.
fn grid_minimizer(mean: [f64; 2], cov: [[f64; 2]; 2]) -> (f64, f64, f64) {
    let loss = |a: f64, b: f64| {
        // E[(X1 - a - bX2)^2] = Var(X1 - bX2) + (E X1 - a - b E X2)^2
        let var = cov[0][0] - 2.0 * b * cov[0][1] + b * b * cov[1][1];
        let bias = mean[0] - a - b * mean[1];
        var + bias * bias
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let mut a = -3.0;
    while a <= 3.0 {
        let mut b = -2.0;
        while b <= 2.0 {
            let l = loss(a, b);
            if l < best.0 {
                best = (l, a, b);
            }
            b += 0.0025;
        }
        a += 0.0025;
    }
    best
}

#[test]
fn two_quantity_example_matches_grid_search() {
    let store = BeliefStore::new(
        labels(2),
        DVector::from_vec(vec![0.0, 0.0]),
        DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 4.0]),
    )
    .unwrap();
    let b = store.select(&["q0"]).unwrap();
    let d = store.select(&["q1"]).unwrap();
    let adj = adjust(&store, &b, &d).unwrap();
    let (loss, a, slope) = grid_minimizer([0.0, 0.0], [[4.0, 2.0], [2.0, 4.0]]);
    assert!((adj.intercept[0] - a).abs() < 5e-3);
    assert!((adj.coeff[(0, 0)] - slope).abs() < 5e-3);
    assert!((adj.adjusted_cov[(0, 0)] - loss).abs() < 1e-4);
    let realized = adj.realize(&DVector::from_vec(vec![2.0])).unwrap();
    assert!((realized[0] - 1.0).abs() < 1e-12);
    assert!((adj.adjusted_cov[(0, 0)] - 3.0).abs() < 1e-12);
}

#[test]
fn uncorrelated_data_leave_expectation_unchanged() {
    let store = BeliefStore::new(
        labels(2),
        DVector::from_vec(vec![1.5, -2.0]),
        DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]),
    )
    .unwrap();
    let b = store.select(&["q0"]).unwrap();
    let d = store.select(&["q1"]).unwrap();
    let adj = adjust(&store, &b, &d).unwrap();
    for obs in [-10.0, 0.0, 7.5] {
        let r = adj.realize(&DVector::from_vec(vec![obs])).unwrap();
        assert_eq!(r[0], 1.5);
    }
}

#[test]
fn target_in_data_span_is_recovered_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let store = random_store(&mut rng, 4, 0);
    let d = store.select(&["q0", "q1", "q2"]).unwrap();
    let comb = DMatrix::from_row_slice(1, 4, &[2.0, -1.0, 0.5, 0.0]);
    let b = store.subspace(comb, DVector::from_vec(vec![3.0])).unwrap();
    let adj = adjust(&store, &b, &d).unwrap();
    let obs = DVector::from_vec(vec![1.0, 2.0, -4.0]);
    let r = adj.realize(&obs).unwrap();
    assert!((r[0] - (2.0 - 2.0 - 2.0 + 3.0)).abs() < 1e-10);
    assert!(adj.adjusted_cov[(0, 0)].abs() < 1e-10);
}

#[test]
fn dimension_mismatch_and_foreign_subspaces_are_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s1 = random_store(&mut rng, 3, 0);
    let s2 = random_store(&mut rng, 3, 0);
    let b = s1.select(&["q0"]).unwrap();
    let d = s2.select(&["q1"]).unwrap();
    assert_eq!(adjust(&s1, &b, &d).unwrap_err(), Error::StoreMismatch);
    let d1 = s1.select(&["q1"]).unwrap();
    let adj = adjust(&s1, &b, &d1).unwrap();
    assert!(matches!(
        adj.realize(&DVector::from_vec(vec![1.0, 2.0])),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn non_nnd_store_is_rejected() {
    let err = BeliefStore::new(
        labels(2),
        DVector::zeros(2),
        DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]),
    )
    .unwrap_err();
    assert!(matches!(err, Error::NotNnd { .. }));
    let dup = BeliefStore::new(vec!["a".into(), "a".into()], DVector::zeros(2), DMatrix::identity(2, 2)).unwrap_err();
    assert_eq!(dup, Error::DuplicateLabel("a".into()));
}

#[test]
fn degenerate_data_direction_must_be_observed_at_its_expectation() {
    // q2 = q0 + q1 exactly, so the data (q0, q1, q2) have a null direction.
    let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    let cov = &a * a.transpose();
    let store = BeliefStore::new(labels(3), DVector::from_vec(vec![1.0, 2.0, 3.0]), cov).unwrap();
    let b = store.select(&["q0"]).unwrap();
    let d = store.select(&["q1", "q2"]).unwrap();
    let adj = adjust(&store, &b, &d).unwrap();
    assert!(adj.realize(&DVector::from_vec(vec![0.5, 4.0])).is_ok());

    let z = store
        .subspace(DMatrix::from_row_slice(1, 3, &[1.0, 1.0, -1.0]), DVector::zeros(1))
        .unwrap();
    let dz = store.join(&d, &z).unwrap();
    let adj = adjust(&store, &b, &dz).unwrap();
    assert!(adj.realize(&DVector::from_vec(vec![0.5, 4.0, 0.0])).is_ok());
    assert!(matches!(
        adj.realize(&DVector::from_vec(vec![0.5, 4.0, 0.1])),
        Err(Error::InconsistentObservation { .. })
    ));
}

#[test]
fn linearly_dependent_rows_are_rejected() {
    let store = BeliefStore::new(labels(2), DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
    let comb = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
    assert!(matches!(
        store.subspace(comb, DVector::zeros(2)),
        Err(Error::RankDeficient { rank: 1, rows: 2 })
    ));
}

#[test]
fn resolution_transform_eigenvalues_lie_in_unit_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let store = random_store(&mut rng, 6, 1);
        let b = store.select(&["q0", "q1", "q2"]).unwrap();
        let d = store.select(&["q3", "q4", "q5"]).unwrap();
        let adj = adjust(&store, &b, &d).unwrap();
        let eig = adj.resolution_transform.clone().complex_eigenvalues();
        for e in eig.iter() {
            assert!(e.im.abs() < 1e-8);
            assert!(e.re > -1e-8 && e.re < 1.0 + 1e-8, "eigenvalue {e}");
        }
    }
}

fn arb_store() -> impl Strategy<Value = (BeliefStore, u64)> {
    (3usize..7, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (random_store(&mut rng, n, 0), seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Adjusted variance is dominated by prior variance.
    #[test]
    fn adjusted_variance_is_dominated((store, _) in arb_store()) {
        let n = store.len();
        let b = store.select(&["q0", "q1"]).unwrap();
        let rest: Vec<String> = (2..n).map(|i| format!("q{i}")).collect();
        let d = store.select_owned(&rest).unwrap();
        let adj = adjust(&store, &b, &d).unwrap();
        let gap = &adj.prior_var - &adj.adjusted_cov;
        prop_assert!(min_eigenvalue(&gap) >= -1e-8 * adj.prior_var.trace());
        prop_assert!(min_eigenvalue(&adj.adjusted_cov) >= -1e-8 * adj.prior_var.trace());
    }

    /// Adjusting the adjusted expectation by the same data reproduces its map.
    #[test]
    fn projection_is_idempotent((store, _) in arb_store()) {
        let n = store.len();
        let b = store.select(&["q0"]).unwrap();
        let rest: Vec<String> = (1..n).map(|i| format!("q{i}")).collect();
        let d = store.select_owned(&rest).unwrap();
        let first = adjust(&store, &b, &d).unwrap();
        let comb = &first.coeff * &d.combinations;
        let projected = store.subspace(comb.clone(), first.intercept.clone()).unwrap();
        let second = adjust(&store, &projected, &d).unwrap();
        prop_assert!(max_abs(&(&second.coeff - &first.coeff)) < 1e-8);
        prop_assert!((second.intercept[0] - first.intercept[0]).abs() < 1e-8);
    }

    /// Joint adjustment equals sequential adjustment by C then by D − E_C(D).
    #[test]
    fn two_stage_adjustment_equals_joint((store, _) in arb_store()) {
        let n = store.len();
        let b = store.select(&["q0"]).unwrap();
        let c = store.select(&["q1"]).unwrap();
        let rest: Vec<String> = (2..n).map(|i| format!("q{i}")).collect();
        let d = store.select_owned(&rest).unwrap();
        let cd = store.join(&c, &d).unwrap();
        let joint = adjust(&store, &b, &cd).unwrap();
        let joint_map = &joint.coeff * &cd.combinations;

        let by_c = adjust(&store, &b, &c).unwrap();
        let d_given_c = adjust(&store, &d, &c).unwrap();
        let resid_comb = &d.combinations - &d_given_c.coeff * &c.combinations;
        let resid = store.subspace(resid_comb.clone(), DVector::zeros(d.dim())).unwrap();
        let by_resid = adjust(&store, &b, &resid).unwrap();
        let staged_map = &by_c.coeff * &c.combinations + &by_resid.coeff * &resid_comb;
        prop_assert!(max_abs(&(joint_map - staged_map)) < 1e-8);
    }
}
