use bayeslin_core::Error;
use bayeslin_exchange::{
    exchangeable_decompose, mvn_fourth_moments, quadratic_adjust, quadratic_adjust_closed_form, sample_cov_beliefs,
    sample_cov_beliefs_multi, ExchangeableModel, QuadraticModel, SymCoords,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn elicited_coords() -> SymCoords {
    SymCoords::custom(3, vec![(0, 0), (2, 2), (1, 1), (0, 2), (0, 1), (1, 2)]).unwrap()
}

/// Covariance of the six distinct elements of V, in the elicited order.
fn elicited_var_v() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        6,
        6,
        &[
            1.00, 9.38, 5.00, 2.30, 3.44, 4.59, //
            9.38, 351.56, 93.75, 43.06, 43.06, 129.17, //
            5.00, 93.75, 100.00, 15.31, 34.44, 68.89, //
            2.30, 43.06, 15.31, 8.59, 8.79, 17.58, //
            3.44, 43.06, 34.44, 8.79, 19.34, 26.37, //
            4.59, 129.17, 68.89, 17.58, 26.37, 77.34,
        ],
    )
}

fn printed_residual() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        6,
        6,
        &[
            127.0, 496.0, 248.0, 251.0, 178.0, 351.0, //
            496.0, 19997.0, 5626.0, 3150.0, 1670.0, 10607.0, //
            248.0, 5626.0, 6332.0, 1182.0, 1254.0, 5969.0, //
            251.0, 3150.0, 1182.0, 1046.0, 599.0, 1949.0, //
            178.0, 1670.0, 1254.0, 599.0, 573.0, 1477.0, //
            351.0, 10607.0, 5969.0, 1949.0, 1477.0, 8439.0,
        ],
    )
}

fn prior_v() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[7.98, 11.14, 15.75, 11.14, 56.26, 53.04, 15.75, 53.04, 100.00])
}

fn observed_s() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[8.28, 20.15, 24.75, 20.15, 178.30, 160.74, 24.75, 160.74, 258.26],
    )
}

fn elicited_model() -> QuadraticModel {
    QuadraticModel::new(elicited_coords(), elicited_var_v(), printed_residual(), prior_v()).unwrap()
}

#[test]
fn sample_variance_follows_closed_form() {
    let q = elicited_model();
    let b = sample_cov_beliefs(&q, 34).unwrap();
    let i = b.store.index_of("S(1,1)").unwrap();
    assert!((b.store.covariance()[(i, i)] - (1.0 + 127.0 / 34.0)).abs() < 1e-12);
    let v = b.store.index_of("V(1,1)").unwrap();
    assert_eq!(b.store.covariance()[(v, i)], 1.0);
    assert_eq!(b.store.expectation()[i], 7.98);
    assert_eq!(b.store.labels()[1], "V(3,3)");
    assert!(matches!(sample_cov_beliefs(&q, 1), Err(Error::InvalidArgument(_))));
}

#[test]
fn known_matrix_has_no_covariance_with_sample() {
    let coords = SymCoords::canonical(2);
    let u = mvn_fourth_moments(&DMatrix::identity(2, 2)).unwrap().distinct;
    let q = QuadraticModel::new(coords, DMatrix::zeros(3, 3), u.clone(), DMatrix::identity(2, 2)).unwrap();
    let b = sample_cov_beliefs(&q, 4).unwrap();
    let cov = b.store.var_of(&b.s_subspace(0));
    assert!((cov - &u / 4.0).amax() < 1e-15);
    let cross = b.store.cov_of(&b.v_subspace(), &b.s_subspace(0));
    assert_eq!(cross.amax(), 0.0);
}

#[test]
fn disjoint_samples_share_only_the_underlying_matrix() {
    let q = elicited_model();
    let b = sample_cov_beliefs_multi(&q, &[10, 20]).unwrap();
    let cross = b.store.cov_of(&b.s_subspace(0), &b.s_subspace(1));
    assert!((cross - elicited_var_v()).amax() < 1e-12);
    assert!(b.store.index_of("S2(2,3)").is_ok());
}

#[test]
fn sample_variance_decreases_with_sample_size() {
    let q = elicited_model();
    let small = sample_cov_beliefs(&q, 5).unwrap();
    let large = sample_cov_beliefs(&q, 50).unwrap();
    let a = small.store.var_of(&small.s_subspace(0));
    let b = large.store.var_of(&large.s_subspace(0));
    for i in 0..6 {
        assert!(b[(i, i)] <= a[(i, i)]);
    }
}

#[test]
fn elicited_adjustment_reproduces_full_collection_result() {
    let printed = DMatrix::from_row_slice(3, 3, &[8.30, 15.43, 20.06, 15.43, 92.04, 80.66, 20.06, 80.66, 156.79]);
    let q = elicited_model();
    let adj = quadratic_adjust(&q, &observed_s(), 34).unwrap();
    let dev = (&adj.adjusted - &printed).amax();
    assert!(dev <= 0.1, "max deviation {dev}");
    let closed = quadratic_adjust_closed_form(&q, &observed_s(), 34).unwrap();
    assert!((closed - &adj.adjusted).amax() < 1e-8);
}

#[test]
fn trivial_quadratic_adjustments() {
    let q = elicited_model();
    let same = quadratic_adjust(&q, &prior_v(), 34).unwrap();
    assert!((same.adjusted - prior_v()).amax() < 1e-10);
    let exact = QuadraticModel::new(elicited_coords(), elicited_var_v(), DMatrix::zeros(6, 6), prior_v()).unwrap();
    let r = quadratic_adjust(&exact, &observed_s(), 34).unwrap();
    assert!((r.adjusted - observed_s()).amax() < 1e-8);
}

#[test]
fn exchangeable_decomposition() {
    let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    let (m, r) = exchangeable_decompose(&sigma, &DMatrix::zeros(2, 2)).unwrap();
    assert_eq!(m, DMatrix::zeros(2, 2));
    assert_eq!(r, sigma);
    let (m, r) = exchangeable_decompose(&sigma, &sigma).unwrap();
    assert_eq!(m, sigma);
    assert_eq!(r, DMatrix::zeros(2, 2));
    let model = ExchangeableModel::new(sigma.clone(), &sigma * 0.25).unwrap();
    assert!((model.residual_var() - &sigma * 0.75).amax() < 1e-15);
}

#[test]
fn incoherent_exchangeable_specification_names_eigenvalue() {
    // Sigma with eigenvalues 3 and 1; delta has eigenvalue 2 along the second.
    let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
    let delta = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
    match exchangeable_decompose(&sigma, &delta) {
        Err(Error::NotNnd { eigenvalue, .. }) => {
            // Oracle: sigma − delta = [[1,2],[2,1]] has eigenvalues 3 and −1.
            assert!((eigenvalue + 1.0).abs() < 1e-12);
        }
        other => panic!("unexpected {other:?}"),
    }
}

/// Normal residuals with fixed covariance, a known zero mean, and the
/// sample second-moment matrix `(1/n)ΣR_kR_kᵀ`.
fn simulate_sample_moments(v: &DMatrix<f64>, n: usize, reps: usize, centred: bool, seed: u64) -> Vec<[f64; 3]> {
    let l = v.clone().cholesky().unwrap().l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(reps);
    for _ in 0..reps {
        let xs: Vec<DVector<f64>> = (0..n)
            .map(|_| &l * DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let mean = if centred {
            xs.iter().fold(DVector::zeros(2), |a, x| a + x) / n as f64
        } else {
            DVector::zeros(2)
        };
        let mut s = DMatrix::zeros(2, 2);
        for x in &xs {
            let c = x - &mean;
            s += &c * c.transpose();
        }
        s /= if centred { (n - 1) as f64 } else { n as f64 };
        out.push([s[(0, 0)], s[(1, 1)], s[(0, 1)]]);
    }
    out
}

fn variance_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let var = sq.iter().sum::<f64>() / (n - 1.0);
    let sd_sq = (sq.iter().map(|s| (s - var).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    (var, sd_sq / n.sqrt())
}

#[test]
fn monte_carlo_known_mean_second_moments_match_closed_form() {
    let v = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 2.0]);
    let q = QuadraticModel::mvn_auto(SymCoords::canonical(2), DMatrix::zeros(3, 3), v.clone()).unwrap();
    let n = 5;
    let beliefs = sample_cov_beliefs(&q, n).unwrap();
    let var_s = beliefs.store.var_of(&beliefs.s_subspace(0));
    let draws = simulate_sample_moments(&v, n, 100_000, false, 31);
    for c in 0..3 {
        let xs: Vec<f64> = draws.iter().map(|d| d[c]).collect();
        let (emp, se) = variance_and_se(&xs);
        assert!(
            (emp - var_s[(c, c)]).abs() < 3.0 * se,
            "coordinate {c}: empirical {emp} vs {} (se {se})",
            var_s[(c, c)]
        );
    }
}

#[test]
fn monte_carlo_centred_estimator_has_divisor_n_minus_one() {
    // Normal-theory oracle for the unbiased estimator: Var(S_ij) = (v_ii v_jj + v_ij²)/(n − 1).
    let v = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 2.0]);
    let n = 5;
    let draws = simulate_sample_moments(&v, n, 100_000, true, 32);
    let pairs = [(0, 0), (1, 1), (0, 1)];
    for (c, &(i, j)) in pairs.iter().enumerate() {
        let xs: Vec<f64> = draws.iter().map(|d| d[c]).collect();
        let (emp, se) = variance_and_se(&xs);
        let oracle = (v[(i, i)] * v[(j, j)] + v[(i, j)].powi(2)) / (n - 1) as f64;
        assert!((emp - oracle).abs() < 3.0 * se, "coordinate {c}: {emp} vs {oracle}");
    }
}

fn diag_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..10.0, d)
}

proptest! {
    /// With diagonal specifications every coordinate moves part of the way
    /// from its prior value to the observed value.
    #[test]
    fn diagonal_adjustment_interpolates(
        vv in diag_strategy(3),
        vu in diag_strategy(3),
        obs in prop::collection::vec(-5.0f64..5.0, 3),
        n in 2usize..40,
    ) {
        let coords = SymCoords::canonical(2);
        let ev = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let q = QuadraticModel::new(
            coords.clone(),
            DMatrix::from_diagonal(&DVector::from_vec(vv)),
            DMatrix::from_diagonal(&DVector::from_vec(vu)),
            ev.clone(),
        ).unwrap();
        let s = coords.from_half(&DVector::from_vec(obs)).unwrap();
        let adj = quadratic_adjust(&q, &s, n).unwrap();
        for &(i, j) in coords.pairs() {
            let lo = ev[(i, j)].min(s[(i, j)]) - 1e-12;
            let hi = ev[(i, j)].max(s[(i, j)]) + 1e-12;
            prop_assert!(adj.adjusted[(i, j)] >= lo && adj.adjusted[(i, j)] <= hi);
        }
    }
}

#[test]
fn coordinate_round_trip() {
    let coords = SymCoords::canonical(3);
    assert_eq!(coords.pairs()[3], (0, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let a = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
    let s = &a + a.transpose();
    assert_eq!(coords.from_half(&coords.half_vec(&s).unwrap()).unwrap(), s);
    let dup = coords.duplication();
    let h = coords.half_vec(&s).unwrap();
    assert!((dup * h - bayeslin_exchange::vec(&s)).amax() < 1e-15);
    assert!(SymCoords::custom(2, vec![(0, 0), (0, 0), (1, 1)]).is_err());
}
