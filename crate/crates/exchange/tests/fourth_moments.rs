use bayeslin_exchange::{mvn_fourth_moments, mvn_fourth_moments_in, vec_permutation, SymCoords};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Expectation of a product of zero-mean normal variables by summing over
/// every perfect pairing of the factors.
fn isserlis(cov: &DMatrix<f64>, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    if idx.len() % 2 == 1 {
        return 0.0;
    }
    let first = idx[0];
    let rest = &idx[1..];
    let mut total = 0.0;
    for p in 0..rest.len() {
        let remaining: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != p)
            .map(|(_, &v)| v)
            .collect();
        total += cov[(first, rest[p])] * isserlis(cov, &remaining);
    }
    total
}

/// `Var(vec(XXᵀ))` from the pairing enumeration.
fn isserlis_full(cov: &DMatrix<f64>) -> DMatrix<f64> {
    let r = cov.nrows();
    DMatrix::from_fn(r * r, r * r, |u, v| {
        let (j, l) = (u % r, u / r);
        let (k, m) = (v % r, v / r);
        isserlis(cov, &[j, l, k, m]) - cov[(j, l)] * cov[(k, m)]
    })
}

fn random_spd(rng: &mut ChaCha8Rng, r: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(r, r, |_, _| rng.random_range(-2.0..2.0));
    &a * a.transpose()
}

#[test]
fn scalar_case() {
    let fm = mvn_fourth_moments(&DMatrix::from_element(1, 1, 1.0)).unwrap();
    assert_eq!(fm.full[(0, 0)], 2.0);
    let fm = mvn_fourth_moments(&DMatrix::from_element(1, 1, 3.0)).unwrap();
    assert_eq!(fm.full[(0, 0)], 18.0);
}

#[test]
fn product_of_correlated_pair() {
    for rho in [-0.9, -0.3, 0.0, 0.5, 0.99] {
        let v = DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]);
        let fm = mvn_fourth_moments(&v).unwrap();
        let c = fm.coords.index_of(0, 1);
        assert!((fm.distinct[(c, c)] - (1.0 + rho * rho)).abs() < 1e-14);
        assert!((fm.distinct[(c, c)] - isserlis_full(&v)[(2, 2)]).abs() < 1e-14);
    }
}

#[test]
fn matches_pairing_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for r in 1..=3 {
        for _ in 0..20 {
            let v = random_spd(&mut rng, r);
            let fm = mvn_fourth_moments(&v).unwrap();
            let oracle = isserlis_full(&v);
            assert!((&fm.full - &oracle).amax() < 1e-10);
            let p = vec_permutation(r, r);
            assert!((&p * &fm.full * &p - &fm.full).amax() < 1e-12);
            // Compression picks the entries for the distinct pairs.
            for (a, &(i, j)) in fm.coords.pairs().iter().enumerate() {
                for (b, &(k, l)) in fm.coords.pairs().iter().enumerate() {
                    assert_eq!(fm.distinct[(a, b)], fm.full[(i + r * j, k + r * l)]);
                }
            }
            let expanded = fm.coords.expand(&fm.distinct).unwrap();
            assert!((expanded - &fm.full).amax() < 1e-12);
        }
    }
}

#[test]
fn rejects_indefinite_input() {
    let v = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(mvn_fourth_moments(&v).is_err());
}

/// Order A, E, X of the three series; distinct order AA, XX, EE, AX, AE, EX.
fn elicited_coords() -> SymCoords {
    SymCoords::custom(3, vec![(0, 0), (2, 2), (1, 1), (0, 2), (0, 1), (1, 2)]).unwrap()
}

#[test]
fn prior_covariance_gives_printed_residual_matrix() {
    let ev = DMatrix::from_row_slice(3, 3, &[7.98, 11.14, 15.75, 11.14, 56.26, 53.04, 15.75, 53.04, 100.00]);
    let printed = DMatrix::from_row_slice(
        6,
        6,
        &[
            127.0, 496.0, 248.0, 251.0, 178.0, 351.0, //
            496.0, 19997.0, 5626.0, 3150.0, 1670.0, 10607.0, //
            248.0, 5626.0, 6332.0, 1182.0, 1254.0, 5969.0, //
            251.0, 3150.0, 1182.0, 1046.0, 599.0, 1949.0, //
            178.0, 1671.0, 1254.0, 599.0, 573.0, 1477.0, //
            351.0, 10607.0, 5969.0, 1949.0, 1477.0, 8439.0,
        ],
    );
    let fm = mvn_fourth_moments_in(&ev, elicited_coords()).unwrap();
    let dev = (&fm.distinct - &printed).amax();
    assert!(dev <= 5.0, "max deviation {dev}");
}
