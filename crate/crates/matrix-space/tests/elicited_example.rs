use std::collections::HashMap;

use bayeslin_core::{linalg::pinv_sym, BeliefStore};
use bayeslin_exchange::{quadratic_adjust, sample_cov_beliefs, QuadraticModel, SymCoords};
use bayeslin_matrix::{
    adjust_matrix, build_collections, individual_collection, resolution, upper_pairs, ConstantBasis, MatrixObject,
    MatrixSpace, Weighting,
};
use nalgebra::{DMatrix, DVector};

fn coords() -> SymCoords {
    SymCoords::custom(3, vec![(0, 0), (2, 2), (1, 1), (0, 2), (0, 1), (1, 2)]).unwrap()
}

fn var_v() -> DMatrix<f64> {
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

fn var_u() -> DMatrix<f64> {
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

fn prior() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[7.98, 11.14, 15.75, 11.14, 56.26, 53.04, 15.75, 53.04, 100.00])
}

fn observed() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[8.28, 20.15, 24.75, 20.15, 178.30, 160.74, 24.75, 160.74, 258.26],
    )
}

fn model() -> QuadraticModel {
    QuadraticModel::new(coords(), var_v(), var_u(), prior()).unwrap()
}

fn grid_object(store: &BeliefStore, name: &str, prefix: &str) -> MatrixObject {
    let idx: Vec<Vec<usize>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    store
                        .index_of(&format!("{prefix}({},{})", i.min(j) + 1, i.max(j) + 1))
                        .unwrap()
                })
                .collect()
        })
        .collect();
    MatrixObject::from_indices(name, &idx, true)
}

struct Setup {
    space: MatrixSpace,
    ds: Vec<String>,
    di: Vec<String>,
    df: Vec<String>,
    obs: HashMap<String, f64>,
}

fn setup(weighting: Weighting) -> Setup {
    let beliefs = sample_cov_beliefs(&model(), 34).unwrap();
    let store = beliefs.store.clone();
    let v = grid_object(&store, "V", "V");
    let s = grid_object(&store, "S", "S");
    let cols = build_collections(&s, &upper_pairs(3)).unwrap();
    let names = |v: &[MatrixObject]| v.iter().map(|o| o.name.clone()).collect::<Vec<_>>();
    let (ds, di, df) = (names(&cols.single), names(&cols.individual), names(&cols.full));
    let vi = individual_collection(&v, &upper_pairs(3)).unwrap();
    let space = MatrixSpace::builder(Some(store.clone()), weighting)
        .object(v)
        .objects(cols.single)
        .objects(cols.individual)
        .objects(cols.full)
        .objects(vi)
        .build()
        .unwrap();
    let c = coords();
    let sv = c.half_vec(&observed()).unwrap();
    let obs = (0..6).map(|k| (c.label("S", k), sv[k])).collect();
    Setup { space, ds, di, df, obs }
}

fn realize(s: &Setup, names: &[String]) -> DMatrix<f64> {
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let adj = adjust_matrix(&s.space, "V", &refs, &ConstantBasis::symmetric(3)).unwrap();
    let obs: Vec<DMatrix<f64>> = names.iter().map(|n| s.space.observe(n, &s.obs).unwrap()).collect();
    adj.realize(&obs).unwrap()
}

#[test]
fn single_object_adjustment_matches_printed() {
    let s = setup(Weighting::FullTrace);
    let refs: Vec<&str> = s.ds.iter().map(|x| x.as_str()).collect();
    let adj = adjust_matrix(&s.space, "V", &refs, &ConstantBasis::symmetric(3)).unwrap();
    let alpha = adj.coefficients[0];
    assert!((0.32..=0.34).contains(&alpha), "alpha {alpha}");
    let printed = DMatrix::from_row_slice(3, 3, &[8.08, 14.08, 18.69, 14.08, 96.08, 88.18, 18.69, 88.18, 151.65]);
    let got = realize(&s, &s.ds);
    assert!((&got - &printed).amax() <= 0.1, "{got}");
    // The adjusted matrix is (1 − α)E(V) + αS.
    assert!((got - (prior() * (1.0 - alpha) + observed() * alpha)).amax() < 1e-9);
}

#[test]
fn single_object_resolution_equals_alpha_from_closed_form() {
    // Oracle: α = Σ n Var(V_ij) / Σ {n Var(V_ij) + Var(U_ij)} over all ordered (i, j).
    let c = coords();
    let n = 34.0;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            let k = c.index_of(i, j);
            num += n * var_v()[(k, k)];
            den += n * var_v()[(k, k)] + var_u()[(k, k)];
        }
    }
    let alpha = num / den;
    assert!((alpha - 0.326).abs() < 5e-4);
    let s = setup(Weighting::FullTrace);
    let refs: Vec<&str> = s.ds.iter().map(|x| x.as_str()).collect();
    let res = resolution(&s.space, "V", &refs).unwrap();
    assert!((res - alpha).abs() < 1e-10);
    let adj = adjust_matrix(&s.space, "V", &refs, &ConstantBasis::symmetric(3)).unwrap();
    assert!((adj.coefficients[0] - alpha).abs() < 1e-10);
    assert!((adj.resolution - alpha).abs() < 1e-10);
}

#[test]
fn individual_and_full_collections_match_printed() {
    let s = setup(Weighting::FullTrace);
    let di = DMatrix::from_row_slice(3, 3, &[8.04, 15.96, 17.72, 15.96, 98.90, 78.63, 17.72, 78.63, 159.21]);
    let df = DMatrix::from_row_slice(3, 3, &[8.30, 15.43, 20.06, 15.43, 92.04, 80.66, 20.06, 80.66, 156.79]);
    let got_i = realize(&s, &s.di);
    assert!((&got_i - &di).amax() <= 0.15, "{got_i}");
    let got_f = realize(&s, &s.df);
    assert!((&got_f - &df).amax() <= 0.1, "{got_f}");
    let scalar = quadratic_adjust(&model(), &observed(), 34).unwrap().adjusted;
    assert!((got_f - scalar).amax() < 1e-8);
}

#[test]
fn full_collection_equals_scalar_adjustment_under_either_weighting() {
    let s = setup(Weighting::Distinct);
    let scalar = quadratic_adjust(&model(), &observed(), 34).unwrap().adjusted;
    assert!((realize(&s, &s.df) - scalar).amax() < 1e-8);
}

#[test]
fn resolutions_are_nested() {
    let s = setup(Weighting::FullTrace);
    let r = |names: &[String]| {
        let refs: Vec<&str> = names.iter().map(|x| x.as_str()).collect();
        resolution(&s.space, "V", &refs).unwrap()
    };
    let mut both = s.ds.clone();
    both.extend(s.di.iter().cloned());
    let (a, b, c) = (r(&s.ds), r(&both), r(&s.df));
    assert!(a <= b + 1e-10 && b <= c + 1e-10, "{a} {b} {c}");
}

#[test]
fn block_elimination_agrees_with_literal_normal_equations() {
    for weighting in [Weighting::FullTrace, Weighting::Distinct] {
        let s = setup(weighting);
        for names in [&s.ds, &s.di, &s.df] {
            let basis = ConstantBasis::symmetric(3);
            let refs: Vec<&str> = names.iter().map(|x| x.as_str()).collect();
            let p = refs.len();
            let q = basis.len();
            // Oracle: one Gram over collection ∪ constants, inverted whole.
            let mut g = DMatrix::zeros(p + q, p + q);
            let mut rhs = DVector::zeros(p + q);
            for a in 0..p {
                for b in 0..p {
                    g[(a, b)] = s.space.inner_product(refs[a], refs[b]).unwrap();
                }
                for b in 0..q {
                    let v = s.space.inner_with_constant(refs[a], &basis.matrices[b]).unwrap();
                    g[(a, p + b)] = v;
                    g[(p + b, a)] = v;
                }
                rhs[a] = s.space.inner_product(refs[a], "V").unwrap();
            }
            for a in 0..q {
                for b in 0..q {
                    g[(p + a, p + b)] = weighting.pair(&basis.matrices[a], &basis.matrices[b]);
                }
                rhs[p + a] = s.space.inner_with_constant("V", &basis.matrices[a]).unwrap();
            }
            let coef = pinv_sym(&g, 1e-10) * rhs;
            let mut literal = DMatrix::zeros(3, 3);
            for a in 0..p {
                literal += s.space.observe(refs[a], &s.obs).unwrap() * coef[a];
            }
            for b in 0..q {
                literal += &basis.matrices[b] * coef[p + b];
            }
            let got = realize(&s, names);
            assert!((&got - &literal).amax() < 1e-6 * literal.amax(), "{got} vs {literal}");
        }
    }
}

#[test]
fn constants_alone_return_the_expectation() {
    let s = setup(Weighting::FullTrace);
    let adj = adjust_matrix(&s.space, "V", &[], &ConstantBasis::symmetric(3)).unwrap();
    assert!((adj.realize(&[]).unwrap() - prior()).amax() < 1e-10);
    let adj = adjust_matrix(&s.space, "V", &[], &ConstantBasis::full(3)).unwrap();
    assert!((adj.realize(&[]).unwrap() - prior()).amax() < 1e-10);
}

#[test]
fn a_member_of_the_collection_projects_to_itself() {
    let s = setup(Weighting::FullTrace);
    let adj = adjust_matrix(&s.space, "S", &["S", "S[1,1]"], &ConstantBasis::symmetric(3)).unwrap();
    let obs = vec![observed(), s.space.observe("S[1,1]", &s.obs).unwrap()];
    assert!((adj.realize(&obs).unwrap() - observed()).amax() < 1e-8);
    assert!((adj.resolution - 1.0).abs() < 1e-10);
}
