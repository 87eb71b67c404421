//! Loading, validating and saving specification documents and series.

use std::path::{Path, PathBuf};

use bayeslin_cli::spec::{CovarianceSection, Options, WeightingName};
use bayeslin_cli::{load_csv, load_spec, parse_csv, parse_spec, save_spec, Error, SpecDocument};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn bundled_documents_round_trip_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["elicited.json", "six-series.json", "synthetic.json"] {
        let doc = load_spec(data(name)).unwrap();
        let once = dir.path().join(format!("once-{name}"));
        save_spec(&doc, &once).unwrap();
        let reloaded = load_spec(&once).unwrap();
        assert_eq!(reloaded, doc);
        let twice = dir.path().join(format!("twice-{name}"));
        save_spec(&reloaded, &twice).unwrap();
        assert_eq!(std::fs::read(&once).unwrap(), std::fs::read(&twice).unwrap(), "{name}");
    }
}

#[test]
fn cholesky_section_gives_the_factor_times_its_transpose() {
    let doc = load_spec(data("elicited.json")).unwrap();
    let Some(CovarianceSection::Cholesky(rows)) = &doc.covariance else {
        panic!("the elicited example uses a factor")
    };
    // Oracle: Σ_ij = Σ_k L_ik L_jk over the ragged lower-triangular rows.
    let n = rows.len();
    let at = |i: usize, k: usize| rows[i].get(k).copied().unwrap_or(0.0);
    let cov = doc.covariance_matrix().unwrap().unwrap();
    for i in 0..n {
        for j in 0..n {
            let want: f64 = (0..n).map(|k| at(i, k) * at(j, k)).sum();
            assert!((cov[(i, j)] - want).abs() < 1e-12, "({i},{j})");
        }
    }
    let store = doc.belief_store().unwrap().unwrap();
    assert_eq!(store.labels()[2], "V_XX");
}

#[test]
fn six_series_document_gives_the_exact_pattern_table() {
    let doc = load_spec(data("six-series.json")).unwrap();
    let (r, table) = doc.pattern_spec().unwrap();
    assert_eq!(r, 6);
    assert_eq!(table, bayeslin_moments::script::example_spec());
}

#[test]
fn parse_errors_carry_line_and_column() {
    let text = "{\n  \"quantities\": [\"a\",\n  \"b\" \"c\"]\n}";
    match parse_spec(text, "doc.json") {
        Err(Error::Parse {
            origin, line, column, ..
        }) => {
            assert_eq!(origin, "doc.json");
            assert_eq!(line, 3);
            assert!(column > 1);
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let err = parse_spec(r#"{"covariance": {"dense": [[1.0]]}, "colour": "red"}"#, "doc").unwrap_err();
    assert!(err.to_string().contains("colour"), "{err}");
}

#[test]
fn indefinite_covariance_names_the_eigenvalue() {
    let err = parse_spec(r#"{"covariance": {"dense": [[2.0, 3.0], [3.0, 2.0]]}}"#, "doc").unwrap_err();
    assert!(err.to_string().contains("-1"), "{err}");
}

#[test]
fn dimension_mismatches_are_rejected() {
    let cases = [
        r#"{"covariance": {"dense": [[1.0, 0.0], [0.0]]}}"#,
        r#"{"covariance": {"dense": [[1.0, 0.0]]}}"#,
        r#"{"expectation": [1.0], "covariance": {"dense": [[1.0, 0.0], [0.0, 1.0]]}}"#,
        r#"{"covariance": {"cholesky": [[1.0, 2.0], [1.0, 1.0]]}}"#,
        r#"{"expectation": [1.0]}"#,
    ];
    for text in cases {
        assert!(parse_spec(text, "doc").is_err(), "{text}");
    }
}

#[test]
fn asymmetric_covariance_is_rejected() {
    assert!(parse_spec(r#"{"covariance": {"dense": [[1.0, 0.5], [0.4, 1.0]]}}"#, "doc").is_err());
}

#[test]
fn dlm_sections_are_checked_for_shape() {
    let mut text = std::fs::read_to_string(data("synthetic.json")).unwrap();
    text = text.replacen("\"mu0\": [\n      0.0,\n      0.0\n    ]", "\"mu0\": [0.0]", 1);
    assert!(text.contains("\"mu0\": [0.0]"));
    assert!(parse_spec(&text, "doc").is_err());
}

#[test]
fn csv_rows_are_sorted_and_validated() {
    let s = parse_csv("t, a, b\n3, 1.5, 2\n1, 0, 0\n2, -1e-3, 4\n", "s.csv").unwrap();
    assert_eq!(s.times, vec![1, 2, 3]);
    assert_eq!(s.names, vec!["a", "b"]);
    assert_eq!(s.values[1].as_slice(), &[-1e-3, 4.0]);
    assert_eq!(s.values[2].as_slice(), &[1.5, 2.0]);

    let err = |text: &str| parse_csv(text, "s.csv").unwrap_err().to_string();
    assert!(err("t,a\n1,0\n1,2\n").contains("duplicate time 1 on lines 2 and 3"));
    assert!(err("t,a,b\n1,0,\n").contains("line 2: missing value for `b`"));
    assert!(err("t,a,b\n1,0\n").contains("s.csv"));
    assert!(err("t,a\n1,NaN\n").contains("non-finite"));
    assert!(err("t,a\n1,x\n").contains("not a number"));
    assert!(err("t,a\n1.5,0\n").contains("not an integer"));
    assert!(err("time,a\n1,0\n").contains("first column"));
    assert!(err("t\n1\n").contains("no series"));
}

#[test]
fn csv_files_are_read_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    std::fs::write(&path, "t,x\n1,2\n2,3\n").unwrap();
    let s = load_csv(&path).unwrap();
    assert_eq!(s.len(), 2);
    assert!(s.require_consecutive().is_ok());
    assert!(load_csv(dir.path().join("missing.csv")).is_err());
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn document_strategy() -> impl Strategy<Value = SpecDocument> {
    (1usize..5)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(-100.0f64..100.0, n * n),
                prop::collection::vec(-1e6f64..1e6, n),
                any::<bool>(),
                prop::option::of(prop_oneof![
                    Just(WeightingName::FullTrace),
                    Just(WeightingName::Distinct)
                ]),
                prop::option::of(1.5f64..50.0),
            )
        })
        .prop_map(|(n, a, mean, named, weighting, scale)| {
            let a = DMatrix::from_row_slice(n, n, &a);
            let cov = &a * a.transpose() + DMatrix::identity(n, n);
            let rows = if named {
                CovarianceSection::Dense(matrix_rows(&cov))
            } else {
                let chol = cov.clone().cholesky().expect("positive definite").l();
                CovarianceSection::Cholesky((0..n).map(|i| (0..=i).map(|j| chol[(i, j)]).collect()).collect())
            };
            SpecDocument {
                quantities: named.then(|| (0..n).map(|i| format!("q{i}")).collect()),
                expectation: Some(mean),
                covariance: Some(rows),
                options: (weighting.is_some() || scale.is_some()).then_some(Options {
                    weighting,
                    tolerances: None,
                    shading_scale: scale,
                }),
                ..SpecDocument::default()
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_the_identity(doc in document_strategy()) {
        let text = doc.to_canonical_string();
        let back = parse_spec(&text, "generated").unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_canonical_string(), text);
    }
}
