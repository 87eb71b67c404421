//! Command-line behaviour, exercised through the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bayeslin_cli::ReportDocument;
use nalgebra::DMatrix;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bayeslin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn run_err(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    assert!(out.stdout.is_empty(), "failed commands write nothing to stdout");
    String::from_utf8(out.stderr).expect("utf-8 diagnostics")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Compares against a stored file; `BAYESLIN_BLESS=1` rewrites it.
fn check_golden(name: &str, got: &str) {
    let path = golden(name);
    if std::env::var_os("BAYESLIN_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(got, want, "output differs from {name}");
}

/// Compares TSV tables cell by cell; numeric cells to a relative tolerance.
fn check_golden_tsv(name: &str, got: &str, rel: f64) {
    let path = golden(name);
    if std::env::var_os("BAYESLIN_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    let (gl, wl): (Vec<_>, Vec<_>) = (got.lines().collect(), want.lines().collect());
    assert_eq!(gl.len(), wl.len(), "line count of {name}");
    for (g, w) in gl.iter().zip(&wl) {
        let (gc, wc): (Vec<_>, Vec<_>) = (g.split('\t').collect(), w.split('\t').collect());
        assert_eq!(gc.len(), wc.len(), "{g} vs {w}");
        for (a, b) in gc.iter().zip(&wc) {
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => assert!((x - y).abs() <= rel * y.abs().max(1e-300) + 1e-15, "{a} vs {b}"),
                _ => assert_eq!(a, b),
            }
        }
    }
}

fn write_series(dir: &Path, name: &str, rows: &[(i64, f64, f64)]) -> PathBuf {
    let path = dir.join(name);
    let mut text = String::from("t,a,b\n");
    for (t, a, b) in rows {
        text.push_str(&format!("{t},{a},{b}\n"));
    }
    std::fs::write(&path, text).unwrap();
    path
}

/// A two-series random walk observed with noise, from a fixed seed.
fn synthetic_csv(dir: &Path, t: usize) -> PathBuf {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let mut z = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut level = [0.0, 0.0];
    let rows: Vec<(i64, f64, f64)> = (1..=t as i64)
        .map(|k| {
            level[0] += 1.4 * z();
            level[1] += 1.2 * z();
            (k, level[0] + z(), level[1] + 1.1 * z())
        })
        .collect();
    write_series(dir, "series.csv", &rows)
}

fn printed_full_adjustment() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[8.30, 15.43, 20.06, 15.43, 92.04, 80.66, 20.06, 80.66, 156.79])
}

fn adjust_args<'a>(collection: &'a str, out: &'a str) -> Vec<&'a str> {
    let mut args = adjust_to_stdout(collection);
    args.extend(["--out", out]);
    args
}

fn adjust_to_stdout(collection: &str) -> Vec<&str> {
    vec![
        "adjust",
        "--spec",
        path_str_static(&ELICITED),
        "--sample",
        path_str_static(&SAMPLE),
        "--n",
        "34",
        "--collection",
        collection,
    ]
}

static ELICITED: std::sync::LazyLock<PathBuf> = std::sync::LazyLock::new(|| data("elicited.json"));
static SAMPLE: std::sync::LazyLock<PathBuf> = std::sync::LazyLock::new(|| data("elicited-sample.json"));
static SIX: std::sync::LazyLock<PathBuf> = std::sync::LazyLock::new(|| data("six-series.json"));
static SYNTHETIC: std::sync::LazyLock<PathBuf> = std::sync::LazyLock::new(|| data("synthetic.json"));

fn path_str_static(p: &'static std::sync::LazyLock<PathBuf>) -> &'static str {
    path_str(p)
}

#[test]
fn full_adjustment_report_matches_printed_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("full.json");
    run_ok(&adjust_args("full", path_str(&out)));
    let report = ReportDocument::load(&out).unwrap();
    let got = report.matrix("V|full").unwrap().effective().unwrap();
    let err = (&got - printed_full_adjustment()).amax();
    assert!(err <= 0.1, "max deviation {err}");
}

#[test]
fn adjustment_report_records_nested_resolutions_on_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("full.json");
    run_ok(&adjust_args("full", path_str(&out)));
    let report = ReportDocument::load(&out).unwrap();
    let v = report.nodes.iter().find(|n| n.name == "V").unwrap();
    assert_eq!(v.resolutions.len(), 3);
    let cumulative: Vec<f64> = v
        .resolutions
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r;
            Some(*acc)
        })
        .collect();
    assert!(cumulative.windows(2).all(|w| w[1] > w[0]), "{cumulative:?}");
    // Each cumulative value equals the lone resolution of the matching nested
    // collection, because the collections are nested.
    let single = report
        .resolutions
        .iter()
        .find(|r| r.collection == "sample")
        .unwrap()
        .value;
    let full = report
        .resolutions
        .iter()
        .find(|r| r.collection == "full")
        .unwrap()
        .value;
    assert!((cumulative[0] - single).abs() < 1e-10);
    assert!((cumulative[2] - full).abs() < 1e-10);
    assert!(*cumulative.last().unwrap() <= 1.0);
}

#[test]
fn smaller_collections_stop_early() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sample.json");
    run_ok(&adjust_args("sample", path_str(&out)));
    let report = ReportDocument::load(&out).unwrap();
    assert!(report.matrix("V|sample").is_ok());
    assert!(report.matrix("V|individual").is_err());
    assert_eq!(report.nodes[0].resolutions.len(), 1);
}

#[test]
fn weighting_flag_changes_only_partial_collections() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    run_ok(&adjust_args("full", path_str(&a)));
    let mut args = adjust_args("full", path_str(&b));
    args.extend(["--weighting", "distinct"]);
    run_ok(&args);
    let (ra, rb) = (ReportDocument::load(&a).unwrap(), ReportDocument::load(&b).unwrap());
    let m = |r: &ReportDocument, n: &str| r.matrix(n).unwrap().effective().unwrap();
    assert!((m(&ra, "V|full") - m(&rb, "V|full")).amax() < 1e-8);
    assert!((m(&ra, "V|sample") - m(&rb, "V|sample")).amax() > 1e-6);
}

#[test]
fn eigen_tables_match_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("full.json");
    let tsv = dir.path().join("eigen.tsv");
    let mut args = adjust_args("full", path_str(&out));
    args.extend(["--tsv", path_str(&tsv)]);
    run_ok(&args);
    let text = std::fs::read_to_string(&tsv).unwrap();
    check_golden_tsv("elicited-eigen.tsv", &text, 1e-10);
    // Columns: component index, eigenvalue, one entry per quantity.
    for line in text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("component"))
    {
        assert_eq!(line.split('\t').count(), 5, "{line}");
    }
}

#[test]
fn derived_moments_match_golden_file_and_printed_constants() {
    let text = run_ok(&["derive-moments", "--spec", path_str(&SIX)]);
    check_golden("six-series-moments.tsv", &text);
    let rational = |name: &str| -> String {
        text.lines()
            .find(|l| l.split('\t').next() == Some(name))
            .unwrap_or_else(|| panic!("{name} missing"))
            .split('\t')
            .nth(2)
            .unwrap()
            .to_string()
    };
    assert_eq!(rational("LS1"), "9/4");
    assert_eq!(rational("LD1"), "9/16");
    assert_eq!(rational("LS3"), "46273/4");
    assert_eq!(rational("LD3"), "83417/16");
    assert_eq!(rational("LS13"), "12830");
    assert_eq!(rational("LD13"), "233031/40");
    let printed = [
        "180",
        "30.375",
        "0",
        "225816.375",
        "45750.375",
        "750.375",
        "360",
        "30.375",
        "251753.25",
        "1471.5",
        "45841.5",
        "841.5",
        "360",
        "60.75",
        "58266.75",
        "58266.75",
        "45780.75",
        "45780.75",
        "780.75",
        "780.75",
    ];
    for (k, want) in printed.iter().enumerate() {
        let name = format!("C{:02}", k + 1);
        let value = text.lines().find(|l| l.starts_with(&format!("{name}\t"))).unwrap();
        assert_eq!(value.split('\t').nth(1), Some(*want), "{name}");
    }
    for (k, want) in ["54", "96", "246", "300"].iter().enumerate() {
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("CCC{}\t", k + 1)))
            .unwrap();
        assert_eq!(line.split('\t').nth(1), Some(*want));
    }
}

#[test]
fn symbolic_flag_adds_a_column() {
    let text = run_ok(&["derive-moments", "--spec", path_str(&SIX), "--symbolic"]);
    assert!(text.starts_with("name\tvalue\trational\tsymbolic\n"));
    let ls1 = text.lines().find(|l| l.starts_with("LS1\t")).unwrap();
    assert!(!ls1.split('\t').nth(3).unwrap().is_empty());
}

#[test]
fn derive_moments_needs_the_pattern_shorthand() {
    let err = run_err(&["derive-moments", "--spec", path_str(&SYNTHETIC)]);
    assert!(err.contains("pattern shorthand"), "{err}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synthetic_csv(dir.path(), 60);
    let a = run_ok(&adjust_to_stdout("full"));
    let b = run_ok(&adjust_to_stdout("full"));
    assert_eq!(a, b);
    for cmd in [
        vec!["dlm-adjust", "--spec", path_str(&SYNTHETIC), "--data", path_str(&csv)],
        vec![
            "dlm-filter",
            "--spec",
            path_str(&SYNTHETIC),
            "--data",
            path_str(&csv),
            "--readjust",
        ],
    ] {
        assert_eq!(run_ok(&cmd), run_ok(&cmd));
    }
}

#[test]
fn dlm_adjust_then_filter_with_adjusted_variances() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synthetic_csv(dir.path(), 200);
    let adjusted = dir.path().join("adjusted.json");
    run_ok(&[
        "dlm-adjust",
        "--spec",
        path_str(&SYNTHETIC),
        "--data",
        path_str(&csv),
        "--out",
        path_str(&adjusted),
    ]);
    let report = ReportDocument::load(&adjusted).unwrap();
    let w = report.matrix("W").unwrap().effective().unwrap();
    let v = report.matrix("V").unwrap().effective().unwrap();
    let res: Vec<f64> = report.resolutions.iter().map(|r| r.value).collect();
    assert!(res.iter().all(|r| *r > 0.0 && *r < 1.0), "{res:?}");

    let filtered = dir.path().join("filtered.json");
    run_ok(&[
        "dlm-filter",
        "--spec",
        path_str(&SYNTHETIC),
        "--data",
        path_str(&csv),
        "--use-adjusted",
        path_str(&adjusted),
        "--out",
        path_str(&filtered),
    ]);
    let f = ReportDocument::load(&filtered).unwrap();
    assert_eq!(f.timeline.len(), 200);
    assert!((f.matrix("V used").unwrap().effective().unwrap() - v).amax() == 0.0);
    assert!((f.matrix("W used").unwrap().effective().unwrap() - w).amax() == 0.0);
    assert!(f.timeline.iter().all(|e| (0.0..=1.0).contains(&e.shading)));
}

#[test]
fn through_limits_the_observations_used() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synthetic_csv(dir.path(), 100);
    let spec = path_str(&SYNTHETIC);
    let short = run_ok(&[
        "dlm-adjust",
        "--spec",
        spec,
        "--data",
        path_str(&csv),
        "--through",
        "40",
    ]);
    let long = run_ok(&["dlm-adjust", "--spec", spec, "--data", path_str(&csv)]);
    let (s, l) = (
        ReportDocument::from_json(&short, "short").unwrap(),
        ReportDocument::from_json(&long, "long").unwrap(),
    );
    assert_eq!(s.summary["observations"], 40.0);
    assert!(s.resolutions[0].value < l.resolutions[0].value);
    let err = run_err(&[
        "dlm-adjust",
        "--spec",
        spec,
        "--data",
        path_str(&csv),
        "--through",
        "101",
    ]);
    assert!(err.contains("exceeds"), "{err}");
}

#[test]
fn diagnose_rescales_shadings() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synthetic_csv(dir.path(), 80);
    let filtered = dir.path().join("filtered.json");
    run_ok(&[
        "dlm-filter",
        "--spec",
        path_str(&SYNTHETIC),
        "--data",
        path_str(&csv),
        "--out",
        path_str(&filtered),
    ]);
    let loose = ReportDocument::from_json(
        &run_ok(&["diagnose", "--report", path_str(&filtered), "--scale", "50"]),
        "d",
    )
    .unwrap();
    let tight = ReportDocument::from_json(
        &run_ok(&["diagnose", "--report", path_str(&filtered), "--scale", "2"]),
        "d",
    )
    .unwrap();
    assert_eq!(loose.summary["steps"], 80.0);
    for (a, b) in loose.timeline.iter().zip(&tight.timeline) {
        assert!(a.shading <= b.shading + 1e-15);
    }
    assert!(loose.summary["saturated_steps"] <= tight.summary["saturated_steps"]);
}

#[test]
fn dot_export_of_the_adjustment_matches_golden_file_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("full.json");
    run_ok(&adjust_args("full", path_str(&out)));
    let dot = run_ok(&["export-dot", "--report", path_str(&out)]);
    check_golden("elicited.dot", &dot);
    graphviz_rust::parse(&dot).expect("valid DOT");
    let v_line = dot.lines().find(|l| l.trim_start().starts_with("\"V\" [")).unwrap();
    let cumulative = v_line.split("cumulative=\"").nth(1).unwrap().split('"').next().unwrap();
    let values: Vec<f64> = cumulative.split('|').map(|x| x.parse().unwrap()).collect();
    assert_eq!(values.len(), 3);
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
}

#[test]
fn empty_report_gives_an_empty_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, "{}\n").unwrap();
    let dot = run_ok(&["export-dot", "--report", path_str(&path)]);
    let graph = graphviz_rust::parse(&dot).expect("valid DOT");
    match graph {
        graphviz_rust::dot_structures::Graph::DiGraph { stmts, .. } => {
            assert!(stmts.iter().all(|s| !matches!(
                s,
                graphviz_rust::dot_structures::Stmt::Node(_) | graphviz_rust::dot_structures::Stmt::Edge(_)
            )));
        }
        other => panic!("expected a digraph, got {other:?}"),
    }
}

#[test]
fn single_node_renders_its_increments_and_shading() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    std::fs::write(
        &path,
        r#"{"nodes": [{"name": "V", "kind": "target", "resolutions": [0.3, 0.1], "ratio": {"finite": 1.0}, "shading": 0.0}]}"#,
    )
    .unwrap();
    let dot = run_ok(&["export-dot", "--report", path_str(&path)]);
    graphviz_rust::parse(&dot).expect("valid DOT");
    assert!(dot.contains("resolutions=\"0.30|0.10\""), "{dot}");
    assert!(dot.contains("shading=\"0\""), "{dot}");
    // Diagnose recomputes the shading from the ratio: a ratio of one is unremarkable.
    let diagnosed = run_ok(&["diagnose", "--report", path_str(&path)]);
    let d = ReportDocument::from_json(&diagnosed, "d").unwrap();
    assert_eq!(d.nodes[0].shading, 0.0);
}

#[test]
fn malformed_reports_are_rejected_by_export() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"nodes": [{"name": "V", "kind": "target", "resolutions": [0.8, 0.3]}]}"#,
            "sum",
        ),
        (
            r#"{"nodes": [{"name": "V", "kind": "target"}], "arcs": [{"from": "D", "to": "V"}]}"#,
            "unknown node",
        ),
        (
            r#"{"nodes": [{"name": "V", "kind": "target"}, {"name": "V", "kind": "data"}]}"#,
            "twice",
        ),
        (
            r#"{"nodes": [{"name": "V", "kind": "target", "shading": 1.5}]}"#,
            "shading",
        ),
    ];
    for (k, (text, needle)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{k}.json"));
        std::fs::write(&path, text).unwrap();
        let err = run_err(&["export-dot", "--report", path_str(&path)]);
        assert!(err.contains("malformed report") && err.contains(needle), "{err}");
    }
}

#[test]
fn awkward_node_names_stay_valid_dot() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("names.json");
    std::fs::write(
        &path,
        r#"{"nodes": [{"name": "a \"quoted\" name", "kind": "target", "resolutions": [0.5]},
                      {"name": "back\\slash -> x", "kind": "data"}],
            "arcs": [{"from": "back\\slash -> x", "to": "a \"quoted\" name"}]}"#,
    )
    .unwrap();
    let dot = run_ok(&["export-dot", "--report", path_str(&path), "--rankdir", "TB"]);
    graphviz_rust::parse(&dot).expect("valid DOT");
    assert!(dot.contains("rankdir=TB;"));
}

#[test]
fn unknown_flags_and_conflicts_fail_with_diagnostics() {
    let err = run_err(&["adjust", "--bogus"]);
    assert!(err.contains("--bogus"), "{err}");
    run_err(&["no-such-command"]);
    run_err(&[
        "adjust",
        "--spec",
        path_str(&ELICITED),
        "--sample",
        path_str(&SAMPLE),
        "--n",
        "34",
        "--collection",
        "most",
    ]);
    let dir = tempfile::tempdir().unwrap();
    let csv = synthetic_csv(dir.path(), 20);
    let err = run_err(&[
        "dlm-filter",
        "--spec",
        path_str(&SYNTHETIC),
        "--data",
        path_str(&csv),
        "--readjust",
        "--use-adjusted",
        "x.json",
    ]);
    assert!(err.contains("cannot be combined"), "{err}");
}

#[test]
fn missing_files_are_reported_by_path() {
    let err = run_err(&["export-dot", "--report", "/nonexistent/report.json"]);
    assert!(err.contains("/nonexistent/report.json"), "{err}");
}

#[test]
fn series_rules_are_enforced_through_the_commands() {
    let dir = tempfile::tempdir().unwrap();
    let spec = path_str(&SYNTHETIC);
    let dup = write_series(dir.path(), "dup.csv", &[(1, 0.0, 0.0), (2, 1.0, 1.0), (2, 2.0, 2.0)]);
    let err = run_err(&["dlm-adjust", "--spec", spec, "--data", path_str(&dup)]);
    assert!(err.contains("duplicate time 2"), "{err}");

    let gap = write_series(
        dir.path(),
        "gap.csv",
        &[
            (1, 0.0, 0.0),
            (2, 1.0, 1.0),
            (4, 2.0, 2.0),
            (5, 2.0, 2.0),
            (6, 1.0, 0.0),
        ],
    );
    let err = run_err(&["dlm-adjust", "--spec", spec, "--data", path_str(&gap)]);
    assert!(err.contains("consecutive"), "{err}");

    let wide = dir.path().join("wide.csv");
    std::fs::write(&wide, "t,a,b,c\n1,0,0,0\n2,1,1,1\n").unwrap();
    let err = run_err(&["dlm-adjust", "--spec", spec, "--data", path_str(&wide)]);
    assert!(err.contains("3 series"), "{err}");
}

#[test]
fn unsorted_series_are_sorted_before_use() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<(i64, f64, f64)> = (1..=30)
        .map(|t| (t, (t as f64).sin() * 3.0, (t as f64 * 0.7).cos()))
        .collect();
    let sorted = write_series(dir.path(), "sorted.csv", &rows);
    let mut shuffled = rows.clone();
    shuffled.reverse();
    shuffled.swap(3, 17);
    let shuffled = write_series(dir.path(), "shuffled.csv", &shuffled);
    let spec = path_str(&SYNTHETIC);
    assert_eq!(
        run_ok(&["dlm-adjust", "--spec", spec, "--data", path_str(&sorted)]),
        run_ok(&["dlm-adjust", "--spec", spec, "--data", path_str(&shuffled)])
    );
}

#[test]
fn spec_errors_surface_with_positions_and_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let sample = path_str(&SAMPLE);
    let broken = dir.path().join("broken.json");
    std::fs::write(
        &broken,
        "{\n  \"covariance\": {\"dense\": [[1.0, 0.0],\n [0.0 1.0]]}\n}\n",
    )
    .unwrap();
    let err = run_err(&["adjust", "--spec", path_str(&broken), "--sample", sample, "--n", "4"]);
    assert!(err.contains("line 3, column"), "{err}");

    let indefinite = dir.path().join("indefinite.json");
    std::fs::write(&indefinite, r#"{"covariance": {"dense": [[1.0, 2.0], [2.0, 1.0]]}}"#).unwrap();
    let err = run_err(&[
        "adjust",
        "--spec",
        path_str(&indefinite),
        "--sample",
        sample,
        "--n",
        "4",
    ]);
    assert!(err.contains("-1"), "names the negative eigenvalue: {err}");

    let mismatch = dir.path().join("mismatch.json");
    std::fs::write(
        &mismatch,
        r#"{"quantities": ["a"], "covariance": {"dense": [[1.0, 0.0], [0.0, 1.0]]}}"#,
    )
    .unwrap();
    let err = run_err(&["adjust", "--spec", path_str(&mismatch), "--sample", sample, "--n", "4"]);
    assert!(err.contains("1 quantities for a 2x2"), "{err}");

    let no_quadratic = dir.path().join("plain.json");
    std::fs::write(&no_quadratic, r#"{"covariance": {"dense": [[1.0]]}}"#).unwrap();
    let err = run_err(&[
        "adjust",
        "--spec",
        path_str(&no_quadratic),
        "--sample",
        sample,
        "--n",
        "4",
    ]);
    assert!(err.contains("quadratic"), "{err}");
}

#[test]
fn sample_of_the_wrong_size_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("s.json");
    std::fs::write(&sample, "[[1.0, 0.0], [0.0, 1.0]]").unwrap();
    let err = run_err(&[
        "adjust",
        "--spec",
        path_str(&ELICITED),
        "--sample",
        path_str(&sample),
        "--n",
        "34",
    ]);
    assert!(err.contains("2x2, expected 3x3"), "{err}");
}

#[test]
fn reports_reserialize_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synthetic_csv(dir.path(), 50);
    for text in [
        run_ok(&adjust_to_stdout("full")),
        run_ok(&[
            "dlm-filter",
            "--spec",
            path_str(&SYNTHETIC),
            "--data",
            path_str(&csv),
            "--readjust",
        ]),
    ] {
        let report = ReportDocument::from_json(&text, "report").unwrap();
        assert_eq!(report.to_json(), text);
    }
}
