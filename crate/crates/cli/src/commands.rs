//! Subcommands and their report builders.

use std::path::{Path, PathBuf};

use bayeslin_core::linalg::{checked_symmetric, max_abs};
use bayeslin_core::{belief_transform_eigen, transform_matrix, Tolerances};
use bayeslin_diagnostics::{matrix_transforms, shading_transform, SizeRatio, DEFAULT_SHADING_SCALE};
use bayeslin_dlm::{
    adjust_dlm_covariances, block_log_ratio, difference_observables, first_order_filter, iterative_readjust, recover_w,
    DlmSpace, FilterStep,
};
use bayeslin_exchange::sample_cov_beliefs;
use bayeslin_matrix::{
    adjust_matrix, build_collections, nnd_repair, resolution, upper_pairs, ConstantBasis, MatrixObject, MatrixSpace,
};
use bayeslin_moments::script::{derive, derive_dlm_gram, pattern_values, structures};
use bayeslin_moments::{decimal, render_expectation, IndexStyle};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_rational::BigRational;

use crate::data::{load_csv, Series};
use crate::dot::{export_dot, DotLayout};
use crate::error::{Error, Result};
use crate::report::{
    Arc, CoefficientSet, EigenTable, Node, NodeKind, RatioValue, ReportDocument, ReportMatrix, ReportVector,
    ResolutionEntry, TimelineEntry,
};
use crate::spec::{load_spec, to_matrix, Rows, SpecDocument, WeightingName};

/// Bayes linear covariance learning from the command line.
#[derive(Debug, Parser)]
#[command(name = "bayeslin", version, about)]
pub struct Cli {
    /// The command to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Available subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Adjust a covariance matrix by a sample covariance matrix.
    Adjust(AdjustArgs),
    /// Adjust the observation and evolution variances of a dynamic linear model.
    DlmAdjust(DlmAdjustArgs),
    /// Filter a series and record forecast diagnostics.
    DlmFilter(DlmFilterArgs),
    /// Recompute shadings and summary diagnostics of a report.
    Diagnose(DiagnoseArgs),
    /// Derive the exact covariance constants of the difference observables.
    DeriveMoments(DeriveMomentsArgs),
    /// Render a report's nodes and arcs as DOT.
    ExportDot(ExportDotArgs),
}

/// Data collections built from a sample covariance matrix, in nesting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum CollectionName {
    /// The sample covariance matrix as one object.
    Sample,
    /// Each distinct element as its own object.
    Individual,
    /// Each distinct element in every symmetric pattern.
    Full,
}

impl CollectionName {
    const ALL: [CollectionName; 3] = [CollectionName::Sample, CollectionName::Individual, CollectionName::Full];

    fn name(self) -> &'static str {
        match self {
            CollectionName::Sample => "sample",
            CollectionName::Individual => "individual",
            CollectionName::Full => "full",
        }
    }
}

/// Flags of `adjust`.
#[derive(Debug, Clone, Args)]
pub struct AdjustArgs {
    /// Specification with a `quadratic` section.
    #[arg(long)]
    pub spec: PathBuf,
    /// JSON rows of the observed sample covariance matrix.
    #[arg(long)]
    pub sample: PathBuf,
    /// Sample size behind the observed matrix.
    #[arg(long)]
    pub n: usize,
    /// Largest collection to adjust by; smaller ones are reported too.
    #[arg(long, value_enum, default_value = "full")]
    pub collection: CollectionName,
    /// Inner-product weighting; the document's choice when absent.
    #[arg(long, value_enum)]
    pub weighting: Option<WeightingName>,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the eigen tables as TSV here.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

/// Flags of `dlm-adjust`.
#[derive(Debug, Clone, Args)]
pub struct DlmAdjustArgs {
    /// Specification with a `dlm` section.
    #[arg(long)]
    pub spec: PathBuf,
    /// CSV series.
    #[arg(long)]
    pub data: PathBuf,
    /// Use observations up to this count; all when absent.
    #[arg(long)]
    pub through: Option<usize>,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flags of `dlm-filter`.
#[derive(Debug, Clone, Args)]
pub struct DlmFilterArgs {
    /// Specification with a `dlm` section.
    #[arg(long)]
    pub spec: PathBuf,
    /// CSV series.
    #[arg(long)]
    pub data: PathBuf,
    /// Filter with the adjusted `V` and `W` of a `dlm-adjust` report.
    #[arg(long, value_name = "REPORT")]
    pub use_adjusted: Option<PathBuf>,
    /// Re-adjust the variances before every forecast.
    #[arg(long)]
    pub readjust: bool,
    /// Block length of the summary size-ratio metric.
    #[arg(long, default_value_t = DEFAULT_BLOCK)]
    pub block: usize,
    /// Final fraction of the run scored by the summary metric.
    #[arg(long, default_value_t = DEFAULT_FRACTION)]
    pub fraction: f64,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flags of `diagnose`.
#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    /// Report to diagnose.
    #[arg(long)]
    pub report: PathBuf,
    /// Shading scale; the report's, then the default, when absent.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Block length of the summary size-ratio metric.
    #[arg(long, default_value_t = DEFAULT_BLOCK)]
    pub block: usize,
    /// Final fraction of the run scored by the summary metric.
    #[arg(long, default_value_t = DEFAULT_FRACTION)]
    pub fraction: f64,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flags of `derive-moments`.
#[derive(Debug, Clone, Args)]
pub struct DeriveMomentsArgs {
    /// Specification with an identity `dlm` section in pattern shorthand.
    #[arg(long)]
    pub spec: PathBuf,
    /// Add the symbolic covariance of each structure.
    #[arg(long)]
    pub symbolic: bool,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flags of `export-dot`.
#[derive(Debug, Clone, Args)]
pub struct ExportDotArgs {
    /// Report to render.
    #[arg(long)]
    pub report: PathBuf,
    /// Graph direction.
    #[arg(long, default_value = "LR")]
    pub rankdir: String,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Default block length of the forecast size-ratio metric.
pub const DEFAULT_BLOCK: usize = 8;
/// Default scored fraction of the forecast size-ratio metric.
pub const DEFAULT_FRACTION: f64 = 0.25;

/// Parses `argv` (program name first), runs the command and returns the
/// exit status. Errors go to standard error.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a parsed command, writing its artifacts.
pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Adjust(a) => {
            let spec = load_spec(&a.spec)?;
            let sample = load_rows(&a.sample)?;
            let weighting = a.weighting.unwrap_or_else(|| spec.weighting());
            let report = adjust_report(&spec, &sample, a.n, a.collection, weighting)?;
            if let Some(path) = &a.tsv {
                write_file(path, &report.eigen_tsv())?;
            }
            emit(a.out.as_deref(), &report.to_json())
        }
        Command::DlmAdjust(a) => {
            let spec = load_spec(&a.spec)?;
            let series = load_csv(&a.data)?;
            emit(
                a.out.as_deref(),
                &dlm_adjust_report(&spec, &series, a.through)?.to_json(),
            )
        }
        Command::DlmFilter(a) => {
            if a.readjust && a.use_adjusted.is_some() {
                return Err(Error::Usage("--readjust and --use-adjusted cannot be combined".into()));
            }
            let spec = load_spec(&a.spec)?;
            let series = load_csv(&a.data)?;
            let variances = match &a.use_adjusted {
                Some(path) => {
                    let r = ReportDocument::load(path)?;
                    Some((r.matrix("V")?.effective()?, r.matrix("W")?.effective()?))
                }
                None => None,
            };
            let mode = match variances {
                Some((v, w)) => FilterMode::Fixed(v, w),
                None if a.readjust => FilterMode::Readjust,
                None => FilterMode::Prior,
            };
            let report = dlm_filter_report(&spec, &series, &mode, a.block, a.fraction)?;
            emit(a.out.as_deref(), &report.to_json())
        }
        Command::Diagnose(a) => {
            let report = ReportDocument::load(&a.report)?;
            emit(
                a.out.as_deref(),
                &diagnose_report(report, a.scale, a.block, a.fraction)?.to_json(),
            )
        }
        Command::DeriveMoments(a) => {
            let spec = load_spec(&a.spec)?;
            emit(a.out.as_deref(), &derive_moments_table(&spec, a.symbolic)?)
        }
        Command::ExportDot(a) => {
            let report = ReportDocument::load(&a.report)?;
            let layout = DotLayout {
                rankdir: a.rankdir.clone(),
            };
            emit(a.out.as_deref(), &export_dot(&report, &layout)?)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a JSON matrix given as an array of rows.
pub fn load_rows(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    let rows: Rows = serde_json::from_str(&text).map_err(|e| Error::json(&origin, e))?;
    to_matrix(&origin, &rows)
}

fn shading_scale(spec: &SpecDocument) -> f64 {
    spec.shading_scale().unwrap_or(DEFAULT_SHADING_SCALE)
}

/// Adjusts `V` by the sample collections up to `largest`.
///
/// Each collection is adjusted by alone, and the target node carries the
/// resolution gained by adding each collection to the previous ones. Eigen
/// tables cover the transform from the prior to the first adjustment, each
/// successive pair, and the prior to the last adjustment.
pub fn adjust_report(
    spec: &SpecDocument,
    sample: &DMatrix<f64>,
    n: usize,
    largest: CollectionName,
    weighting: WeightingName,
) -> Result<ReportDocument> {
    let model = spec
        .quadratic_model()?
        .ok_or_else(|| Error::Invalid("adjust needs a quadratic section".into()))?;
    let r = model.r();
    if sample.shape() != (r, r) {
        return Err(Error::Invalid(format!(
            "the sample is {}x{}, expected {r}x{r}",
            sample.nrows(),
            sample.ncols()
        )));
    }
    let sample = checked_symmetric("sample", sample, Tolerances::default().sym)?;
    let k = shading_scale(spec);
    let beliefs = sample_cov_beliefs(&model, n)?;
    let store = beliefs.store.clone();
    let coords = &model.coords;
    let grid = |prefix: &str| -> Result<MatrixObject> {
        let mut idx = vec![vec![0; r]; r];
        for (i, row) in idx.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = store.index_of(&coords.label(prefix, coords.index_of(i, j)))?;
            }
        }
        Ok(MatrixObject::from_indices(prefix, &idx, true))
    };
    let v = grid("V")?;
    let s = grid("S")?;
    let cols = build_collections(&s, &upper_pairs(r))?;
    let names = |objs: &[MatrixObject]| objs.iter().map(|o| o.name.clone()).collect::<Vec<_>>();
    let members = [names(&cols.single), names(&cols.individual), names(&cols.full)];
    let space = MatrixSpace::builder(Some(store.clone()), weighting.into())
        .object(v)
        .objects(cols.single)
        .objects(cols.individual)
        .objects(cols.full)
        .build()?;
    let half = coords.half_vec(&sample)?;
    let observed: std::collections::HashMap<String, f64> =
        (0..coords.len()).map(|c| (coords.label("S", c), half[c])).collect();
    let constants = ConstantBasis::symmetric(r);

    let mut report = ReportDocument::for_command("adjust");
    report.shading_scale = Some(k);
    let prior = model.expectation_v.clone();
    report.matrices.push(ReportMatrix::new("V", &prior));
    let mut target = Node {
        name: "V".into(),
        kind: NodeKind::Target,
        resolutions: Vec::new(),
        ratio: None,
        shading: 0.0,
    };
    let mut union: Vec<String> = Vec::new();
    let mut resolved_so_far = 0.0;
    let mut previous = ("V".to_string(), prior.clone());
    let mut partial: Vec<DMatrix<f64>> = Vec::new();
    for level in CollectionName::ALL.into_iter().filter(|l| *l <= largest) {
        let list = &members[level as usize];
        let refs: Vec<&str> = list.iter().map(String::as_str).collect();
        let adj = adjust_matrix(&space, "V", &refs, &constants)?;
        let obs: Vec<DMatrix<f64>> = list
            .iter()
            .map(|m| space.observe(m, &observed))
            .collect::<std::result::Result<_, _>>()?;
        let adjusted = adj.realize(&obs)?;
        let name = format!("V|{}", level.name());
        let repair = nnd_repair(&adjusted)?;
        report
            .matrices
            .push(ReportMatrix::with_repair(&name, &adjusted, &repair));
        report.note_repair(&name, &repair);

        let mut coef_members = list.clone();
        coef_members.extend((1..=adj.constant_coefficients.len()).map(|c| format!("constant {c}")));
        let mut values: Vec<f64> = adj.coefficients.iter().copied().collect();
        values.extend(adj.constant_coefficients.iter().copied());
        report.coefficients.push(CoefficientSet {
            target: "V".into(),
            collection: level.name().into(),
            members: coef_members,
            values,
        });
        report.resolutions.push(ResolutionEntry {
            target: "V".into(),
            collection: level.name().into(),
            value: adj.resolution,
        });

        union.extend(list.iter().cloned());
        let union_refs: Vec<&str> = union.iter().map(String::as_str).collect();
        let cumulative = resolution(&space, "V", &union_refs)?.max(resolved_so_far);
        target.resolutions.push(cumulative - resolved_so_far);
        resolved_so_far = cumulative;

        let ratio = matrix_transforms(&space, &["V"], &refs, &obs, &constants)?.size_ratio;
        let shading = shading_transform(ratio, k)?;
        report.nodes.push(Node {
            name: level.name().into(),
            kind: NodeKind::Data,
            resolutions: Vec::new(),
            ratio: Some(ratio.into()),
            shading,
        });
        report.arcs.push(Arc {
            from: level.name().into(),
            to: "V".into(),
        });
        target.ratio = Some(ratio.into());
        target.shading = shading;

        let eig = belief_transform_eigen(&previous.1, &adjusted)?;
        report.eigen.push(EigenTable::new(
            format!("{} to {}", previous.0, name),
            &previous.0,
            &name,
            &eig,
        ));
        partial.push(transform_matrix(&previous.1, &adjusted)?);
        previous = (name, adjusted);
    }
    report.summary.insert("resolution.cumulative".into(), resolved_so_far);
    if partial.len() > 1 {
        let overall = transform_matrix(&prior, &previous.1)?;
        let composed = partial.iter().fold(DMatrix::identity(r, r), |acc, t| t * acc);
        report.summary.insert(
            "composition_residual".into(),
            max_abs(&(&composed - &overall)) / max_abs(&overall),
        );
        let eig = belief_transform_eigen(&prior, &previous.1)?;
        report
            .eigen
            .push(EigenTable::new(format!("V to {}", previous.0), "V", &previous.0, &eig));
    }
    report.nodes.insert(0, target);
    Ok(report)
}

fn dlm_inputs(spec: &SpecDocument, series: &Series) -> Result<(bayeslin_dlm::DlmSpec, bayeslin_dlm::QuarticSpec)> {
    let (dlm, quartic) = spec
        .dlm()?
        .ok_or_else(|| Error::Invalid("the specification has no dlm section".into()))?;
    if series.dim() != dlm.r() {
        return Err(Error::Invalid(format!(
            "the data have {} series, the model {}",
            series.dim(),
            dlm.r()
        )));
    }
    series.require_consecutive()?;
    Ok((dlm, quartic))
}

/// Adjusts `V^ν` and `V^ω` by the quadratic difference observables of the
/// first `through` observations.
pub fn dlm_adjust_report(spec: &SpecDocument, series: &Series, through: Option<usize>) -> Result<ReportDocument> {
    let (dlm, quartic) = dlm_inputs(spec, series)?;
    let n = through.unwrap_or(series.len());
    if n > series.len() {
        return Err(Error::Usage(format!(
            "--through {n} exceeds the {} observations",
            series.len()
        )));
    }
    let space = DlmSpace::new(dlm.clone(), &quartic)?;
    let diffs = difference_observables(space.structure.h(), &series.values[..n])?;
    let adj = adjust_dlm_covariances(&space, &diffs, n)?;

    let mut report = ReportDocument::for_command("dlm-adjust");
    report.shading_scale = Some(shading_scale(spec));
    report.matrices.push(ReportMatrix::new("V prior", &dlm.v));
    report.matrices.push(ReportMatrix::new("W prior", &dlm.w));
    report
        .matrices
        .push(ReportMatrix::with_repair("V", &adj.nu.adjusted, &adj.nu.repair));
    report.note_repair("V", &adj.nu.repair);
    report.matrices.push(ReportMatrix::with_repair(
        "FtWF",
        &adj.omega.adjusted,
        &adj.omega.repair,
    ));
    report.note_repair("FtWF", &adj.omega.repair);
    let w_raw = recover_w(&dlm, adj.omega.repaired())?;
    report
        .matrices
        .push(ReportMatrix::with_repair("W", &w_raw, &adj.w_repair));
    report.note_repair("W", &adj.w_repair);
    for (name, a) in [("V", &adj.nu), ("FtWF", &adj.omega)] {
        report.coefficients.push(CoefficientSet {
            target: name.into(),
            collection: "differences".into(),
            members: a.observables.iter().map(|o| o.name()).collect(),
            values: a.coefficients.iter().copied().collect(),
        });
        report.resolutions.push(ResolutionEntry {
            target: name.into(),
            collection: "differences".into(),
            value: a.resolution,
        });
        report.nodes.push(Node {
            name: name.into(),
            kind: NodeKind::Target,
            resolutions: vec![a.resolution],
            ratio: None,
            shading: 0.0,
        });
        report.arcs.push(Arc {
            from: "differences".into(),
            to: name.into(),
        });
    }
    report.nodes.push(Node {
        name: "differences".into(),
        kind: NodeKind::Data,
        resolutions: Vec::new(),
        ratio: None,
        shading: 0.0,
    });
    report.summary.insert("observations".into(), n as f64);
    report
        .summary
        .insert("dense_fallback".into(), f64::from(u8::from(adj.nu.dense_fallback)));
    Ok(report)
}

/// Which variances the filter uses.
#[derive(Debug, Clone)]
pub enum FilterMode {
    /// The prior expectations of the specification.
    Prior,
    /// Fixed matrices, such as adjusted ones from a report.
    Fixed(DMatrix<f64>, DMatrix<f64>),
    /// Re-adjusted before every forecast by the data seen so far.
    Readjust,
}

/// Filters the series and records one timeline entry per forecast.
pub fn dlm_filter_report(
    spec: &SpecDocument,
    series: &Series,
    mode: &FilterMode,
    block: usize,
    fraction: f64,
) -> Result<ReportDocument> {
    let (dlm, quartic) = dlm_inputs(spec, series)?;
    let k = shading_scale(spec);
    let mut report = ReportDocument::for_command("dlm-filter");
    report.shading_scale = Some(k);
    let entry = |t: i64, s: &FilterStep| -> Result<TimelineEntry> {
        Ok(TimelineEntry {
            t,
            size: s.forecast_size,
            expected: s.forecast_expected,
            ratio: s.forecast_ratio.into(),
            shading: shading_transform(s.forecast_ratio, k)?,
            state_size: Some(s.state_size),
            state_expected: Some(s.state_expected),
            resolution_nu: None,
            resolution_omega: None,
        })
    };
    let prior_steps = first_order_filter(&dlm, &dlm.v, &dlm.w, &series.values)?;
    let (steps, used) = match mode {
        FilterMode::Prior => (prior_steps.clone(), Some((dlm.v.clone(), dlm.w.clone()))),
        FilterMode::Fixed(v, w) => (
            first_order_filter(&dlm, v, w, &series.values)?,
            Some((v.clone(), w.clone())),
        ),
        FilterMode::Readjust => {
            let re = iterative_readjust(&dlm, &quartic, &series.values)?;
            for (t, step) in series.times.iter().zip(&re) {
                let mut e = entry(*t, &step.step)?;
                e.resolution_nu = Some(step.resolution_nu);
                e.resolution_omega = Some(step.resolution_omega);
                report.timeline.push(e);
            }
            let repaired = re.iter().filter(|s| s.repaired).count();
            report.summary.insert("repaired_steps".into(), repaired as f64);
            if let Some(last) = re.last() {
                report.matrices.push(ReportMatrix::new("V last used", &last.v));
                report.matrices.push(ReportMatrix::new("W last used", &last.w));
            }
            (re.into_iter().map(|s| s.step).collect::<Vec<_>>(), None)
        }
    };
    if report.timeline.is_empty() {
        for (t, s) in series.times.iter().zip(&steps) {
            report.timeline.push(entry(*t, s)?);
        }
    }
    if let Some((v, w)) = used {
        report.matrices.push(ReportMatrix::new("V used", &v));
        report.matrices.push(ReportMatrix::new("W used", &w));
    }
    if let Some(last) = steps.last() {
        report.vectors.push(ReportVector {
            name: "state mean".into(),
            values: last.mean.iter().copied().collect(),
        });
        report.matrices.push(ReportMatrix::new("state variance", &last.cov));
    }
    let pairs = |s: &[FilterStep]| {
        s.iter()
            .map(|x| (x.forecast_size, x.forecast_expected))
            .collect::<Vec<_>>()
    };
    if let Some(m) = block_log_ratio(&pairs(&steps), block, fraction) {
        report.summary.insert("block_log_size_ratio".into(), m);
    }
    if let Some(m) = block_log_ratio(&pairs(&prior_steps), block, fraction) {
        report.summary.insert("block_log_size_ratio.prior".into(), m);
    }
    report.summary.insert(
        "singular_forecasts".into(),
        steps.iter().filter(|s| s.singular_forecast).count() as f64,
    );
    Ok(report)
}

/// Recomputes every shading of a report with scale `scale` (else the
/// report's, else the default) and adds summary diagnostics of its timeline.
pub fn diagnose_report(
    mut report: ReportDocument,
    scale: Option<f64>,
    block: usize,
    fraction: f64,
) -> Result<ReportDocument> {
    let k = scale.or(report.shading_scale).unwrap_or(DEFAULT_SHADING_SCALE);
    report.command = Some("diagnose".into());
    report.shading_scale = Some(k);
    for e in &mut report.timeline {
        e.shading = shading_transform(e.ratio.into(), k)?;
    }
    for node in &mut report.nodes {
        node.shading = match node.ratio {
            Some(r) => shading_transform(r.into(), k)?,
            None => 0.0,
        };
    }
    if !report.timeline.is_empty() {
        let logs: Vec<f64> = report
            .timeline
            .iter()
            .filter_map(|e| match SizeRatio::from(e.ratio) {
                SizeRatio::Finite(v) if v > 0.0 => Some(v.ln().abs()),
                _ => None,
            })
            .collect();
        if !logs.is_empty() {
            report.summary.insert(
                "mean_abs_log_ratio".into(),
                logs.iter().sum::<f64>() / logs.len() as f64,
            );
        }
        let pairs: Vec<(f64, f64)> = report.timeline.iter().map(|e| (e.size, e.expected)).collect();
        if let Some(m) = block_log_ratio(&pairs, block, fraction) {
            report.summary.insert("block_log_size_ratio".into(), m);
        }
        let saturated = report.timeline.iter().filter(|e| e.shading >= 1.0).count();
        report.summary.insert("saturated_steps".into(), saturated as f64);
        report.summary.insert("steps".into(), report.timeline.len() as f64);
        let degenerate = report
            .timeline
            .iter()
            .filter(|e| !matches!(e.ratio, RatioValue::Finite(_)))
            .count();
        report.summary.insert("degenerate_ratios".into(), degenerate as f64);
    }
    Ok(report)
}

fn rational_text(r: &BigRational) -> String {
    r.to_string()
}

/// Digits after the point used for non-terminating constants.
const DECIMAL_DIGITS: usize = 30;

/// The exact constants of the difference observables as TSV: the diagonal
/// (`LS`) and matched (`LD`) pattern value of every structure, the twenty
/// Gram constants `C01…C20`, the element expectations `CC1…CC8` and the
/// expectation sums `CCC1…CCC4`.
pub fn derive_moments_table(spec: &SpecDocument, symbolic: bool) -> Result<String> {
    let (r, table) = spec.pattern_spec()?;
    let mut out = String::from("name\tvalue\trational");
    if symbolic {
        out.push_str("\tsymbolic");
    }
    out.push('\n');
    let mut row = |name: String, value: &BigRational, sym: Option<String>| {
        out.push_str(&format!(
            "{name}\t{}\t{}",
            decimal(value, DECIMAL_DIGITS),
            rational_text(value)
        ));
        if symbolic {
            out.push('\t');
            out.push_str(sym.as_deref().unwrap_or(""));
        }
        out.push('\n');
    };
    for s in structures() {
        let (d, o) = pattern_values(s, &table)?;
        let sym = if symbolic {
            Some(render_expectation(&derive::<BigRational>(s)?, IndexStyle::Symbolic))
        } else {
            None
        };
        row(format!("LS{}", s.label), &d, sym);
        row(format!("LD{}", s.label), &o, None);
    }
    let gram = derive_dlm_gram(&table, r)?;
    for (i, c) in gram.covariances.iter().enumerate() {
        row(format!("C{:02}", i + 1), c, None);
    }
    for (i, c) in gram.element_expectations.iter().enumerate() {
        row(format!("CC{}", i + 1), c, None);
    }
    for (i, c) in gram.expectation_sums.iter().enumerate() {
        row(format!("CCC{}", i + 1), c, None);
    }
    Ok(out)
}
