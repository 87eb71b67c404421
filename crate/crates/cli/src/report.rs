//! Report documents written by the analysis commands and read by
//! `diagnose` and `export-dot`.
//!
//! Reports are JSON with shortest round-trip numbers, so identical inputs
//! give byte-identical files. Eigen tables can also be written as TSV with
//! 17 significant digits.

use std::collections::BTreeMap;
use std::path::Path;

use bayeslin_core::linalg::{min_eigenvalue, nnd_threshold};
use bayeslin_core::{EigenReport, Tolerances};
use bayeslin_diagnostics::SizeRatio;
use bayeslin_matrix::NndRepair;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spec::{from_matrix, Rows};

/// A full analysis report. Every section is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    /// The command that produced the report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// Shading scale used for the diagnostic shadings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shading_scale: Option<f64>,
    /// Reported matrices.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<ReportMatrix>,
    /// Reported vectors.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<ReportVector>,
    /// Projection coefficients.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<CoefficientSet>,
    /// Resolutions of targets by collections.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolutions: Vec<ResolutionEntry>,
    /// Belief-transform eigenstructures.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eigen: Vec<EigenTable>,
    /// Diagnostics per time step.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub timeline: Vec<TimelineEntry>,
    /// Matrices that needed an NND repair.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub repairs: Vec<RepairRecord>,
    /// Diagram nodes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<Node>,
    /// Diagram arcs, data to target.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arcs: Vec<Arc>,
    /// Named scalar results.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, f64>,
}

/// A matrix with its NND status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportMatrix {
    /// Name.
    pub name: String,
    /// Entries, before any repair.
    pub rows: Rows,
    /// NND status of `rows`.
    pub nnd: NndStatus,
    /// Nearest NND matrix when `rows` is not NND.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repaired: Option<Rows>,
}

impl ReportMatrix {
    /// A matrix whose NND status is computed here.
    pub fn new(name: impl Into<String>, m: &DMatrix<f64>) -> Self {
        Self {
            name: name.into(),
            rows: from_matrix(m),
            nnd: NndStatus {
                nnd: true,
                min_eigenvalue: min_eigenvalue(m),
                truncated: Vec::new(),
            },
            repaired: None,
        }
        .checked()
    }

    /// A matrix together with the outcome of its repair.
    pub fn with_repair(name: impl Into<String>, m: &DMatrix<f64>, repair: &NndRepair) -> Self {
        let mut out = Self::new(name, m);
        out.nnd.nnd = !repair.was_repaired();
        out.nnd.truncated = repair.truncated.clone();
        out.repaired = repair.was_repaired().then(|| from_matrix(&repair.matrix));
        out
    }

    fn checked(mut self) -> Self {
        let m = crate::spec::to_matrix(&self.name, &self.rows).expect("rows come from a matrix");
        self.nnd.nnd = self.nnd.min_eigenvalue >= -nnd_threshold(&m, Tolerances::default().psd);
        self
    }

    /// The usable matrix: the repaired one when present.
    pub fn effective(&self) -> Result<DMatrix<f64>> {
        crate::spec::to_matrix(&self.name, self.repaired.as_ref().unwrap_or(&self.rows))
    }
}

/// Whether a matrix is NND, and what a repair removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NndStatus {
    /// Whether the matrix is NND.
    pub nnd: bool,
    /// Its smallest eigenvalue.
    pub min_eigenvalue: f64,
    /// Negative eigenvalues set to zero by the repair, most negative first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub truncated: Vec<f64>,
}

/// A named vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportVector {
    /// Name.
    pub name: String,
    /// Entries.
    pub values: Vec<f64>,
}

/// Coefficients of an adjusted expectation on a collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSet {
    /// Adjusted target.
    pub target: String,
    /// Collection name.
    pub collection: String,
    /// Member names, in coefficient order.
    pub members: Vec<String>,
    /// Coefficient of each member.
    pub values: Vec<f64>,
}

/// The resolution of a target by a collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionEntry {
    /// Target name.
    pub target: String,
    /// Collection name.
    pub collection: String,
    /// Resolved fraction of the target's variance.
    pub value: f64,
}

/// The eigenstructure of a belief transform between two matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenTable {
    /// Table name.
    pub name: String,
    /// Name of the first matrix.
    pub from: String,
    /// Name of the second matrix.
    pub to: String,
    /// Eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors, one per row, in eigenvalue order.
    pub eigenvectors: Rows,
}

impl EigenTable {
    /// Builds a table from an eigen report.
    pub fn new(name: impl Into<String>, from: &str, to: &str, e: &EigenReport) -> Self {
        Self {
            name: name.into(),
            from: from.to_string(),
            to: to.to_string(),
            eigenvalues: e.eigenvalues.iter().copied().collect(),
            eigenvectors: (0..e.eigenvectors.ncols())
                .map(|k| e.eigenvectors.column(k).iter().copied().collect())
                .collect(),
        }
    }
}

/// Diagnostics of one forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineEntry {
    /// Time index.
    pub t: i64,
    /// Observed size of the forecast error.
    pub size: f64,
    /// Its prior expectation.
    pub expected: f64,
    /// Observed over expected size.
    pub ratio: RatioValue,
    /// Diagnostic shading in `[0, 1]`.
    pub shading: f64,
    /// Observed size of the change in the state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_size: Option<f64>,
    /// Its prior expectation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_expected: Option<f64>,
    /// Resolution of `V^ν` behind this forecast.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_nu: Option<f64>,
    /// Resolution of `FᵀV^ωF` behind this forecast.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_omega: Option<f64>,
}

/// A size ratio that stays JSON-representable when degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioValue {
    /// A finite ratio.
    Finite(f64),
    /// Positive observed size against zero expectation.
    Infinite,
    /// Both sizes are zero.
    NotApplicable,
}

impl From<SizeRatio> for RatioValue {
    fn from(r: SizeRatio) -> Self {
        match r {
            SizeRatio::Finite(v) => RatioValue::Finite(v),
            SizeRatio::Infinite => RatioValue::Infinite,
            SizeRatio::NotApplicable => RatioValue::NotApplicable,
        }
    }
}

impl From<RatioValue> for SizeRatio {
    fn from(r: RatioValue) -> Self {
        match r {
            RatioValue::Finite(v) => SizeRatio::Finite(v),
            RatioValue::Infinite => SizeRatio::Infinite,
            RatioValue::NotApplicable => SizeRatio::NotApplicable,
        }
    }
}

/// A negative-eigenvalue repair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepairRecord {
    /// Matrix that was repaired.
    pub matrix: String,
    /// Eigenvalues set to zero.
    pub truncated: Vec<f64>,
}

/// What a diagram node stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    /// An adjusted quantity.
    Target,
    /// A data collection.
    Data,
}

/// A diagram node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    /// Name, unique within the report.
    pub name: String,
    /// Role of the node.
    pub kind: NodeKind,
    /// Successive increments of resolved variance, in adjustment order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolutions: Vec<f64>,
    /// Size ratio of the observed change.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioValue>,
    /// Diagnostic shading in `[0, 1]`.
    #[serde(default)]
    pub shading: f64,
}

/// A diagram arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arc {
    /// Source node.
    pub from: String,
    /// Destination node.
    pub to: String,
}

impl ReportDocument {
    /// An empty report for a command.
    pub fn for_command(command: &str) -> Self {
        Self {
            command: Some(command.to_string()),
            ..Self::default()
        }
    }

    /// Serialized text with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// Parses report text.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json(origin, e))
    }

    /// Reads a report file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// A matrix by name.
    pub fn matrix(&self, name: &str) -> Result<&ReportMatrix> {
        self.matrices
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| Error::Invalid(format!("the report has no matrix named `{name}`")))
    }

    /// Records a repair when a matrix needed one.
    pub fn note_repair(&mut self, name: &str, repair: &NndRepair) {
        if repair.was_repaired() {
            self.repairs.push(RepairRecord {
                matrix: name.to_string(),
                truncated: repair.truncated.clone(),
            });
        }
    }

    /// Eigen tables as TSV: a header line per table, then one row per
    /// component with its index, eigenvalue and eigenvector entries.
    pub fn eigen_tsv(&self) -> String {
        let mut out = String::new();
        for table in &self.eigen {
            let n = table.eigenvalues.len();
            out.push_str(&format!("# {}: {} -> {}\n", table.name, table.from, table.to));
            out.push_str("component\teigenvalue");
            for i in 1..=n {
                out.push_str(&format!("\tv{i}"));
            }
            out.push('\n');
            for (k, (value, vector)) in table.eigenvalues.iter().zip(&table.eigenvectors).enumerate() {
                out.push_str(&format!("{}\t{}", k + 1, fixed17(*value)));
                for x in vector {
                    out.push('\t');
                    out.push_str(&fixed17(*x));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// A number with 17 significant digits in scientific notation.
pub fn fixed17(x: f64) -> String {
    format!("{x:.16e}")
}
