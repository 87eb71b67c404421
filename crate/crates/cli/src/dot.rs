//! DOT rendering of report nodes and arcs.
//!
//! Each node carries its resolution increments as a `|`-separated list of
//! two-decimal fractions, their running totals, and its diagnostic shading.
//! Fill colour encodes the shading: red for changes larger than expected,
//! blue for smaller, white for none.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::report::{Node, NodeKind, RatioValue, ReportDocument};

/// Layout hints for the diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotLayout {
    /// Graph direction, such as `LR` or `TB`.
    pub rankdir: String,
}

impl Default for DotLayout {
    fn default() -> Self {
        Self { rankdir: "LR".into() }
    }
}

/// Slack allowed when checking that resolutions sum to at most one.
pub const RESOLUTION_SLACK: f64 = 1e-9;

/// Renders a report's nodes and arcs as a DOT digraph.
pub fn export_dot(report: &ReportDocument, layout: &DotLayout) -> Result<String> {
    validate(report)?;
    let mut out = String::from("digraph report {\n");
    if !layout.rankdir.chars().all(|c| c.is_ascii_alphabetic()) || layout.rankdir.is_empty() {
        return Err(Error::Usage(format!(
            "rankdir `{}` is not a DOT direction",
            layout.rankdir
        )));
    }
    out.push_str(&format!("  rankdir={};\n", layout.rankdir));
    out.push_str("  node [shape=box, style=filled];\n");
    for node in &report.nodes {
        out.push_str(&format!("  {} [{}];\n", quote(&node.name), attributes(node)));
    }
    for arc in &report.arcs {
        out.push_str(&format!("  {} -> {};\n", quote(&arc.from), quote(&arc.to)));
    }
    out.push_str("}\n");
    Ok(out)
}

fn validate(report: &ReportDocument) -> Result<()> {
    let malformed = |m: String| Error::Invalid(format!("malformed report: {m}"));
    let mut names = HashSet::new();
    for node in &report.nodes {
        if !names.insert(node.name.as_str()) {
            return Err(malformed(format!("node `{}` appears twice", node.name)));
        }
        if let Some(r) = node
            .resolutions
            .iter()
            .find(|r| !(r.is_finite() && **r >= -RESOLUTION_SLACK))
        {
            return Err(malformed(format!("node `{}` has resolution {r}", node.name)));
        }
        let total: f64 = node.resolutions.iter().sum();
        if total > 1.0 + RESOLUTION_SLACK {
            return Err(malformed(format!("resolutions of `{}` sum to {total}", node.name)));
        }
        if !(0.0..=1.0).contains(&node.shading) {
            return Err(malformed(format!("node `{}` has shading {}", node.name, node.shading)));
        }
    }
    for arc in &report.arcs {
        for end in [&arc.from, &arc.to] {
            if !names.contains(end.as_str()) {
                return Err(malformed(format!("arc refers to unknown node `{end}`")));
            }
        }
    }
    Ok(())
}

fn attributes(node: &Node) -> String {
    let increments = joined(node.resolutions.iter().copied());
    let cumulative = joined(node.resolutions.iter().scan(0.0, |acc, r| {
        *acc += r;
        Some(*acc)
    }));
    let mut label = escape(&node.name);
    if !node.resolutions.is_empty() {
        label.push_str(&format!("\\nresolved {increments}"));
    }
    label.push_str(&format!("\\nshading {:.2}", node.shading));
    let kind = match node.kind {
        NodeKind::Target => "target",
        NodeKind::Data => "data",
    };
    let mut attrs = vec![
        format!("label=\"{label}\""),
        format!("kind=\"{kind}\""),
        format!("shading=\"{}\"", node.shading),
        format!("fillcolor=\"{}\"", fill(node)),
    ];
    if !node.resolutions.is_empty() {
        attrs.push(format!("resolutions=\"{increments}\""));
        attrs.push(format!("cumulative=\"{cumulative}\""));
    }
    attrs.join(", ")
}

fn joined(values: impl Iterator<Item = f64>) -> String {
    values.map(|v| format!("{v:.2}")).collect::<Vec<_>>().join("|")
}

fn fill(node: &Node) -> String {
    let larger = match node.ratio {
        Some(RatioValue::Finite(v)) => v >= 1.0,
        Some(RatioValue::Infinite) => true,
        Some(RatioValue::NotApplicable) | None => true,
    };
    let fade = (255.0 * (1.0 - 0.75 * node.shading)).round() as u8;
    if larger {
        format!("#ff{fade:02x}{fade:02x}")
    } else {
        format!("#{fade:02x}{fade:02x}ff")
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
