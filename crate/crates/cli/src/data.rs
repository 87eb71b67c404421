//! Time-indexed series from CSV: an integer `t` column first, then one
//! column per series.

use std::path::Path;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A validated multivariate series, sorted by time.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    /// Names of the series columns.
    pub names: Vec<String>,
    /// Time index of each row, strictly increasing.
    pub times: Vec<i64>,
    /// One observation vector per row.
    pub values: Vec<DVector<f64>>,
}

impl Series {
    /// Number of observations.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Whether there are no observations.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of series.
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Fails unless the times are consecutive integers.
    pub fn require_consecutive(&self) -> Result<()> {
        if let Some(w) = self.times.windows(2).find(|w| w[1] != w[0] + 1) {
            return Err(Error::Invalid(format!(
                "time index jumps from {} to {}; the model needs consecutive times",
                w[0], w[1]
            )));
        }
        Ok(())
    }
}

/// Reads a series file.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Series> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, &path.display().to_string())
}

/// Parses series text. Rows are sorted by `t`; duplicate times, missing
/// values and non-numeric entries are errors naming the line.
pub fn parse_csv(text: &str, origin: &str) -> Result<Series> {
    let err = |message: String| Error::Csv {
        origin: origin.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| err(e.to_string()))?.clone();
    if header.get(0) != Some("t") {
        return Err(err("the first column must be named `t`".into()));
    }
    if header.len() < 2 {
        return Err(err("no series columns after `t`".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if let Some(empty) = names.iter().position(String::is_empty) {
        return Err(err(format!("column {} has an empty name", empty + 2)));
    }
    let mut rows: Vec<(i64, DVector<f64>, u64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| err(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let t_text = record.get(0).unwrap_or("");
        let t: i64 = t_text
            .parse()
            .map_err(|_| err(format!("line {line}: time `{t_text}` is not an integer")))?;
        let mut v = DVector::zeros(names.len());
        for (k, name) in names.iter().enumerate() {
            let cell = record.get(k + 1).unwrap_or("");
            if cell.is_empty() {
                return Err(err(format!("line {line}: missing value for `{name}`")));
            }
            let x: f64 = cell
                .parse()
                .map_err(|_| err(format!("line {line}: `{cell}` in `{name}` is not a number")))?;
            if !x.is_finite() {
                return Err(err(format!("line {line}: non-finite value in `{name}`")));
            }
            v[k] = x;
        }
        rows.push((t, v, line));
    }
    rows.sort_by_key(|(t, _, _)| *t);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(err(format!(
            "duplicate time {} on lines {} and {}",
            w[0].0,
            w[0].2.min(w[1].2),
            w[0].2.max(w[1].2)
        )));
    }
    Ok(Series {
        names,
        times: rows.iter().map(|r| r.0).collect(),
        values: rows.into_iter().map(|r| r.1).collect(),
    })
}
