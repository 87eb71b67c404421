//! Command-line front end for Bayes linear covariance learning.
//!
//! Inputs are a JSON specification document ([`spec`]) and CSV series
//! ([`data`]). Commands write JSON reports ([`report`]), TSV tables and DOT
//! diagrams ([`dot`]).
//!
//! ```
//! use bayeslin_cli::spec::parse_spec;
//!
//! let doc = parse_spec(r#"{"covariance": {"cholesky": [[2.0], [1.0, 1.0]]}}"#, "inline").unwrap();
//! let m = doc.covariance_matrix().unwrap().unwrap();
//! assert_eq!(m[(1, 0)], 2.0);
//! assert_eq!(m[(1, 1)], 2.0);
//! ```

pub mod commands;
pub mod data;
pub mod dot;
mod error;
pub mod report;
pub mod spec;

pub use commands::{run_command, Cli, Command};
pub use data::{load_csv, parse_csv, Series};
pub use dot::{export_dot, DotLayout};
pub use error::{Error, Result};
pub use report::ReportDocument;
pub use spec::{load_spec, parse_spec, save_spec, SpecDocument};
