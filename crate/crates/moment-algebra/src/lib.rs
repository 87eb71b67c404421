//! Symbolic expectations and covariances of polynomials in residuals that
//! follow the exchangeable decomposition `ω_tω_tᵀ = V^ω + S^ω_t` and
//! `ν_tν_tᵀ = V^ν + S^ν_t`.
//!
//! Expressions are polynomials over residual elements, mean-matrix elements
//! and residual-matrix elements. Expectation pairs same-time residuals,
//! applies the zero-mean and no-correlation rules, and leaves a polynomial
//! in irreducible expectations that a [`MomentTable`] evaluates, exactly
//! when coefficients are rational.
//!
//! ```
//! use bayeslin_moments::{expectation, residual, Kind, evaluate, script::example_spec};
//! use num_rational::BigRational;
//!
//! // E((ν_t − ν_{t−1})²) = 2·E(V^ν_jj)
//! let d = &residual::<BigRational>(Kind::Obs, 0, 0) - &residual(Kind::Obs, 0, -1);
//! let e = expectation(&(&d * &d)).unwrap();
//! let v = evaluate(&e, &example_spec()).unwrap();
//! assert_eq!(v, BigRational::from_integer(72.into()));
//! ```

mod algebra;
mod coeff;
mod error;
mod poly;
pub mod script;
mod spec;
mod symbol;

pub use algebra::{
    canonical, canonical_with, covariance, covariance_with, expectation, expectation_with, fluct, in_slot, mean,
    render_expectation, render_expr, residual, slotted_product, substitute_indices, ExpectOptions, Expectation,
    MomentExpr,
};
pub use coeff::{decimal, ratio, Coeff};
pub use error::{Error, Result};
pub use poly::Poly;
pub use spec::{evaluate, KindPattern, MomentTable, PatternSpec, TableSpec};
pub use symbol::{Atom, Index, IndexStyle, Kind, Sym, Time};
