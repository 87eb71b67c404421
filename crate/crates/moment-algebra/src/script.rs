//! Covariance structure of observation differences in the identity
//! first-order model `X_t = θ_t + ν_t`, `θ_t = θ_{t−1} + ω_t`.
//!
//! The one-step difference is `X′_t = ω_t + ν_t − ν_{t−1}` and the two-step
//! difference is `X″_t = ω_t + ω_{t−1} + ν_t − ν_{t−2}`. Each covariance below
//! is derived for four distinct symbolic indices `j, k, l, m`, then
//! specialized to the diagonal pattern (all equal) and the matched
//! off-diagonal pattern (`l = j`, `m = k`, `j ≠ k`).

use num_rational::BigRational;

use crate::algebra::{covariance, expectation, in_slot, mean, residual, substitute_indices, Expectation, MomentExpr};
use crate::coeff::{ratio, Coeff};
use crate::error::Result;
use crate::spec::{evaluate, KindPattern, MomentTable, PatternSpec};
use crate::symbol::{Index, Kind, Time};

/// Symbolic index ids used in the derivation.
pub const J: Index = 0;
/// Second symbolic index.
pub const K: Index = 1;
/// Third symbolic index.
pub const L: Index = 2;
/// Fourth symbolic index.
pub const M: Index = 3;

/// `X′_{j,t}`.
pub fn one_step<C: Coeff>(j: Index, t: Time) -> MomentExpr<C> {
    &(&residual(Kind::State, j, t) + &residual(Kind::Obs, j, t)) - &residual(Kind::Obs, j, t - 1)
}

/// `X″_{j,t}`.
pub fn two_step<C: Coeff>(j: Index, t: Time) -> MomentExpr<C> {
    let a = &residual::<C>(Kind::State, j, t) + &residual(Kind::State, j, t - 1);
    &(&a + &residual(Kind::Obs, j, t)) - &residual(Kind::Obs, j, t - 2)
}

/// Which difference a quadratic factor is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Difference {
    /// `X′`.
    One,
    /// `X″`.
    Two,
}

impl Difference {
    fn form<C: Coeff>(self, j: Index, t: Time) -> MomentExpr<C> {
        match self {
            Difference::One => one_step(j, t),
            Difference::Two => two_step(j, t),
        }
    }
}

/// One side of a covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    /// A mean-matrix element `(j, k)`.
    Mean(Kind),
    /// The product `D_{j,t}·D_{k,t}` of a difference at time offset `t`.
    Quadratic(Difference, Time),
}

/// A named covariance between two operands, indices `(j, k)` and `(l, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Structure {
    /// Numeric label in the standard list.
    pub label: u32,
    /// First operand, indexed by `(j, k)`.
    pub left: Operand,
    /// Second operand, indexed by `(l, m)`.
    pub right: Operand,
}

/// Every covariance structure of the identity model that the Gram constants use.
pub fn structures() -> Vec<Structure> {
    use Difference::{One, Two};
    use Operand::{Mean, Quadratic as Q};
    let mut out = vec![
        Structure {
            label: 1,
            left: Mean(Kind::State),
            right: Q(One, 0),
        },
        Structure {
            label: 2,
            left: Mean(Kind::Obs),
            right: Q(One, 0),
        },
    ];
    for lag in 0..4 {
        out.push(Structure {
            label: 3 + lag as u32,
            left: Q(One, 0),
            right: Q(One, -lag),
        });
    }
    out.push(Structure {
        label: 11,
        left: Mean(Kind::State),
        right: Q(Two, 0),
    });
    out.push(Structure {
        label: 12,
        left: Mean(Kind::Obs),
        right: Q(Two, 0),
    });
    for lag in 0..5 {
        out.push(Structure {
            label: 13 + lag as u32,
            left: Q(Two, 0),
            right: Q(Two, -lag),
        });
    }
    for lag in 0..5 {
        out.push(Structure {
            label: 23 + lag as u32,
            left: Q(One, 0),
            right: Q(Two, -lag),
        });
    }
    for lag in 1..5 {
        out.push(Structure {
            label: 33 + lag as u32,
            left: Q(Two, 0),
            right: Q(One, -lag),
        });
    }
    out
}

/// Looks up a structure by label.
pub fn structure(label: u32) -> Option<Structure> {
    structures().into_iter().find(|s| s.label == label)
}

fn operand<C: Coeff>(op: Operand, a: Index, b: Index, first_slot: u32) -> MomentExpr<C> {
    match op {
        Operand::Mean(kind) => mean(kind, a, b),
        Operand::Quadratic(d, t) => {
            &in_slot(&d.form::<C>(a, t), first_slot) * &in_slot(&d.form::<C>(b, t), first_slot + 1)
        }
    }
}

/// The covariance of a structure with distinct symbolic indices.
pub fn derive<C: Coeff>(s: Structure) -> Result<Expectation<C>> {
    let left = operand::<C>(s.left, J, K, 0);
    let right = operand::<C>(s.right, L, M, 2);
    covariance(&left, &right)
}

/// Index pattern used to specialize a symbolic result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexPattern {
    /// `j = k = l = m`.
    Diagonal,
    /// `l = j`, `m = k`, `j ≠ k`.
    Matched,
}

impl IndexPattern {
    /// The index map of the pattern.
    pub fn map(self, i: Index) -> Index {
        match (self, i) {
            (IndexPattern::Diagonal, _) => 0,
            (IndexPattern::Matched, J) | (IndexPattern::Matched, L) => 0,
            (IndexPattern::Matched, _) => 1,
        }
    }
}

/// The covariance of a structure specialized to an index pattern.
pub fn derive_pattern<C: Coeff>(s: Structure, pattern: IndexPattern) -> Result<Expectation<C>> {
    Ok(substitute_indices(&derive::<C>(s)?, |i| pattern.map(i)))
}

/// The specification used for the worked example: `r = 6` series,
/// expectations 4 and 1 for `V^ω`, 36 and −4 for `V^ν`, and the quartic
/// values of the example.
pub fn example_spec() -> PatternSpec<BigRational> {
    PatternSpec {
        state: KindPattern {
            mean_diag: ratio(4, 1),
            mean_off: ratio(1, 1),
            var_diag: ratio(9, 4),
            var_off: ratio(9, 16),
            cov_diag_diag: ratio(1, 5),
            fluct_diag: ratio(30, 1),
            fluct_off: ratio(15, 1),
        },
        obs: KindPattern {
            mean_diag: ratio(36, 1),
            mean_off: ratio(-4, 1),
            var_diag: ratio(25, 1),
            var_off: ratio(1, 1),
            cov_diag_diag: ratio(4, 1),
            fluct_diag: ratio(2500, 1),
            fluct_off: ratio(1000, 1),
        },
        zero_fill: false,
    }
}

/// Diagonal and matched-pattern values of a structure.
pub fn pattern_values<C: Coeff, T: MomentTable<C> + ?Sized>(s: Structure, table: &T) -> Result<(C, C)> {
    let sym = derive::<C>(s)?;
    let diag = evaluate(&substitute_indices(&sym, |i| IndexPattern::Diagonal.map(i)), table)?;
    let off = evaluate(&substitute_indices(&sym, |i| IndexPattern::Matched.map(i)), table)?;
    Ok((diag, off))
}

/// Constant-adjusted Gram entries and expectation sums at the matrix level.
#[derive(Debug, Clone, PartialEq)]
pub struct GramConstants<C> {
    /// Twenty covariance sums, in the order: `V^ν` with itself, `V^ω` with
    /// itself, `V^ν` with `V^ω`; one-step squares at lags 0, 1, 2; `V^ν` and
    /// `V^ω` with one-step squares; two-step squares at lags 0 to 3; `V^ν`
    /// and `V^ω` with two-step squares; then one/two-step cross terms at
    /// offsets 0, −1, 1, −2, 2, −3.
    pub covariances: Vec<C>,
    /// Element expectations: `E(V^ω)` diagonal and off-diagonal, `E(V^ν)`
    /// diagonal and off-diagonal, `E(X′X′ᵀ)` and `E(X″X″ᵀ)` diagonal and
    /// off-diagonal.
    pub element_expectations: Vec<C>,
    /// Full-trace sums of `E(V^ω)`, `E(V^ν)`, `E(X′X′ᵀ)` and `E(X″X″ᵀ)`.
    pub expectation_sums: Vec<C>,
}

/// Aggregates pattern values into matrix-level sums over `r` series:
/// `r·diagonal + r(r−1)·off-diagonal`.
pub fn derive_dlm_gram<C: Coeff, T: MomentTable<C> + ?Sized>(table: &T, r: usize) -> Result<GramConstants<C>> {
    let n = C::from_i64(r as i64);
    let n1 = C::from_i64(r as i64 - 1);
    let sum = |d: C, o: C| n.clone() * d + n.clone() * n1.clone() * o;

    let mean_cov = |a: Kind, b: Kind| -> Result<C> {
        let e = covariance::<C>(&mean(a, J, K), &mean(b, L, M))?;
        let d = evaluate(&substitute_indices(&e, |i| IndexPattern::Diagonal.map(i)), table)?;
        let o = evaluate(&substitute_indices(&e, |i| IndexPattern::Matched.map(i)), table)?;
        Ok(sum(d, o))
    };
    let by_label = |label: u32| -> Result<C> {
        let s = structure(label).expect("label is in the standard list");
        let (d, o) = pattern_values(s, table)?;
        Ok(sum(d, o))
    };

    let mut covariances = vec![
        mean_cov(Kind::Obs, Kind::Obs)?,
        mean_cov(Kind::State, Kind::State)?,
        mean_cov(Kind::Obs, Kind::State)?,
    ];
    for label in [3, 4, 5, 2, 1, 13, 14, 15, 16, 12, 11, 23, 34, 24, 35, 25, 26] {
        covariances.push(by_label(label)?);
    }

    let element = |e: MomentExpr<C>| -> Result<(C, C)> {
        let x = expectation(&e)?;
        let d = evaluate(&substitute_indices(&x, |i| IndexPattern::Diagonal.map(i)), table)?;
        let o = evaluate(&substitute_indices(&x, |i| IndexPattern::Matched.map(i)), table)?;
        Ok((d, o))
    };
    let quad = |d: Difference| operand::<C>(Operand::Quadratic(d, 0), J, K, 0);
    let pairs = [
        element(mean(Kind::State, J, K))?,
        element(mean(Kind::Obs, J, K))?,
        element(quad(Difference::One))?,
        element(quad(Difference::Two))?,
    ];
    let element_expectations = pairs.iter().flat_map(|(d, o)| [d.clone(), o.clone()]).collect();
    let expectation_sums = pairs.iter().map(|(d, o)| sum(d.clone(), o.clone())).collect();
    Ok(GramConstants {
        covariances,
        element_expectations,
        expectation_sums,
    })
}
