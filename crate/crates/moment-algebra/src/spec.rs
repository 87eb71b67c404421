use std::collections::HashMap;

use crate::algebra::Expectation;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::symbol::{pair, Atom, Index, Kind};

/// Values for the irreducible expectations.
pub trait MomentTable<C> {
    /// `E(V_ab)` for a mean matrix of `kind`.
    fn mean(&self, kind: Kind, a: Index, b: Index) -> Result<C>;
    /// `E(V_ab V_cd)` for two mean-matrix elements, possibly of different kinds.
    fn mean_product(&self, first: (Kind, Index, Index), second: (Kind, Index, Index)) -> Result<C>;
    /// `E(S_ab S_cd)` for two same-time residual-matrix elements of `kind`.
    fn fluct_product(&self, kind: Kind, p: (Index, Index), q: (Index, Index)) -> Result<C>;
}

/// Evaluates an expectation polynomial.
pub fn evaluate<C: Coeff, T: MomentTable<C> + ?Sized>(e: &Expectation<C>, table: &T) -> Result<C> {
    e.try_evaluate(|atom| match *atom {
        Atom::Mean1 { kind, a, b } => table.mean(kind, a, b),
        Atom::Mean2 { first, second } => table.mean_product(first, second),
        Atom::Fluct2 {
            kind, first, second, ..
        } => table.fluct_product(kind, first, second),
    })
}

/// Second-order values for one kind of residual under exchangeable index
/// symmetry: every diagonal element behaves alike, and so does every
/// off-diagonal element.
#[derive(Debug, Clone, PartialEq)]
pub struct KindPattern<C> {
    /// `E(V_jj)`.
    pub mean_diag: C,
    /// `E(V_jk)`, `j ≠ k`.
    pub mean_off: C,
    /// `Var(V_jj)`.
    pub var_diag: C,
    /// `Var(V_jk)`, `j ≠ k`.
    pub var_off: C,
    /// `Cov(V_jj, V_kk)`, `j ≠ k`.
    pub cov_diag_diag: C,
    /// `E(S_jj²)`.
    pub fluct_diag: C,
    /// `E(S_jk²)`, `j ≠ k`.
    pub fluct_off: C,
}

/// A pattern-keyed specification covering diagonal, matched off-diagonal
/// and distinct-diagonal index patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSpec<C> {
    /// Values for the state residuals.
    pub state: KindPattern<C>,
    /// Values for the observation residuals.
    pub obs: KindPattern<C>,
    /// When set, patterns outside the table have zero covariance instead of
    /// being an error.
    pub zero_fill: bool,
}

impl<C: Coeff> PatternSpec<C> {
    fn kind(&self, k: Kind) -> &KindPattern<C> {
        match k {
            Kind::State => &self.state,
            Kind::Obs => &self.obs,
        }
    }
}

fn describe(kind: Kind, what: &str, p: (Index, Index), q: (Index, Index)) -> String {
    let names = match kind {
        Kind::State => ("VA", "SA"),
        Kind::Obs => ("V", "S"),
    };
    let n = if what == "fluct" { names.1 } else { names.0 };
    format!("E({n}({},{})*{n}({},{}))", p.0, p.1, q.0, q.1)
}

impl<C: Coeff> MomentTable<C> for PatternSpec<C> {
    fn mean(&self, kind: Kind, a: Index, b: Index) -> Result<C> {
        let t = self.kind(kind);
        Ok(if a == b {
            t.mean_diag.clone()
        } else {
            t.mean_off.clone()
        })
    }

    fn mean_product(&self, first: (Kind, Index, Index), second: (Kind, Index, Index)) -> Result<C> {
        let m1 = self.mean(first.0, first.1, first.2)?;
        let m2 = self.mean(second.0, second.1, second.2)?;
        if first.0 != second.0 {
            return Ok(m1 * m2);
        }
        let t = self.kind(first.0);
        let p = pair(first.1, first.2);
        let q = pair(second.1, second.2);
        let cov = if p == q {
            if p.0 == p.1 {
                Some(t.var_diag.clone())
            } else {
                Some(t.var_off.clone())
            }
        } else if p.0 == p.1 && q.0 == q.1 {
            Some(t.cov_diag_diag.clone())
        } else {
            None
        };
        match cov {
            Some(c) => Ok(c + m1 * m2),
            None if self.zero_fill => Ok(m1 * m2),
            None => Err(Error::Uncovered(describe(first.0, "mean", p, q))),
        }
    }

    fn fluct_product(&self, kind: Kind, p: (Index, Index), q: (Index, Index)) -> Result<C> {
        let t = self.kind(kind);
        let p = pair(p.0, p.1);
        let q = pair(q.0, q.1);
        if p == q {
            Ok(if p.0 == p.1 {
                t.fluct_diag.clone()
            } else {
                t.fluct_off.clone()
            })
        } else if self.zero_fill {
            Ok(C::zero())
        } else {
            Err(Error::Uncovered(describe(kind, "fluct", p, q)))
        }
    }
}

type PairKey = (Kind, (Index, Index));

/// An element-wise specification for concrete indices.
///
/// Means must be supplied for every element used. Covariances that are not
/// supplied are zero.
#[derive(Debug, Clone, Default)]
pub struct TableSpec {
    means: HashMap<PairKey, f64>,
    mean_cov: HashMap<(PairKey, PairKey), f64>,
    fluct_cov: HashMap<(PairKey, PairKey), f64>,
}

fn ordered(a: PairKey, b: PairKey) -> (PairKey, PairKey) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl TableSpec {
    /// An empty table.
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `E(V_ab)` for `kind`.
    pub fn set_mean(&mut self, kind: Kind, a: Index, b: Index, value: f64) -> &mut Self {
        self.means.insert((kind, pair(a, b)), value);
        self
    }

    /// Sets `Cov(V_ab, V_cd)`; the kinds may differ.
    pub fn set_mean_cov(&mut self, first: (Kind, Index, Index), second: (Kind, Index, Index), value: f64) -> &mut Self {
        let key = ordered((first.0, pair(first.1, first.2)), (second.0, pair(second.1, second.2)));
        self.mean_cov.insert(key, value);
        self
    }

    /// Sets `E(S_ab S_cd)` for same-time residual matrices of `kind`.
    pub fn set_fluct_cov(&mut self, kind: Kind, p: (Index, Index), q: (Index, Index), value: f64) -> &mut Self {
        let key = ordered((kind, pair(p.0, p.1)), (kind, pair(q.0, q.1)));
        self.fluct_cov.insert(key, value);
        self
    }
}

impl MomentTable<f64> for TableSpec {
    fn mean(&self, kind: Kind, a: Index, b: Index) -> Result<f64> {
        self.means
            .get(&(kind, pair(a, b)))
            .copied()
            .ok_or_else(|| Error::Uncovered(format!("mean of {kind:?} element ({a},{b})")))
    }

    fn mean_product(&self, first: (Kind, Index, Index), second: (Kind, Index, Index)) -> Result<f64> {
        let key = ordered((first.0, pair(first.1, first.2)), (second.0, pair(second.1, second.2)));
        let cov = self.mean_cov.get(&key).copied().unwrap_or(0.0);
        Ok(cov + self.mean(first.0, first.1, first.2)? * self.mean(second.0, second.1, second.2)?)
    }

    fn fluct_product(&self, kind: Kind, p: (Index, Index), q: (Index, Index)) -> Result<f64> {
        let key = ordered((kind, pair(p.0, p.1)), (kind, pair(q.0, q.1)));
        Ok(self.fluct_cov.get(&key).copied().unwrap_or(0.0))
    }
}
