use std::collections::BTreeMap;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::symbol::{Atom, Index, IndexStyle, Kind, Sym, Time};

/// A polynomial in residuals, mean-matrix and residual-matrix elements.
pub type MomentExpr<C> = Poly<Sym, C>;

/// A polynomial in irreducible expectations.
pub type Expectation<C> = Poly<Atom, C>;

/// Options for reducing expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectOptions {
    /// Replace `E(V^ω V^ν)` by `E(V^ω)E(V^ν)`. When false the product is kept
    /// as a second-moment atom so that a specification can supply it.
    pub factorize_cross_means: bool,
}

impl Default for ExpectOptions {
    fn default() -> Self {
        ExpectOptions {
            factorize_cross_means: true,
        }
    }
}

/// Residual element `index` of `kind` at `time`.
pub fn residual<C: Coeff>(kind: Kind, index: Index, time: Time) -> MomentExpr<C> {
    Poly::symbol(Sym::res(kind, index, time))
}

/// Mean-matrix element `(a, b)` of `kind`.
pub fn mean<C: Coeff>(kind: Kind, a: Index, b: Index) -> MomentExpr<C> {
    Poly::symbol(Sym::mean(kind, a, b))
}

/// Residual-matrix element `(a, b)` of `kind` at `time`.
pub fn fluct<C: Coeff>(kind: Kind, a: Index, b: Index, time: Time) -> MomentExpr<C> {
    Poly::symbol(Sym::fluct(kind, a, b, time))
}

/// Tags every residual in `e` as coming from factor `slot`.
///
/// Same-time residuals of one kind are paired in ascending slot order, so
/// in a product `x₀x₁x₂x₃` of linear forms tagged `0…3` the pairing follows
/// the order in which the factors were formed.
pub fn in_slot<C: Coeff>(e: &MomentExpr<C>, slot: u32) -> MomentExpr<C> {
    e.map_symbols(|s| match *s {
        Sym::Res { kind, time, index, .. } => Sym::Res {
            kind,
            time,
            slot,
            index,
        },
        other => other,
    })
}

/// The product `Π factors`, with factor `i` tagged as slot `i`.
pub fn slotted_product<C: Coeff>(factors: &[&MomentExpr<C>]) -> MomentExpr<C> {
    let mut out = Poly::constant(C::one());
    for (i, f) in factors.iter().enumerate() {
        out = &out * &in_slot(f, i as u32);
    }
    out
}

/// Applies the pair substitutions `ωω → V^ω + S^ω` and `νν → V^ν + S^ν` to
/// every same-time pair until none remain.
pub fn canonical<C: Coeff>(e: &MomentExpr<C>) -> MomentExpr<C> {
    canonical_with(e, &mut |_| 0)
}

/// As [`canonical`], with `choose(n)` picking which of the `n` pending
/// (kind, time) groups to rewrite next. The result does not depend on the
/// choices.
pub fn canonical_with<C: Coeff>(e: &MomentExpr<C>, choose: &mut dyn FnMut(usize) -> usize) -> MomentExpr<C> {
    let mut out = Poly::zero();
    for (m, c) in e.terms() {
        let expanded = pair_monomial::<C>(m.to_vec(), choose);
        out = &out + &expanded.scale(c);
    }
    out
}

fn pair_monomial<C: Coeff>(m: Vec<Sym>, choose: &mut dyn FnMut(usize) -> usize) -> MomentExpr<C> {
    let mut groups: BTreeMap<(Kind, Time), Vec<usize>> = BTreeMap::new();
    for (i, s) in m.iter().enumerate() {
        if let Sym::Res { kind, time, .. } = *s {
            groups.entry((kind, time)).or_default().push(i);
        }
    }
    let pending: Vec<(&(Kind, Time), &Vec<usize>)> = groups.iter().filter(|(_, v)| v.len() >= 2).collect();
    if pending.is_empty() {
        return Poly::term(C::one(), m);
    }
    let pick = choose(pending.len()) % pending.len();
    let (&(kind, time), members) = pending[pick];
    // `m` is sorted and residuals order by (kind, time, slot, index), so the
    // first two members are the lowest-slot pair.
    let (i1, i2) = (members[0], members[1]);
    let index_of = |s: &Sym| match *s {
        Sym::Res { index, .. } => index,
        _ => unreachable!("group members are residuals"),
    };
    let (a, b) = (index_of(&m[i1]), index_of(&m[i2]));
    let rest: Vec<Sym> = m
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != i1 && *i != i2)
        .map(|(_, s)| *s)
        .collect();
    let mut with_mean = rest.clone();
    with_mean.push(Sym::mean(kind, a, b));
    with_mean.sort();
    let mut with_fluct = rest;
    with_fluct.push(Sym::fluct(kind, a, b, time));
    with_fluct.sort();
    &pair_monomial::<C>(with_mean, choose) + &pair_monomial::<C>(with_fluct, choose)
}

/// `E(e)` in terms of irreducible expectations.
pub fn expectation<C: Coeff>(e: &MomentExpr<C>) -> Result<Expectation<C>> {
    expectation_with(e, ExpectOptions::default())
}

/// `E(e)` with explicit options.
pub fn expectation_with<C: Coeff>(e: &MomentExpr<C>, opts: ExpectOptions) -> Result<Expectation<C>> {
    canonical(e).try_flat_map(|m| monomial_expectation::<C>(m, opts))
}

fn monomial_expectation<C: Coeff>(m: &[Sym], opts: ExpectOptions) -> Result<Expectation<C>> {
    let describe = || {
        m.iter()
            .map(|s| s.render(IndexStyle::Symbolic))
            .collect::<Vec<_>>()
            .join("*")
    };
    let mut means = Vec::new();
    let mut flucts: BTreeMap<(Kind, Time), Vec<(Index, Index)>> = BTreeMap::new();
    for s in m {
        match *s {
            // After pairing, a residual is alone in its (kind, time) group,
            // and all odd residual moments vanish.
            Sym::Res { .. } => return Ok(Poly::zero()),
            Sym::Mean { kind, a, b } => means.push((kind, a, b)),
            Sym::Fluct { kind, a, b, time } => flucts.entry((kind, time)).or_default().push((a, b)),
        }
    }
    // E(S) = 0, E(S·V) = 0, and residual matrices of different kinds or
    // times are uncorrelated, so any lone residual-matrix factor kills the term.
    if flucts.values().any(|v| v.len() == 1) {
        return Ok(Poly::zero());
    }
    if flucts.len() > 1 || flucts.values().any(|v| v.len() > 2) {
        return Err(Error::DegreeTooHigh(describe()));
    }
    if let Some((&(kind, time), pairs)) = flucts.iter().next() {
        if !means.is_empty() {
            return Err(Error::DegreeTooHigh(describe()));
        }
        return Ok(Poly::symbol(Atom::fluct2(kind, pairs[0], pairs[1], time)));
    }
    match means.as_slice() {
        [] => Ok(Poly::constant(C::one())),
        [(k, a, b)] => Ok(Poly::symbol(Atom::mean1(*k, *a, *b))),
        [(k1, a, b), (k2, c, d)] => {
            if k1 != k2 && opts.factorize_cross_means {
                Ok(&Poly::symbol(Atom::mean1(*k1, *a, *b)) * &Poly::symbol(Atom::mean1(*k2, *c, *d)))
            } else {
                Ok(Poly::symbol(Atom::mean2(*k1, (*a, *b), *k2, (*c, *d))))
            }
        }
        _ => Err(Error::DegreeTooHigh(describe())),
    }
}

/// `Cov(e1, e2) = E(e1·e2) − E(e1)E(e2)`.
pub fn covariance<C: Coeff>(e1: &MomentExpr<C>, e2: &MomentExpr<C>) -> Result<Expectation<C>> {
    covariance_with(e1, e2, ExpectOptions::default())
}

/// Covariance with explicit options.
pub fn covariance_with<C: Coeff>(
    e1: &MomentExpr<C>,
    e2: &MomentExpr<C>,
    opts: ExpectOptions,
) -> Result<Expectation<C>> {
    let joint = expectation_with(&(e1 * e2), opts)?;
    let product = &expectation_with(e1, opts)? * &expectation_with(e2, opts)?;
    Ok(&joint - &product)
}

/// Renames indices in an expectation and re-canonicalizes its atoms.
pub fn substitute_indices<C: Coeff>(e: &Expectation<C>, f: impl Fn(Index) -> Index) -> Expectation<C> {
    e.map_symbols(|a| a.substitute(&f))
}

/// Deterministic text of a residual polynomial.
pub fn render_expr<C: Coeff>(e: &MomentExpr<C>, style: IndexStyle) -> String {
    e.render_with(|s| s.render(style), |c| c.render())
}

/// Deterministic text of an expectation polynomial.
pub fn render_expectation<C: Coeff>(e: &Expectation<C>, style: IndexStyle) -> String {
    e.render_with(|s| s.render(style), |c| c.render())
}
