use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeff::Coeff;

/// A polynomial with coefficients in `C` over commuting symbols `S`.
///
/// Monomials are sorted symbol lists, so two equal polynomials have equal
/// term maps; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<S: Ord, C> {
    terms: BTreeMap<Vec<S>, C>,
}

impl<S: Ord + Clone, C: Coeff> Poly<S, C> {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    /// A constant.
    pub fn constant(c: C) -> Self {
        Self::term(c, Vec::new())
    }

    /// A single symbol with coefficient one.
    pub fn symbol(s: S) -> Self {
        Self::term(C::one(), vec![s])
    }

    /// `c · Π symbols`.
    pub fn term(c: C, mut symbols: Vec<S>) -> Self {
        symbols.sort();
        let mut p = Self::zero();
        p.add_term(symbols, c);
        p
    }

    /// Adds `c · monomial`, where `monomial` is already sorted.
    pub(crate) fn add_term(&mut self, monomial: Vec<S>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&monomial) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&monomial);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(monomial, c);
            }
        }
    }

    /// Whether every coefficient vanished.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Whether the polynomial has no terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&[S], &C)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), c))
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Applies `f` to every symbol and re-collects terms.
    pub fn map_symbols(&self, f: impl Fn(&S) -> S) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut mapped: Vec<S> = m.iter().map(&f).collect();
            mapped.sort();
            out.add_term(mapped, c.clone());
        }
        out
    }

    /// Replaces each monomial with the polynomial `f` returns for it,
    /// scaled by the monomial's coefficient.
    pub fn try_flat_map<T: Ord + Clone, E>(
        &self,
        mut f: impl FnMut(&[S]) -> Result<Poly<T, C>, E>,
    ) -> Result<Poly<T, C>, E> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let image = f(m)?;
            for (mm, cc) in image.terms {
                out.add_term(mm, cc * c.clone());
            }
        }
        Ok(out)
    }

    /// Evaluates with a value for each symbol.
    pub fn try_evaluate<E>(&self, mut value: impl FnMut(&S) -> Result<C, E>) -> Result<C, E> {
        let mut total = C::zero();
        for (m, c) in &self.terms {
            let mut prod = c.clone();
            for s in m {
                prod = prod * value(s)?;
            }
            total = total + prod;
        }
        Ok(total)
    }

    /// Renders as `c1*s1*s2 + c2*s3 - …` with a symbol printer and a
    /// coefficient printer.
    pub fn render_with(&self, sym: impl Fn(&S) -> String, coeff: impl Fn(&C) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        // Fewer factors first, then canonical order.
        let mut ordered: Vec<(&Vec<S>, &C)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        let mut out = String::new();
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            let text = coeff(c);
            let (negative, magnitude) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let symbols: Vec<String> = m.iter().map(&sym).collect();
            if symbols.is_empty() {
                out.push_str(&magnitude);
            } else {
                if magnitude != "1" {
                    out.push_str(&magnitude);
                    out.push('*');
                }
                out.push_str(&symbols.join("*"));
            }
        }
        out
    }
}

impl<S: Ord + Clone, C: Coeff> Add for &Poly<S, C> {
    type Output = Poly<S, C>;
    fn add(self, rhs: Self) -> Poly<S, C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Ord + Clone, C: Coeff> Sub for &Poly<S, C> {
    type Output = Poly<S, C>;
    fn sub(self, rhs: Self) -> Poly<S, C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<S: Ord + Clone, C: Coeff> Neg for &Poly<S, C> {
    type Output = Poly<S, C>;
    fn neg(self) -> Poly<S, C> {
        self.scale(&-C::one())
    }
}

impl<S: Ord + Clone, C: Coeff> Mul for &Poly<S, C> {
    type Output = Poly<S, C>;
    fn mul(self, rhs: Self) -> Poly<S, C> {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let mut m = Vec::with_capacity(a.len() + b.len());
                m.extend(a.iter().cloned());
                m.extend(b.iter().cloned());
                m.sort();
                out.add_term(m, ca.clone() * cb.clone());
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl<S: Ord + Clone, C: Coeff> $tr for Poly<S, C> {
            type Output = Poly<S, C>;
            fn $f(self, rhs: Self) -> Poly<S, C> {
                (&self).$f(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<S: Ord + Clone, C: Coeff> Neg for Poly<S, C> {
    type Output = Poly<S, C>;
    fn neg(self) -> Poly<S, C> {
        -&self
    }
}
