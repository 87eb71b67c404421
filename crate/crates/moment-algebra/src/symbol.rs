use std::fmt;

/// Which residual sequence a symbol belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// State residuals `ω_t`, with `ω_tω_tᵀ = V^ω + S^ω_t`.
    State,
    /// Observation residuals `ν_t`, with `ν_tν_tᵀ = V^ν + S^ν_t`.
    Obs,
}

impl Kind {
    pub(crate) fn residual_name(self) -> &'static str {
        match self {
            Kind::State => "A",
            Kind::Obs => "R",
        }
    }
    pub(crate) fn mean_name(self) -> &'static str {
        match self {
            Kind::State => "VA",
            Kind::Obs => "V",
        }
    }
    pub(crate) fn fluct_name(self) -> &'static str {
        match self {
            Kind::State => "SA",
            Kind::Obs => "S",
        }
    }
}

/// An element index. Small ids render as the letters `J, K, L, M, …` when
/// used symbolically.
pub type Index = u32;

/// A time offset relative to a reference time `T1`.
pub type Time = i32;

/// Sorted index pair for symmetric symbols.
pub(crate) fn pair(a: Index, b: Index) -> (Index, Index) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A factor in a residual polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    /// Residual element `index` at `time`. `slot` records which linear
    /// factor of a product the residual came from; same-time residuals are
    /// paired in slot order.
    Res {
        kind: Kind,
        time: Time,
        slot: u32,
        index: Index,
    },
    /// Element `(a, b)` of the mean matrix `V^ω` or `V^ν`, with `a ≤ b`.
    Mean { kind: Kind, a: Index, b: Index },
    /// Element `(a, b)` of the residual matrix `S^ω_t` or `S^ν_t`, with `a ≤ b`.
    Fluct { kind: Kind, a: Index, b: Index, time: Time },
}

impl Sym {
    /// A residual element in slot zero.
    pub fn res(kind: Kind, index: Index, time: Time) -> Self {
        Sym::Res {
            kind,
            time,
            slot: 0,
            index,
        }
    }

    /// A mean-matrix element.
    pub fn mean(kind: Kind, a: Index, b: Index) -> Self {
        let (a, b) = pair(a, b);
        Sym::Mean { kind, a, b }
    }

    /// A residual-matrix element.
    pub fn fluct(kind: Kind, a: Index, b: Index, time: Time) -> Self {
        let (a, b) = pair(a, b);
        Sym::Fluct { kind, a, b, time }
    }
}

/// An expectation that the rules cannot reduce further; its value comes
/// from the specification.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `E(V_ab)`.
    Mean1 { kind: Kind, a: Index, b: Index },
    /// `E(V_ab · V_cd)` for two means of the same kind (or of different
    /// kinds when cross moments are kept), pairs sorted.
    Mean2 {
        first: (Kind, Index, Index),
        second: (Kind, Index, Index),
    },
    /// `E(S_ab,t · S_cd,t)`, pairs sorted. The time is kept for display only;
    /// the specification is stationary.
    Fluct2 {
        kind: Kind,
        first: (Index, Index),
        second: (Index, Index),
        time: Time,
    },
}

impl Atom {
    pub(crate) fn mean1(kind: Kind, a: Index, b: Index) -> Self {
        let (a, b) = pair(a, b);
        Atom::Mean1 { kind, a, b }
    }

    pub(crate) fn mean2(k1: Kind, p: (Index, Index), k2: Kind, q: (Index, Index)) -> Self {
        let x = (k1, pair(p.0, p.1).0, pair(p.0, p.1).1);
        let y = (k2, pair(q.0, q.1).0, pair(q.0, q.1).1);
        let (first, second) = if x <= y { (x, y) } else { (y, x) };
        Atom::Mean2 { first, second }
    }

    pub(crate) fn fluct2(kind: Kind, p: (Index, Index), q: (Index, Index), time: Time) -> Self {
        let (x, y) = (pair(p.0, p.1), pair(q.0, q.1));
        let (first, second) = if x <= y { (x, y) } else { (y, x) };
        Atom::Fluct2 {
            kind,
            first,
            second,
            time,
        }
    }

    /// Applies an index map and re-canonicalizes.
    pub fn substitute(&self, f: &impl Fn(Index) -> Index) -> Self {
        match *self {
            Atom::Mean1 { kind, a, b } => Atom::mean1(kind, f(a), f(b)),
            Atom::Mean2 { first, second } => {
                Atom::mean2(first.0, (f(first.1), f(first.2)), second.0, (f(second.1), f(second.2)))
            }
            Atom::Fluct2 {
                kind,
                first,
                second,
                time,
            } => Atom::fluct2(kind, (f(first.0), f(first.1)), (f(second.0), f(second.1)), time),
        }
    }
}

/// How indices and times are written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexStyle {
    /// `J, K, L, M, …` and `T1 - 2`.
    #[default]
    Symbolic,
    /// Zero-based integers and integer time offsets.
    Numeric,
}

pub(crate) fn index_name(i: Index, style: IndexStyle) -> String {
    match style {
        IndexStyle::Numeric => i.to_string(),
        IndexStyle::Symbolic => {
            const LETTERS: [&str; 8] = ["J", "K", "L", "M", "N", "P", "Q", "U"];
            LETTERS
                .get(i as usize)
                .map(|s| s.to_string())
                .unwrap_or_else(|| format!("I{i}"))
        }
    }
}

pub(crate) fn time_name(t: Time, style: IndexStyle) -> String {
    match style {
        IndexStyle::Numeric => t.to_string(),
        IndexStyle::Symbolic => match t.cmp(&0) {
            std::cmp::Ordering::Equal => "T1".into(),
            std::cmp::Ordering::Greater => format!("T1 + {t}"),
            std::cmp::Ordering::Less => format!("T1 - {}", -t),
        },
    }
}

impl Sym {
    pub(crate) fn render(&self, style: IndexStyle) -> String {
        let i = |x| index_name(x, style);
        match *self {
            Sym::Res { kind, time, index, .. } => {
                format!("{}({},{})", kind.residual_name(), i(index), time_name(time, style))
            }
            Sym::Mean { kind, a, b } => format!("{}({},{})", kind.mean_name(), i(a), i(b)),
            Sym::Fluct { kind, a, b, time } => {
                format!("{}({},{},{})", kind.fluct_name(), i(a), i(b), time_name(time, style))
            }
        }
    }
}

impl Atom {
    pub(crate) fn render(&self, style: IndexStyle) -> String {
        let i = |x| index_name(x, style);
        match *self {
            Atom::Mean1 { kind, a, b } => format!("EX({}({},{}))", kind.mean_name(), i(a), i(b)),
            Atom::Mean2 { first, second } => format!(
                "EX({}({},{})*{}({},{}))",
                first.0.mean_name(),
                i(first.1),
                i(first.2),
                second.0.mean_name(),
                i(second.1),
                i(second.2)
            ),
            Atom::Fluct2 {
                kind,
                first,
                second,
                time,
            } => {
                let t = time_name(time, style);
                format!(
                    "EX({n}({},{},{t})*{n}({},{},{t}))",
                    i(first.0),
                    i(first.1),
                    i(second.0),
                    i(second.1),
                    n = kind.fluct_name()
                )
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(IndexStyle::Symbolic))
    }
}
