use nalgebra::{DMatrix, DVector};

/// A sparse affine combination `c + Σ wᵢ·qᵢ` of belief-store quantities.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Affine {
    /// `(quantity index, weight)` pairs, sorted by index with no repeats.
    pub terms: Vec<(usize, f64)>,
    /// Constant offset.
    pub constant: f64,
}

impl Affine {
    /// The zero combination.
    pub fn zero() -> Self {
        Self::default()
    }

    /// A single quantity with unit weight.
    pub fn quantity(index: usize) -> Self {
        Self {
            terms: vec![(index, 1.0)],
            constant: 0.0,
        }
    }

    /// A constant.
    pub fn constant(value: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: value,
        }
    }

    /// Builds from arbitrary terms, merging repeated indices and dropping zeros.
    pub fn new(mut terms: Vec<(usize, f64)>, constant: f64) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (i, w) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => merged.push((i, w)),
            }
        }
        merged.retain(|t| t.1 != 0.0);
        Self {
            terms: merged,
            constant,
        }
    }

    /// Multiplies every weight and the constant by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.terms.iter().map(|&(i, w)| (i, w * s)).collect(), self.constant * s)
    }

    /// Value for a full vector of quantity values.
    pub fn evaluate(&self, values: &DVector<f64>) -> f64 {
        self.constant + self.terms.iter().map(|&(i, w)| w * values[i]).sum::<f64>()
    }

    /// Expectation under the store's expectation vector.
    pub fn mean(&self, expectation: &DVector<f64>) -> f64 {
        self.evaluate(expectation)
    }

    /// `Cov(self, other)` under the store covariance.
    pub fn covariance(&self, other: &Affine, cov: &DMatrix<f64>) -> f64 {
        let mut total = 0.0;
        for &(i, a) in &self.terms {
            for &(j, b) in &other.terms {
                total += a * b * cov[(i, j)];
            }
        }
        total
    }

    /// Whether the combination has no random part.
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }
}

/// How a matrix object's second-order structure is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectKind {
    /// Every entry is an affine combination of store quantities, stored
    /// column-major as `entries[r·j + i]`.
    Derived { entries: Vec<Affine> },
    /// Inner products with other objects are declared directly on the space;
    /// only the expectation matrix is known entrywise.
    Primitive { expectation: DMatrix<f64> },
    /// A fixed matrix.
    Constant(DMatrix<f64>),
}

/// An `r×r` random matrix, an element of a matrix space.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixObject {
    /// Name used to refer to the object within a space.
    pub name: String,
    /// Matrix dimension.
    pub r: usize,
    /// Specification of the entries.
    pub kind: ObjectKind,
    /// Whether entry `(i, j)` equals entry `(j, i)`.
    pub symmetric: bool,
}

impl MatrixObject {
    /// An object with affine entries given row by row as `grid[i][j]`.
    pub fn derived(name: impl Into<String>, grid: Vec<Vec<Affine>>, symmetric: bool) -> Self {
        let r = grid.len();
        let mut entries = vec![Affine::zero(); r * r];
        for (i, row) in grid.into_iter().enumerate() {
            for (j, e) in row.into_iter().enumerate() {
                entries[r * j + i] = e;
            }
        }
        Self {
            name: name.into(),
            r,
            kind: ObjectKind::Derived { entries },
            symmetric,
        }
    }

    /// An object whose entry `(i, j)` is the single quantity `index[i][j]`.
    pub fn from_indices(name: impl Into<String>, index: &[Vec<usize>], symmetric: bool) -> Self {
        let grid = index
            .iter()
            .map(|row| row.iter().map(|&q| Affine::quantity(q)).collect())
            .collect();
        Self::derived(name, grid, symmetric)
    }

    /// A primitive object with a declared expectation.
    pub fn primitive(name: impl Into<String>, expectation: DMatrix<f64>, symmetric: bool) -> Self {
        Self {
            name: name.into(),
            r: expectation.nrows(),
            kind: ObjectKind::Primitive { expectation },
            symmetric,
        }
    }

    /// A constant matrix.
    pub fn constant(name: impl Into<String>, value: DMatrix<f64>) -> Self {
        let symmetric = value == value.transpose();
        Self {
            name: name.into(),
            r: value.nrows(),
            kind: ObjectKind::Constant(value),
            symmetric,
        }
    }

    /// Entry `(i, j)` as an affine combination, for derived and constant objects.
    pub fn entry(&self, i: usize, j: usize) -> Option<Affine> {
        match &self.kind {
            ObjectKind::Derived { entries } => Some(entries[self.r * j + i].clone()),
            ObjectKind::Constant(m) => Some(Affine::constant(m[(i, j)])),
            ObjectKind::Primitive { .. } => None,
        }
    }

    /// Expectation matrix given the store expectation vector.
    pub fn expectation(&self, store_mean: Option<&DVector<f64>>) -> DMatrix<f64> {
        match &self.kind {
            ObjectKind::Derived { entries } => {
                let mean = store_mean.expect("derived objects require a store");
                DMatrix::from_fn(self.r, self.r, |i, j| entries[self.r * j + i].mean(mean))
            }
            ObjectKind::Primitive { expectation } => expectation.clone(),
            ObjectKind::Constant(m) => m.clone(),
        }
    }

    /// Realized value of a derived or constant object from a full vector of
    /// quantity values.
    pub fn evaluate(&self, values: &DVector<f64>) -> Option<DMatrix<f64>> {
        match &self.kind {
            ObjectKind::Derived { entries } => Some(DMatrix::from_fn(self.r, self.r, |i, j| {
                entries[self.r * j + i].evaluate(values)
            })),
            ObjectKind::Constant(m) => Some(m.clone()),
            ObjectKind::Primitive { .. } => None,
        }
    }
}
