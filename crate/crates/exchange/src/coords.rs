use bayeslin_core::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// An ordering of the `r(r+1)/2` distinct elements of a symmetric `r×r` matrix.
///
/// Each coordinate is a pair `(i, j)` with `i ≤ j`. The canonical order lists
/// the diagonal first and then the off-diagonal pairs row by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymCoords {
    r: usize,
    pairs: Vec<(usize, usize)>,
    lookup: Vec<usize>,
}

impl SymCoords {
    /// Diagonal elements first, then `(i, j)` with `i < j` in row-major order.
    pub fn canonical(r: usize) -> Self {
        let mut pairs: Vec<(usize, usize)> = (0..r).map(|i| (i, i)).collect();
        for i in 0..r {
            for j in (i + 1)..r {
                pairs.push((i, j));
            }
        }
        Self::custom(r, pairs).expect("canonical order is a valid ordering")
    }

    /// A user-chosen ordering. Every unordered pair must appear exactly once;
    /// `(j, i)` is accepted for `(i, j)`.
    pub fn custom(r: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let d = r * (r + 1) / 2;
        if pairs.len() != d {
            return Err(Error::Dimension(format!(
                "{} coordinates given for {d} distinct elements",
                pairs.len()
            )));
        }
        let mut lookup = vec![usize::MAX; r * r];
        let mut norm = Vec::with_capacity(d);
        for (c, &(i, j)) in pairs.iter().enumerate() {
            if i >= r || j >= r {
                return Err(Error::Dimension(format!("pair ({i}, {j}) outside {r}x{r}")));
            }
            let (i, j) = (i.min(j), i.max(j));
            if lookup[r * j + i] != usize::MAX {
                return Err(Error::InvalidArgument(format!("pair ({i}, {j}) listed twice")));
            }
            lookup[r * j + i] = c;
            lookup[r * i + j] = c;
            norm.push((i, j));
        }
        Ok(Self { r, pairs: norm, lookup })
    }

    /// Matrix dimension `r`.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of distinct coordinates.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// Whether there are no coordinates.
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The `(i, j)` pairs in coordinate order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Coordinate holding element `(i, j)` (either orientation).
    pub fn index_of(&self, i: usize, j: usize) -> usize {
        self.lookup[self.r * j + i]
    }

    /// The `r²×d` duplication matrix mapping distinct coordinates to `vec` form.
    pub fn duplication(&self) -> DMatrix<f64> {
        let r = self.r;
        DMatrix::from_fn(r * r, self.len(), |v, c| if self.lookup[v] == c { 1.0 } else { 0.0 })
    }

    /// Distinct elements of a symmetric matrix in coordinate order.
    pub fn half_vec(&self, a: &DMatrix<f64>) -> Result<DVector<f64>> {
        self.check_square(a)?;
        Ok(DVector::from_iterator(
            self.len(),
            self.pairs.iter().map(|&(i, j)| 0.5 * (a[(i, j)] + a[(j, i)])),
        ))
    }

    /// Symmetric matrix with the given distinct elements.
    pub fn from_half(&self, v: &DVector<f64>) -> Result<DMatrix<f64>> {
        if v.len() != self.len() {
            return Err(Error::Dimension(format!(
                "{} values for {} coordinates",
                v.len(),
                self.len()
            )));
        }
        let r = self.r;
        Ok(DMatrix::from_fn(r, r, |i, j| v[self.index_of(i, j)]))
    }

    /// Restricts an `r²×r²` covariance over `vec` slots to the distinct
    /// coordinates: entry `(c, c')` is the covariance of `A_ij` and `A_kl`.
    pub fn compress(&self, full: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let r = self.r;
        if full.nrows() != r * r || full.ncols() != r * r {
            return Err(Error::Dimension(format!(
                "expected {}x{} matrix, got {}x{}",
                r * r,
                r * r,
                full.nrows(),
                full.ncols()
            )));
        }
        let d = self.len();
        Ok(DMatrix::from_fn(d, d, |a, b| {
            let (i, j) = self.pairs[a];
            let (k, l) = self.pairs[b];
            full[(r * j + i, r * l + k)]
        }))
    }

    /// Expands a covariance over distinct coordinates to `vec` slots.
    pub fn expand(&self, distinct: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let d = self.len();
        if distinct.nrows() != d || distinct.ncols() != d {
            return Err(Error::Dimension(format!(
                "expected {d}x{d} matrix, got {}x{}",
                distinct.nrows(),
                distinct.ncols()
            )));
        }
        let n = self.r * self.r;
        Ok(DMatrix::from_fn(n, n, |u, v| {
            distinct[(self.lookup[u], self.lookup[v])]
        }))
    }

    /// Human-readable label such as `V(1,2)`, 1-based.
    pub fn label(&self, prefix: &str, c: usize) -> String {
        let (i, j) = self.pairs[c];
        format!("{prefix}({},{})", i + 1, j + 1)
    }

    fn check_square(&self, a: &DMatrix<f64>) -> Result<()> {
        if a.nrows() != self.r || a.ncols() != self.r {
            return Err(Error::Dimension(format!(
                "expected {}x{} matrix, got {}x{}",
                self.r,
                self.r,
                a.nrows(),
                a.ncols()
            )));
        }
        Ok(())
    }
}
