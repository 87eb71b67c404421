use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{check_nnd, checked_symmetric, rank, Tolerances};

static NEXT_STORE_ID: AtomicU64 = AtomicU64::new(1);

/// Labelled scalar quantities with an expectation vector and a symmetric NND
/// covariance matrix.
#[derive(Debug, Clone)]
pub struct BeliefStore {
    id: u64,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    expectation: DVector<f64>,
    covariance: DMatrix<f64>,
    tol: Tolerances,
}

impl BeliefStore {
    /// Builds a store with default tolerances. The covariance is symmetrized
    /// after the symmetry check.
    pub fn new(labels: Vec<String>, expectation: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerances(labels, expectation, covariance, Tolerances::default())
    }

    /// Builds a store with explicit tolerances.
    pub fn with_tolerances(
        labels: Vec<String>,
        expectation: DVector<f64>,
        covariance: DMatrix<f64>,
        tol: Tolerances,
    ) -> Result<Self> {
        let n = labels.len();
        if expectation.len() != n || covariance.nrows() != n || covariance.ncols() != n {
            return Err(Error::Dimension(format!(
                "{n} labels, expectation of length {}, covariance {}x{}",
                expectation.len(),
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if expectation.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("expectation".into()));
        }
        let covariance = checked_symmetric("covariance", &covariance, tol.sym)?;
        check_nnd("covariance", &covariance, tol.psd)?;
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(BeliefStore {
            id: NEXT_STORE_ID.fetch_add(1, Ordering::Relaxed),
            labels,
            index,
            expectation,
            covariance,
            tol,
        })
    }

    /// Number of quantities.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when the store holds no quantities.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Quantity labels in store order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Expectation vector.
    pub fn expectation(&self) -> &DVector<f64> {
        &self.expectation
    }

    /// Covariance matrix.
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Tolerances used by this store and by adjustments over it.
    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    /// Position of a label.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Subspace spanned by the named quantities, one row per label.
    pub fn select(&self, labels: &[&str]) -> Result<Subspace> {
        let mut comb = DMatrix::zeros(labels.len(), self.len());
        for (row, l) in labels.iter().enumerate() {
            comb[(row, self.index_of(l)?)] = 1.0;
        }
        self.subspace(comb, DVector::zeros(labels.len()))
    }

    /// Subspace spanned by the named quantities given as owned strings.
    pub fn select_owned(&self, labels: &[String]) -> Result<Subspace> {
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        self.select(&refs)
    }

    /// Subspace whose spanning elements are `combinations · X + offsets`.
    ///
    /// Rows with zero variance are allowed. The remaining rows must be
    /// linearly independent.
    pub fn subspace(&self, combinations: DMatrix<f64>, offsets: DVector<f64>) -> Result<Subspace> {
        if combinations.ncols() != self.len() || offsets.len() != combinations.nrows() {
            return Err(Error::Dimension(format!(
                "combinations {}x{} with {} offsets over a store of {} quantities",
                combinations.nrows(),
                combinations.ncols(),
                offsets.len(),
                self.len()
            )));
        }
        let var = &combinations * &self.covariance * combinations.transpose();
        let scale = var.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let live: Vec<usize> = (0..combinations.nrows())
            .filter(|&i| scale > 0.0 && var[(i, i)] > self.tol.rank * scale)
            .collect();
        if !live.is_empty() {
            let rows: Vec<_> = live.iter().map(|&i| combinations.row(i)).collect();
            let sub = DMatrix::from_rows(&rows);
            let rk = rank(&sub, self.tol.rank);
            if rk < live.len() {
                return Err(Error::RankDeficient {
                    rank: rk,
                    rows: live.len(),
                });
            }
        }
        Ok(Subspace {
            store_id: self.id,
            combinations,
            offsets,
        })
    }

    /// Concatenation `a + b` of two subspaces over this store.
    pub fn join(&self, a: &Subspace, b: &Subspace) -> Result<Subspace> {
        self.owns(a)?;
        self.owns(b)?;
        let rows: Vec<_> = a.combinations.row_iter().chain(b.combinations.row_iter()).collect();
        let comb = if rows.is_empty() {
            DMatrix::zeros(0, self.len())
        } else {
            DMatrix::from_rows(&rows)
        };
        let offsets = DVector::from_iterator(a.dim() + b.dim(), a.offsets.iter().chain(b.offsets.iter()).cloned());
        self.subspace(comb, offsets)
    }

    /// Errors unless the subspace was built over this store.
    pub fn owns(&self, s: &Subspace) -> Result<()> {
        if s.store_id != self.id || s.combinations.ncols() != self.len() {
            return Err(Error::StoreMismatch);
        }
        Ok(())
    }

    /// Expectation of each spanning element.
    pub fn mean_of(&self, s: &Subspace) -> DVector<f64> {
        &s.combinations * &self.expectation + &s.offsets
    }

    /// Cov(a, b) between the spanning elements of two subspaces.
    pub fn cov_of(&self, a: &Subspace, b: &Subspace) -> DMatrix<f64> {
        &a.combinations * &self.covariance * b.combinations.transpose()
    }

    /// Var(s) of the spanning elements.
    pub fn var_of(&self, s: &Subspace) -> DMatrix<f64> {
        crate::linalg::symmetrize(&self.cov_of(s, s))
    }
}

/// Span of a list of affine combinations of store quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    store_id: u64,
    /// One row of coefficients over the store quantities per spanning element.
    pub combinations: DMatrix<f64>,
    /// Constant offset added to each spanning element.
    pub offsets: DVector<f64>,
}

impl Subspace {
    /// Number of spanning elements.
    pub fn dim(&self) -> usize {
        self.combinations.nrows()
    }

    /// Evaluates the spanning elements at a full vector of quantity values.
    pub fn evaluate(&self, values: &DVector<f64>) -> DVector<f64> {
        &self.combinations * values + &self.offsets
    }

    /// True when both subspaces were built over the same store.
    pub fn same_store(&self, other: &Subspace) -> bool {
        self.store_id == other.store_id
    }
}
