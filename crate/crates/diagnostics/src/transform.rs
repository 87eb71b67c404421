use bayeslin_core::linalg::{sorted_eigen, symmetrize};
use nalgebra::{DMatrix, DVector};

/// Eigen-analysis of an operator `A*A` from a matrix representation of `A`
/// between orthonormal bases.
#[derive(Debug, Clone)]
pub struct ObservedTransform {
    /// `n×m` representation of `A`: column `i` holds the image of the `i`-th
    /// basis element of the target space.
    pub representation: DMatrix<f64>,
    /// `m×m` representation of `A*A`, equal to `representationᵀ·representation`.
    pub operator: DMatrix<f64>,
    /// Eigenvalues of the operator in descending order, clamped at zero
    /// within tolerance.
    pub sizes: DVector<f64>,
    /// Orthonormal eigenvectors, one column per eigenvalue, in target-basis
    /// coordinates.
    pub bearings: DMatrix<f64>,
    /// Trace of the operator.
    pub size: f64,
}

impl ObservedTransform {
    /// Builds the analysis from the representation matrix.
    pub fn from_representation(representation: DMatrix<f64>) -> Self {
        let operator = symmetrize(&(representation.transpose() * &representation));
        let size = operator.trace();
        let (mut sizes, bearings) = sorted_eigen(&operator);
        let tol = 1e-12 * size.abs().max(f64::MIN_POSITIVE);
        for v in sizes.iter_mut() {
            if *v < 0.0 && *v > -tol {
                *v = 0.0;
            }
        }
        ObservedTransform {
            representation,
            operator,
            sizes,
            bearings,
            size,
        }
    }

    /// Eigenvalue–eigenvector pairs whose eigenvalue exceeds `tol` times the
    /// trace.
    pub fn nontrivial(&self, tol: f64) -> Vec<(f64, DVector<f64>)> {
        let cut = tol * self.size.abs();
        (0..self.sizes.len())
            .filter(|&k| self.sizes[k] > cut)
            .map(|k| (self.sizes[k], self.bearings.column(k).into_owned()))
            .collect()
    }

    /// Number of non-trivial eigen-pairs at tolerance `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.nontrivial(tol).len()
    }
}

/// Ratio of an observed size to its prior expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeRatio {
    /// Finite ratio.
    Finite(f64),
    /// Positive observed size against zero expected size.
    Infinite,
    /// Both sizes are zero.
    NotApplicable,
}

impl SizeRatio {
    /// `observed / expected` with the degenerate cases named.
    pub fn new(observed: f64, expected: f64) -> Self {
        let tiny = 1e-14 * observed.abs().max(1.0);
        if expected.abs() <= tiny {
            if observed.abs() <= tiny {
                SizeRatio::NotApplicable
            } else {
                SizeRatio::Infinite
            }
        } else {
            SizeRatio::Finite(observed / expected)
        }
    }

    /// The finite value, if any.
    pub fn value(self) -> Option<f64> {
        match self {
            SizeRatio::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// A priori and observed transforms of one adjustment.
#[derive(Debug, Clone)]
pub struct TransformComparison {
    /// The observed transform `E_d|_B* E_d|_B`.
    pub observed: ObservedTransform,
    /// The a priori transform `E_D|_B* E_D|_B`, equal to the belief transform.
    pub prior: ObservedTransform,
    /// `observed.size / prior.size`.
    pub size_ratio: SizeRatio,
}

impl TransformComparison {
    pub(crate) fn new(observed: ObservedTransform, prior: ObservedTransform) -> Self {
        let size_ratio = SizeRatio::new(observed.size, prior.size);
        TransformComparison {
            observed,
            prior,
            size_ratio,
        }
    }
}

/// Shading level in `[0, 1]` for a size ratio: `min(1, |ln ratio| / ln k)`.
///
/// A ratio of zero or infinity saturates at one; a not-applicable ratio
/// gives zero.
pub fn shading_transform(ratio: SizeRatio, k: f64) -> crate::Result<f64> {
    if !k.is_finite() || k <= 1.0 {
        return Err(crate::Error::InvalidArgument(format!(
            "shading scale must exceed one, got {k}"
        )));
    }
    Ok(match ratio {
        SizeRatio::NotApplicable => 0.0,
        SizeRatio::Infinite => 1.0,
        SizeRatio::Finite(v) if v < 0.0 => {
            return Err(crate::Error::InvalidArgument(format!("negative size ratio {v}")))
        }
        SizeRatio::Finite(0.0) => 1.0,
        SizeRatio::Finite(v) => (v.ln().abs() / k.ln()).min(1.0),
    })
}

/// Default shading scale.
pub const DEFAULT_SHADING_SCALE: f64 = 10.0;
