use bayeslin_core::linalg::{check_nnd, checked_symmetric, symmetrize};
use bayeslin_core::{Result, Tolerances};
use nalgebra::DMatrix;

use crate::coords::SymCoords;
use crate::products::{direct_product, star_product};

/// Fourth-order moments of a zero-mean normal vector, in two forms.
#[derive(Debug, Clone)]
pub struct FourthMoments {
    /// `Var(vec(XXᵀ))` over all `r²` slots.
    pub full: DMatrix<f64>,
    /// The same covariance restricted to the distinct elements of `XXᵀ`.
    pub distinct: DMatrix<f64>,
    /// Ordering of the distinct elements.
    pub coords: SymCoords,
}

/// `Var(vec(XXᵀ)) = Σ⊗Σ + Σ⋆Σ` for `X` zero-mean normal with variance `Σ`,
/// compressed over the canonical distinct coordinates.
pub fn mvn_fourth_moments(var_r: &DMatrix<f64>) -> Result<FourthMoments> {
    mvn_fourth_moments_in(var_r, SymCoords::canonical(var_r.nrows()))
}

/// As [`mvn_fourth_moments`] with a chosen ordering of distinct coordinates.
pub fn mvn_fourth_moments_in(var_r: &DMatrix<f64>, coords: SymCoords) -> Result<FourthMoments> {
    let tol = Tolerances::default();
    let v = checked_symmetric("Var(R)", var_r, tol.sym)?;
    check_nnd("Var(R)", &v, tol.psd)?;
    if coords.r() != v.nrows() {
        return Err(bayeslin_core::Error::Dimension(format!(
            "coordinates for r = {} but Var(R) is {}x{}",
            coords.r(),
            v.nrows(),
            v.ncols()
        )));
    }
    let full = symmetrize(&(direct_product(&v, &v)? + star_product(&v, &v)?));
    let distinct = coords.compress(&full)?;
    Ok(FourthMoments { full, distinct, coords })
}
