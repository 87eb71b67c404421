//! Second-order exchangeability and the algebra of quadratic products.
//!
//! Exchangeable vectors decompose as `X_k = M + R_k`. Their quadratic
//! products decompose again as `R_k R_kᵀ = V + U_k`, and beliefs about the
//! underlying covariance matrix `V` can be revised from an observed sample
//! covariance matrix `S`.
//!
//! The crate provides the `vec` operator, direct and star products, the
//! normal-theory fourth-moment specification, beliefs over sample covariance
//! matrices, and the scalar adjustment of `V` by `S`.
//!
//! ```
//! use bayeslin_exchange::{direct_product, star_product, vec_permutation};
//! use nalgebra::DMatrix;
//!
//! let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
//! let b = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 4.0]);
//! let star = star_product(&a, &b).unwrap();
//! let permuted = vec_permutation(2, 2) * direct_product(&a, &b).unwrap();
//! assert_eq!(star, permuted);
//! ```

mod beliefs;
mod coords;
mod fourth;
mod model;
mod products;

pub use beliefs::{
    quadratic_adjust, quadratic_adjust_closed_form, sample_cov_beliefs, sample_cov_beliefs_multi, QuadraticAdjustment,
    SampleCovBeliefs,
};
pub use coords::SymCoords;
pub use fourth::{mvn_fourth_moments, mvn_fourth_moments_in, FourthMoments};
pub use model::{exchangeable_decompose, ExchangeableModel, QuadraticModel};
pub use products::{direct_product, star_product, unvec, vec, vec_permutation};
