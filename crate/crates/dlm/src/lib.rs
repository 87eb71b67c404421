//! Second-order multivariate dynamic linear models.
//!
//! The model is `X_t = Fᵀθ_t + ν_t`, `θ_t = Gθ_{t−1} + ω_t`, with beliefs
//! about the residual variances `V^ν` and `V^ω` held to second order.
//! When the model is two-step invertible, a differencing matrix `H`
//! eliminates the state from the one- and two-step differences
//! `X′_t = X_t − HX_{t−1}` and `X″_t = X_t − H²X_{t−2}`. Their quadratic
//! products are exchangeable over time, and their covariance structure
//! follows from a fourth-order specification of the residuals. The crate
//! builds that structure, identifies `V^ν` and `FᵀV^ωF` from the products,
//! adjusts both variances by the observed products, filters the series, and
//! re-adjusts the variances as data arrive.
//!
//! ```
//! use bayeslin_dlm::{compute_h, difference_observables};
//! use nalgebra::{DMatrix, DVector};
//!
//! let f = DMatrix::<f64>::identity(2, 2);
//! let h = compute_h(&f, &f).unwrap();
//! assert_eq!(h, DMatrix::identity(2, 2));
//! let data = [
//!     DVector::from_vec(vec![1.0, 2.0]),
//!     DVector::from_vec(vec![3.0, 5.0]),
//!     DVector::from_vec(vec![4.0, 9.0]),
//! ];
//! let d = difference_observables(&h, &data).unwrap();
//! assert_eq!(d.one_at(2).unwrap(), &DVector::from_vec(vec![2.0, 3.0]));
//! assert_eq!(d.two_at(3).unwrap(), &DVector::from_vec(vec![3.0, 7.0]));
//! ```

mod adjust;
mod error;
mod filter;
mod identify;
mod model;
mod readjust;
mod simulate;
mod space;
mod structure;

pub use adjust::{
    adjust_dlm_covariances, adjust_target, recover_w, CovarianceAdjustment, DlmAdjustment, SequentialAdjustment,
    DENSE_FALLBACK_LIMIT,
};
pub use error::{Error, Result};
pub use filter::{batch_terminal_state, filter_final_step, first_order_filter, FilterStep};
pub use identify::{identification_targets, mean_component, IdentificationTargets, Recipe, RecipeTerm};
pub use model::{
    compute_h, difference_observables, smallest_singular_value, DiffSeries, DlmSpec, ElementPattern, QuarticSpec, TOL_H,
};
pub use readjust::{block_log_ratio, block_log_size_ratio, iterative_readjust, ReadjustStep};
pub use simulate::simulate_gaussian;
pub use space::{DlmSpace, Observable};
pub use structure::{
    moment_table, quadratic_structure, quadratic_structure_derived, Conjugation, DifferenceForms, Family, ObjectType,
    QuadraticStructure, Source, Target, BAND,
};
