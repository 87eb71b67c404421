//! Generalized second-order n-step exchangeability.
//!
//! A sequence of `q`-vectors `Y_k` is n-step exchangeable when the inner
//! products `(Y_ik, Y_jl)` depend only on the lag `l − k` and are constant,
//! equal to `c_ij`, for every lag of at least `n`. Such sequences decompose as
//! `Y_jk = M_j + R_jk`, where the mean components `M_j` have Gram `c` and the
//! residuals have zero inner product beyond lag `n − 1`.
//!
//! Lag Gram `d_δ` holds `(Y_ik, Y_j(k+δ))` for `δ ≥ 0`; negative lags use the
//! transpose.
//!
//! ```
//! use bayeslin_nstep::{classify_nstep, running_mean_gram, NStepModel};
//! use nalgebra::DMatrix;
//!
//! // One-step differences of a random walk observed with noise (r = s = 1).
//! let lag = |v: f64| DMatrix::from_element(1, 1, v);
//! let grams = vec![lag(3.0), lag(-1.0), lag(0.0), lag(0.0)];
//! assert_eq!(classify_nstep(&grams, 1e-12).unwrap(), Some(2));
//! let model = NStepModel::new(vec![lag(3.0), lag(-1.0)], lag(0.0)).unwrap();
//! assert!((running_mean_gram(&model, 2).unwrap()[(0, 0)] - 1.0).abs() < 1e-12);
//! ```

use bayeslin_core::linalg::{check_nnd, checked_symmetric, symmetrize};
use bayeslin_core::{Error, Result, Tolerances};
use nalgebra::{DMatrix, DVector};

/// Second-order structure of an n-step exchangeable sequence.
#[derive(Debug, Clone)]
pub struct NStepModel {
    /// Lag Grams `d_0, …, d_{n−1}`.
    pub within: Vec<DMatrix<f64>>,
    /// Gram `c` for every lag of at least `n`.
    pub tail: DMatrix<f64>,
    /// Expectations `e_j`, when known.
    pub expectations: Option<DVector<f64>>,
}

impl NStepModel {
    /// Validates the structure: `d_0` symmetric, `c` NND, and the Gram of a
    /// window of `max(2n, 4)` consecutive steps NND.
    pub fn new(within: Vec<DMatrix<f64>>, tail: DMatrix<f64>) -> Result<Self> {
        if within.is_empty() {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let q = tail.nrows();
        if within.iter().any(|d| d.shape() != (q, q)) || tail.ncols() != q {
            return Err(Error::Dimension("lag Grams must all be q×q".into()));
        }
        let tol = Tolerances::default();
        let mut within = within;
        within[0] = checked_symmetric("d_0", &within[0], tol.sym)?;
        let tail = checked_symmetric("c", &tail, tol.sym)?;
        check_nnd("c", &tail, tol.psd)?;
        let model = Self {
            within,
            tail,
            expectations: None,
        };
        let steps = (2 * model.n()).max(4);
        check_nnd("window Gram", &model.window_gram(steps), tol.psd)?;
        Ok(model)
    }

    /// Attaches expectations `e_j`.
    pub fn with_expectations(mut self, e: DVector<f64>) -> Result<Self> {
        if e.len() != self.q() {
            return Err(Error::Dimension(format!(
                "{} expectations for {} entities",
                e.len(),
                self.q()
            )));
        }
        self.expectations = Some(e);
        Ok(self)
    }

    /// Step count `n`.
    pub fn n(&self) -> usize {
        self.within.len()
    }

    /// Entities per step.
    pub fn q(&self) -> usize {
        self.tail.nrows()
    }

    /// `(Y_k, Y_{k+δ})` for any integer lag.
    pub fn lag(&self, delta: i64) -> DMatrix<f64> {
        let a = delta.unsigned_abs() as usize;
        let d = if a < self.n() { &self.within[a] } else { &self.tail };
        if delta >= 0 {
            d.clone()
        } else {
            d.transpose()
        }
    }

    /// Gram of `steps` consecutive vectors, ordered step-major.
    pub fn window_gram(&self, steps: usize) -> DMatrix<f64> {
        let q = self.q();
        let mut g = DMatrix::zeros(q * steps, q * steps);
        for a in 0..steps {
            for b in 0..steps {
                let d = self.lag(b as i64 - a as i64);
                g.view_mut((a * q, b * q), (q, q)).copy_from(&d);
            }
        }
        symmetrize(&g)
    }
}

/// Checks that a window of `steps` consecutive vectors has an NND Gram.
pub fn validate_window(model: &NStepModel, steps: usize) -> Result<()> {
    check_nnd("window Gram", &model.window_gram(steps), Tolerances::default().psd)
}

/// Smallest `n ≥ 1` such that the lag Grams from lag `n` onward all agree
/// within `tol` (absolute, entrywise). At least two lags must lie in the tail.
/// Returns `None` when the supplied window never settles.
pub fn classify_nstep(lag_grams: &[DMatrix<f64>], tol: f64) -> Result<Option<usize>> {
    if lag_grams.is_empty() {
        return Err(Error::InvalidArgument("no lag Grams supplied".into()));
    }
    let shape = lag_grams[0].shape();
    if lag_grams.iter().any(|g| g.shape() != shape) {
        return Err(Error::Dimension("lag Grams differ in shape".into()));
    }
    let len = lag_grams.len();
    if len < 3 {
        return Ok(None);
    }
    // Scan back from the end while successive Grams agree.
    let last = &lag_grams[len - 1];
    let mut start = len - 1;
    while start > 0 && (&lag_grams[start - 1] - last).amax() <= tol {
        start -= 1;
    }
    let n = start.max(1);
    if len - n < 2 {
        return Ok(None);
    }
    Ok(Some(n))
}

/// The mean-plus-residual decomposition of an n-step exchangeable structure.
#[derive(Debug, Clone)]
pub struct Representation {
    /// Gram of the mean components `M_j`, equal to the tail `c`.
    pub mean_gram: DMatrix<f64>,
    /// Residual lag Grams `d_δ − c` for `δ < n`; zero beyond.
    pub residual_lags: Vec<DMatrix<f64>>,
    /// `E(M_j) = e_j` when expectations are known. Residuals have zero expectation.
    pub mean_expectation: Option<DVector<f64>>,
}

impl Representation {
    /// Reassembles the original lag Grams `c + (d_δ − c)`.
    pub fn reconstruct(&self) -> Vec<DMatrix<f64>> {
        self.residual_lags.iter().map(|d| d + &self.mean_gram).collect()
    }
}

/// `Y_jk = M_j + R_jk` at the level of inner products.
pub fn nstep_represent(model: &NStepModel) -> Result<Representation> {
    check_nnd("c", &model.tail, Tolerances::default().psd)?;
    Ok(Representation {
        mean_gram: model.tail.clone(),
        residual_lags: model.within.iter().map(|d| d - &model.tail).collect(),
        mean_expectation: model.expectations.clone(),
    })
}

/// Gram of the running means `(1/m)Σ_{k=1}^m Y_k`.
pub fn running_mean_gram(model: &NStepModel, m: usize) -> Result<DMatrix<f64>> {
    cross_mean_gram(model, m, m)
}

/// Inner products between the running means over the first `k` and the
/// first `l` steps.
pub fn cross_mean_gram(model: &NStepModel, k: usize, l: usize) -> Result<DMatrix<f64>> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument("running means need at least one term".into()));
    }
    let n = model.n() as i64;
    let (k, l) = (k as i64, l as i64);
    let mut out = model.tail.clone();
    let scale = 1.0 / (k as f64 * l as f64);
    for delta in (1 - n)..n {
        // Pairs (a, b) with 1 ≤ a ≤ k, 1 ≤ b ≤ l and b − a = δ.
        let lo = 1.max(1 - delta);
        let hi = k.min(l - delta);
        if hi < lo {
            continue;
        }
        let count = (hi - lo + 1) as f64;
        out += (model.lag(delta) - &model.tail) * (count * scale);
    }
    Ok(out)
}

/// Squared distance between the running means over `k` and `l` steps,
/// summed over entities.
pub fn running_mean_distance(model: &NStepModel, k: usize, l: usize) -> Result<f64> {
    let kk = running_mean_gram(model, k)?;
    let ll = running_mean_gram(model, l)?;
    let kl = cross_mean_gram(model, k, l)?;
    Ok((kk + ll - &kl - kl.transpose()).trace())
}
