use bayeslin_core::linalg::{pinv_sym_full, symmetrize};
use bayeslin_core::{adjust, BeliefStore, Tolerances};
use bayeslin_diagnostics::SizeRatio;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::DlmSpec;

/// One step of the first-order filter.
#[derive(Debug, Clone)]
pub struct FilterStep {
    /// Time index, starting at 1.
    pub t: usize,
    /// Predicted state expectation `a_t = G m_{t−1}`.
    pub prior_mean: DVector<f64>,
    /// Predicted state variance `R_t = G C_{t−1} Gᵀ + W`.
    pub prior_cov: DMatrix<f64>,
    /// Forecast expectation `f_t = Fᵀ a_t`.
    pub forecast_mean: DVector<f64>,
    /// Forecast variance `Q_t = Fᵀ R_t F + V`.
    pub forecast_cov: DMatrix<f64>,
    /// Adjusted state expectation `m_t`.
    pub mean: DVector<f64>,
    /// Adjusted state variance `C_t`.
    pub cov: DMatrix<f64>,
    /// Forecast error `x_t − f_t`.
    pub forecast_error: DVector<f64>,
    /// Observed forecast size `eᵀ Q⁺ e`.
    pub forecast_size: f64,
    /// Expected forecast size, the rank of `Q_t`.
    pub forecast_expected: f64,
    /// Forecast size ratio.
    pub forecast_ratio: SizeRatio,
    /// Observed state size `(m − a)ᵀ R⁺ (m − a)`.
    pub state_size: f64,
    /// Expected state size `tr(R⁺ R F Q⁺ Fᵀ R)`.
    pub state_expected: f64,
    /// State size ratio.
    pub state_ratio: SizeRatio,
    /// Whether `Q_t` was numerically singular and a pseudo-inverse was used.
    pub singular_forecast: bool,
}

/// Runs the first-order filter with observation variance `v` and evolution
/// variance `w`, using the model's `F`, `G`, `μ₀` and `Σ₀`.
pub fn first_order_filter(
    spec: &DlmSpec,
    v: &DMatrix<f64>,
    w: &DMatrix<f64>,
    data: &[DVector<f64>],
) -> Result<Vec<FilterStep>> {
    check_inputs(spec, v, w, data)?;
    let mut m = spec.mu0.clone();
    let mut c = spec.sigma0.clone();
    let mut steps = Vec::with_capacity(data.len());
    for (i, x) in data.iter().enumerate() {
        let step = full_step(spec, v, w, &m, &c, x, i + 1);
        m = step.mean.clone();
        c = step.cov.clone();
        steps.push(step);
    }
    Ok(steps)
}

/// The final step of [`first_order_filter`] over `data`, computing
/// diagnostics only for that step.
pub fn filter_final_step(
    spec: &DlmSpec,
    v: &DMatrix<f64>,
    w: &DMatrix<f64>,
    data: &[DVector<f64>],
) -> Result<Option<FilterStep>> {
    check_inputs(spec, v, w, data)?;
    let Some((last, head)) = data.split_last() else {
        return Ok(None);
    };
    let rank_tol = Tolerances::default().rank;
    let mut m = spec.mu0.clone();
    let mut c = spec.sigma0.clone();
    for x in head {
        let a = &spec.g * &m;
        let r = symmetrize(&(&spec.g * &c * spec.g.transpose() + w));
        let q = symmetrize(&(spec.f.transpose() * &r * &spec.f + v));
        let qinv = match q.clone().cholesky() {
            Some(ch) => ch.inverse(),
            None => pinv_sym_full(&q, rank_tol).inverse,
        };
        let gain = &r * &spec.f * qinv;
        m = &a + &gain * (x - spec.f.transpose() * &a);
        c = symmetrize(&(&r - &gain * spec.f.transpose() * &r));
    }
    Ok(Some(full_step(spec, v, w, &m, &c, last, data.len())))
}

fn full_step(
    spec: &DlmSpec,
    v: &DMatrix<f64>,
    w: &DMatrix<f64>,
    m: &DVector<f64>,
    c: &DMatrix<f64>,
    x: &DVector<f64>,
    t: usize,
) -> FilterStep {
    let tol = Tolerances::default();
    let a = &spec.g * m;
    let r = symmetrize(&(&spec.g * c * spec.g.transpose() + w));
    let f = spec.f.transpose() * &a;
    let q = symmetrize(&(spec.f.transpose() * &r * &spec.f + v));
    let qp = pinv_sym_full(&q, tol.rank);
    let singular_forecast = qp.rank < q.nrows();
    let e = x - &f;
    let gain = &r * &spec.f * &qp.inverse;
    let mean = &a + &gain * &e;
    let resolved = &gain * spec.f.transpose() * &r;
    let cov = symmetrize(&(&r - &resolved));
    let forecast_size = (e.transpose() * &qp.inverse * &e)[(0, 0)];
    let forecast_expected = qp.rank as f64;
    let rp = pinv_sym_full(&r, tol.rank).inverse;
    let delta = &mean - &a;
    let state_size = (delta.transpose() * &rp * &delta)[(0, 0)];
    let state_expected = (&rp * &resolved).trace();
    FilterStep {
        t,
        prior_mean: a,
        prior_cov: r,
        forecast_mean: f,
        forecast_cov: q,
        mean,
        cov,
        forecast_error: e,
        forecast_size,
        forecast_expected,
        forecast_ratio: SizeRatio::new(forecast_size, forecast_expected),
        state_size,
        state_expected,
        state_ratio: SizeRatio::new(state_size, state_expected),
        singular_forecast,
    }
}

fn check_inputs(spec: &DlmSpec, v: &DMatrix<f64>, w: &DMatrix<f64>, data: &[DVector<f64>]) -> Result<()> {
    let (p, r) = (spec.p(), spec.r());
    if v.shape() != (r, r) || w.shape() != (p, p) {
        return Err(Error::Dimension(format!(
            "V must be {r}×{r} and W {p}×{p}, got {:?} and {:?}",
            v.shape(),
            w.shape()
        )));
    }
    if let Some(x) = data.iter().find(|x| x.len() != r) {
        return Err(Error::Dimension(format!(
            "observation of length {} for r = {r}",
            x.len()
        )));
    }
    Ok(())
}

/// Adjusts the terminal state by all observations at once, building the
/// joint second-order specification of `(θ_T, X_1, …, X_T)`. Returns the
/// adjusted expectation and variance. Cost grows with `T²`.
#[allow(clippy::needless_range_loop)]
pub fn batch_terminal_state(
    spec: &DlmSpec,
    v: &DMatrix<f64>,
    w: &DMatrix<f64>,
    data: &[DVector<f64>],
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_inputs(spec, v, w, data)?;
    let (p, r) = (spec.p(), spec.r());
    let n = data.len();
    if n == 0 {
        return Ok((spec.mu0.clone(), spec.sigma0.clone()));
    }
    // State means, variances, and powers of G.
    let mut means = Vec::with_capacity(n + 1);
    let mut vars = Vec::with_capacity(n + 1);
    means.push(spec.mu0.clone());
    vars.push(spec.sigma0.clone());
    for t in 1..=n {
        means.push(&spec.g * &means[t - 1]);
        vars.push(&spec.g * &vars[t - 1] * spec.g.transpose() + w);
    }
    let mut powers = vec![DMatrix::identity(p, p)];
    for k in 1..=n {
        powers.push(&spec.g * &powers[k - 1]);
    }
    // Cov(θ_s, θ_t) = G^{s−t} P_t for s ≥ t.
    let state_cov = |s: usize, t: usize| -> DMatrix<f64> {
        if s >= t {
            &powers[s - t] * &vars[t]
        } else {
            &vars[s] * powers[t - s].transpose()
        }
    };
    let dim = p + n * r;
    let mut mean = DVector::zeros(dim);
    let mut cov = DMatrix::zeros(dim, dim);
    mean.rows_mut(0, p).copy_from(&means[n]);
    cov.view_mut((0, 0), (p, p)).copy_from(&vars[n]);
    let ft = spec.f.transpose();
    for s in 1..=n {
        let rs = p + (s - 1) * r;
        mean.rows_mut(rs, r).copy_from(&(&ft * &means[s]));
        let ts = state_cov(n, s) * &spec.f;
        cov.view_mut((0, rs), (p, r)).copy_from(&ts);
        cov.view_mut((rs, 0), (r, p)).copy_from(&ts.transpose());
        for t in s..=n {
            let ct = p + (t - 1) * r;
            let mut block = &ft * state_cov(s, t) * &spec.f;
            if s == t {
                block += v;
            }
            cov.view_mut((rs, ct), (r, r)).copy_from(&block);
            cov.view_mut((ct, rs), (r, r)).copy_from(&block.transpose());
        }
    }
    let labels: Vec<String> = (0..p)
        .map(|i| format!("theta{i}"))
        .chain((1..=n).flat_map(|t| (0..r).map(move |j| format!("x{t}_{j}"))))
        .collect();
    let store = BeliefStore::new(labels.clone(), mean, symmetrize(&cov))?;
    let target = store.select_owned(&labels[..p])?;
    let obs = store.select_owned(&labels[p..])?;
    let adj = adjust(&store, &target, &obs)?;
    let values = DVector::from_iterator(n * r, data.iter().flat_map(|x| x.iter().cloned()));
    let realized = adj.realize(&values)?;
    Ok((realized, adj.adjusted_cov.clone()))
}
