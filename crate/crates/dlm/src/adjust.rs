use bayeslin_core::linalg::{pinv_sym, symmetrize};
use bayeslin_core::Tolerances;
use bayeslin_matrix::{nnd_repair, NndRepair};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{DiffSeries, DlmSpec};
use crate::space::{DlmSpace, Observable};
use crate::structure::{Target, BAND};

/// Largest number of observables for which a dense pseudo-inverse is used
/// when the banded factorization breaks down.
pub const DENSE_FALLBACK_LIMIT: usize = 1500;

/// Adjustment of one covariance target by the quadratic observables.
#[derive(Debug, Clone)]
pub struct DlmAdjustment {
    /// Which target was adjusted.
    pub target: Target,
    /// Observables used, in solver order.
    pub observables: Vec<Observable>,
    /// Coefficient of each observable.
    pub coefficients: DVector<f64>,
    /// Prior expectation of the target.
    pub prior: DMatrix<f64>,
    /// Adjusted expectation before repair, symmetrized.
    pub adjusted: DMatrix<f64>,
    /// Prior matrix variance of the target.
    pub prior_variance: f64,
    /// Matrix variance resolved by the data.
    pub resolved_variance: f64,
    /// `resolved_variance / prior_variance`, or zero when the prior variance is zero.
    pub resolution: f64,
    /// Nearest NND matrix to `adjusted`.
    pub repair: NndRepair,
    /// Whether the dense fallback solver was used.
    pub dense_fallback: bool,
}

impl DlmAdjustment {
    /// The repaired adjusted expectation.
    pub fn repaired(&self) -> &DMatrix<f64> {
        &self.repair.matrix
    }
}

/// Adjusted `V^ν` and `V^ω` from data up to time `n`.
#[derive(Debug, Clone)]
pub struct CovarianceAdjustment {
    /// Adjustment of `V^ν`.
    pub nu: DlmAdjustment,
    /// Adjustment of `FᵀV^ωF`.
    pub omega: DlmAdjustment,
    /// Repaired adjusted `V^ν`.
    pub v: DMatrix<f64>,
    /// `V^ω` recovered from the adjusted `FᵀV^ωF`, repaired.
    pub w: DMatrix<f64>,
    /// Repair of the recovered `V^ω`.
    pub w_repair: NndRepair,
}

/// Incremental adjustment of both targets as observables arrive in time
/// order.
///
/// The Gram of the observables splits as `K = B + U C Uᵀ`: `C` holds the
/// tail inner products between types, `U` the type indicators, and `B` is
/// zero outside the lag band. `B` has a banded Cholesky factor `L` whose
/// rows never change once computed, so `Y = L⁻¹U` and `E = L⁻¹D`, with `D`
/// the centred observed values, grow by one row per observable. With
/// `Φ = YᵀY` and `G = EᵀY`, the coefficients are
/// `β = L⁻ᵀ Y (I + CΦ)⁻¹ k` for the target inner products `k` per type, the
/// adjusted expectation is `E(T) + G (I + CΦ)⁻¹ k`, and the resolved
/// variance is `kᵀ Φ (I + CΦ)⁻¹ k`.
#[derive(Debug, Clone)]
pub struct SequentialAdjustment<'a> {
    space: &'a DlmSpace,
    q: usize,
    width: usize,
    tail: DMatrix<f64>,
    objs: Vec<Observable>,
    idx: Vec<usize>,
    /// Centred observed values, `r²` per observable.
    centred: Vec<f64>,
    /// Banded factor rows, `width + 1` per observable, diagonal first.
    l: Vec<f64>,
    /// Rows of `L⁻¹U`, `q` per observable.
    y: Vec<f64>,
    /// Rows of `L⁻¹D`, `r²` per observable.
    e: Vec<f64>,
    phi: DMatrix<f64>,
    g: DMatrix<f64>,
    pivot_floor: f64,
    broken: bool,
    next_time: usize,
}

impl<'a> SequentialAdjustment<'a> {
    /// An adjustment with no observables yet.
    pub fn new(space: &'a DlmSpace) -> Self {
        let q = space.structure.types().len();
        let r = space.structure.r();
        let tail = DMatrix::from_fn(q, q, |a, b| space.tail_cov(a, b));
        let scale = (0..q)
            .map(|a| (space.lag_cov(a, a, 0) - tail[(a, a)]).abs())
            .fold(0.0, f64::max);
        Self {
            space,
            q,
            width: (BAND as usize + 1) * q,
            tail,
            objs: Vec::new(),
            idx: Vec::new(),
            centred: Vec::new(),
            l: Vec::new(),
            y: Vec::new(),
            e: Vec::new(),
            phi: DMatrix::zeros(q, q),
            g: DMatrix::zeros(r * r, q),
            pivot_floor: Tolerances::default().pd * scale.max(f64::MIN_POSITIVE),
            broken: false,
            next_time: 2,
        }
    }

    /// Last time whose observables have been added.
    pub fn n(&self) -> usize {
        self.next_time - 1
    }

    /// Whether the banded factorization broke down, so that the dense
    /// solver is used.
    pub fn uses_dense_solver(&self) -> bool {
        self.broken
    }

    /// Adds the observables of every time up to `n`.
    pub fn extend_to(&mut self, diffs: &DiffSeries, n: usize) -> Result<()> {
        if diffs.len() < n {
            return Err(Error::TooShort {
                len: diffs.len(),
                min: n,
            });
        }
        while self.next_time <= n {
            let t = self.next_time;
            for ty in self.space.structure.types_at(t) {
                let obs = Observable { t, ty };
                let centred = self.space.realize(diffs, obs)? - self.space.structure.object_mean(ty);
                self.push(obs, &centred);
            }
            self.next_time += 1;
        }
        Ok(())
    }

    fn push(&mut self, obs: Observable, centred: &DMatrix<f64>) {
        let i = self.objs.len();
        let a = self.space.type_index(obs.ty);
        self.objs.push(obs);
        self.idx.push(a);
        self.centred.extend(centred.iter());
        if self.broken {
            return;
        }
        let (w, width, q) = (self.width, self.width + 1, self.q);
        let r2 = centred.len();
        let lo = i.saturating_sub(w);
        let mut row = vec![0.0; width];
        for j in lo..=i {
            let delta = obs.t as i64 - self.objs[j].t as i64;
            let mut sum = if delta.abs() > BAND {
                0.0
            } else {
                self.space.lag_cov(self.idx[j], a, delta) - self.tail[(self.idx[j], a)]
            };
            for k in lo.max(j.saturating_sub(w))..j {
                let ljk = if j == i {
                    row[i - k]
                } else {
                    self.l[j * width + (j - k)]
                };
                sum -= row[i - k] * ljk;
            }
            if j == i {
                if sum <= self.pivot_floor {
                    self.broken = true;
                    return;
                }
                row[0] = sum.sqrt();
            } else {
                row[i - j] = sum / self.l[j * width];
            }
        }
        let mut y_row: Vec<f64> = (0..q).map(|b| if b == a { 1.0 } else { 0.0 }).collect();
        let mut e_row: Vec<f64> = centred.iter().cloned().collect();
        for k in lo..i {
            let lik = row[i - k];
            for (b, v) in y_row.iter_mut().enumerate() {
                *v -= lik * self.y[k * q + b];
            }
            for (c, v) in e_row.iter_mut().enumerate() {
                *v -= lik * self.e[k * r2 + c];
            }
        }
        for v in y_row.iter_mut().chain(e_row.iter_mut()) {
            *v /= row[0];
        }
        for b in 0..q {
            for c in 0..q {
                self.phi[(b, c)] += y_row[b] * y_row[c];
            }
            for (c, ev) in e_row.iter().enumerate() {
                self.g[(c, b)] += ev * y_row[b];
            }
        }
        self.l.extend(row);
        self.y.extend(y_row);
        self.e.extend(e_row);
    }

    /// Adjustment of one target by the observables added so far.
    pub fn target(&self, target: Target) -> Result<DlmAdjustment> {
        let n = self.n();
        if n < 3 {
            return Err(Error::TooShort { len: n, min: 3 });
        }
        let space = self.space;
        let (q, m, r) = (self.q, self.objs.len(), space.structure.r());
        let k = DVector::from_fn(q, |a, _| space.target_type_cov(target, a));
        let prior = space.structure.target_mean(target).clone();
        let (beta, resolved, change) = if k.iter().all(|v| *v == 0.0) {
            (DVector::zeros(m), 0.0, DMatrix::zeros(r, r))
        } else if self.broken {
            self.dense_solution(&k)?
        } else {
            let system = DMatrix::identity(q, q) + &self.tail * &self.phi;
            let z = system
                .lu()
                .solve(&k)
                .ok_or_else(|| Error::InvalidArgument("the low-rank correction of the Gram is singular".into()))?;
            let resolved = (k.transpose() * &self.phi * &z)[(0, 0)];
            let change = DMatrix::from_column_slice(r, r, (&self.g * &z).as_slice());
            (self.back_substitute(&z), resolved, change)
        };
        let adjusted = symmetrize(&(&prior + change));
        let prior_variance = space.structure.target_cov(target, target);
        let resolution = if prior_variance > 0.0 {
            resolved / prior_variance
        } else {
            0.0
        };
        let repair = nnd_repair(&adjusted)?;
        Ok(DlmAdjustment {
            target,
            observables: self.objs.clone(),
            coefficients: beta,
            prior,
            adjusted,
            prior_variance,
            resolved_variance: resolved,
            resolution,
            repair,
            dense_fallback: self.broken,
        })
    }

    /// `β = L⁻ᵀ (Y z)`.
    fn back_substitute(&self, z: &DVector<f64>) -> DVector<f64> {
        let (m, q, width) = (self.objs.len(), self.q, self.width + 1);
        let mut x: Vec<f64> = (0..m).map(|i| (0..q).map(|b| self.y[i * q + b] * z[b]).sum()).collect();
        for i in (0..m).rev() {
            let mut s = x[i];
            for (k, xk) in x.iter().enumerate().take(m.min(i + width)).skip(i + 1) {
                s -= self.l[k * width + (k - i)] * xk;
            }
            x[i] = s / self.l[i * width];
        }
        DVector::from_vec(x)
    }

    /// Coefficients, resolved variance and change from a dense
    /// pseudo-inverse of the full Gram.
    fn dense_solution(&self, k: &DVector<f64>) -> Result<(DVector<f64>, f64, DMatrix<f64>)> {
        let m = self.objs.len();
        if m > DENSE_FALLBACK_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "the banded residual Gram is not positive definite and {m} observables exceed the dense limit {DENSE_FALLBACK_LIMIT}"
            )));
        }
        let (objs, idx) = (&self.objs, &self.idx);
        let gram = DMatrix::from_fn(m, m, |i, j| {
            self.space.lag_cov(idx[i], idx[j], objs[j].t as i64 - objs[i].t as i64)
        });
        let rhs = DVector::from_iterator(m, idx.iter().map(|&a| k[a]));
        let beta = pinv_sym(&gram, Tolerances::default().rank) * &rhs;
        let resolved = beta.dot(&rhs);
        let r = self.space.structure.r();
        let r2 = r * r;
        let mut change = DMatrix::zeros(r, r);
        for (i, b) in beta.iter().enumerate() {
            change += DMatrix::from_column_slice(r, r, &self.centred[i * r2..(i + 1) * r2]) * *b;
        }
        Ok((beta, resolved, change))
    }

    /// Adjustment of both variances with the recovered `V^ω`.
    pub fn covariances(&self) -> Result<CovarianceAdjustment> {
        let nu = self.target(Target::Nu)?;
        let omega = self.target(Target::Omega)?;
        let w_raw = recover_w(&self.space.spec, omega.repaired())?;
        let w_repair = nnd_repair(&w_raw)?;
        Ok(CovarianceAdjustment {
            v: nu.repaired().clone(),
            w: w_repair.matrix.clone(),
            nu,
            omega,
            w_repair,
        })
    }
}

/// Adjusts one target by the observables up to time `n`.
pub fn adjust_target(space: &DlmSpace, diffs: &DiffSeries, target: Target, n: usize) -> Result<DlmAdjustment> {
    if n < 3 {
        return Err(Error::TooShort { len: n, min: 3 });
    }
    let mut seq = SequentialAdjustment::new(space);
    seq.extend_to(diffs, n)?;
    seq.target(target)
}

/// Recovers `V^ω` from an estimate of `FᵀV^ωF`, keeping the prior where the
/// data carry no information: `W + L(Â − FᵀWF)Lᵀ` with `L = (Fᵀ)⁺`.
pub fn recover_w(spec: &DlmSpec, fwf: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let ft = spec.f.transpose();
    let l = ft
        .clone()
        .pseudo_inverse(crate::model::TOL_H * ft.amax().max(1.0))
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let change = fwf - &ft * &spec.w * &spec.f;
    Ok(symmetrize(&(&spec.w + &l * change * l.transpose())))
}

/// Adjusts `V^ν` and `V^ω` by the quadratic observables up to time `n`,
/// using full-trace weighting.
pub fn adjust_dlm_covariances(space: &DlmSpace, diffs: &DiffSeries, n: usize) -> Result<CovarianceAdjustment> {
    if n < 3 {
        return Err(Error::TooShort { len: n, min: 3 });
    }
    let mut seq = SequentialAdjustment::new(space);
    seq.extend_to(diffs, n)?;
    seq.covariances()
}
