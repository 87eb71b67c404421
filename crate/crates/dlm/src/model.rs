use bayeslin_core::linalg::{check_nnd, checked_symmetric, symmetrize};
use bayeslin_core::Tolerances;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for `‖HFᵀ − FᵀG‖ ≤ TOL_H·‖Fᵀ‖·‖G‖`.
pub const TOL_H: f64 = 1e-10;

/// Second-order specification of the constant model
/// `X_t = FᵀΘ_t + ν_t`, `Θ_t = GΘ_{t−1} + ω_t`.
#[derive(Debug, Clone)]
pub struct DlmSpec {
    /// `p×r` observation matrix.
    pub f: DMatrix<f64>,
    /// `p×p` evolution matrix.
    pub g: DMatrix<f64>,
    /// `E(Θ₀)`.
    pub mu0: DVector<f64>,
    /// `Var(Θ₀)`.
    pub sigma0: DMatrix<f64>,
    /// `Var(ν_t) = E(V^ν)`.
    pub v: DMatrix<f64>,
    /// `Var(ω_t) = E(V^ω)`.
    pub w: DMatrix<f64>,
}

impl DlmSpec {
    /// Validates shapes and the NND covariance matrices.
    pub fn new(
        f: DMatrix<f64>,
        g: DMatrix<f64>,
        mu0: DVector<f64>,
        sigma0: DMatrix<f64>,
        v: DMatrix<f64>,
        w: DMatrix<f64>,
    ) -> Result<Self> {
        let (p, r) = f.shape();
        if p == 0 || r == 0 {
            return Err(Error::Dimension("F must be non-empty".into()));
        }
        let shape = |name: &str, m: &DMatrix<f64>, n: usize| -> Result<()> {
            if m.shape() != (n, n) {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            Ok(())
        };
        shape("G", &g, p)?;
        shape("Sigma0", &sigma0, p)?;
        shape("V", &v, r)?;
        shape("W", &w, p)?;
        if mu0.len() != p {
            return Err(Error::Dimension(format!("mu0 has length {}, expected {p}", mu0.len())));
        }
        let tol = Tolerances::default();
        let sigma0 = checked_nnd("Sigma0", &sigma0, &tol)?;
        let v = checked_nnd("V", &v, &tol)?;
        let w = checked_nnd("W", &w, &tol)?;
        Ok(Self {
            f,
            g,
            mu0,
            sigma0,
            v,
            w,
        })
    }

    /// The identity model of dimension `r` (`F = G = I`).
    pub fn identity(mu0: DVector<f64>, sigma0: DMatrix<f64>, v: DMatrix<f64>, w: DMatrix<f64>) -> Result<Self> {
        let r = v.nrows();
        Self::new(DMatrix::identity(r, r), DMatrix::identity(r, r), mu0, sigma0, v, w)
    }

    /// Observation dimension `r`.
    pub fn r(&self) -> usize {
        self.f.ncols()
    }

    /// State dimension `p`.
    pub fn p(&self) -> usize {
        self.f.nrows()
    }

    /// Whether `F` and `G` are both identity matrices.
    pub fn is_identity(&self) -> bool {
        self.p() == self.r() && is_identity(&self.f) && is_identity(&self.g)
    }

    /// A copy with replaced `V` and `W`.
    pub fn with_covariances(&self, v: DMatrix<f64>, w: DMatrix<f64>) -> Result<Self> {
        Self::new(
            self.f.clone(),
            self.g.clone(),
            self.mu0.clone(),
            self.sigma0.clone(),
            v,
            w,
        )
    }
}

pub(crate) fn is_identity(m: &DMatrix<f64>) -> bool {
    m.is_square() && (m - DMatrix::identity(m.nrows(), m.ncols())).amax() == 0.0
}

fn checked_nnd(name: &str, m: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let s = checked_symmetric(name, m, tol.sym)?;
    check_nnd(name, &s, tol.psd)?;
    Ok(s)
}

/// Covariances of the elements of a random matrix, by index pattern, for
/// exchangeable specifications: `Cov(V_ii, V_ii)`, `Cov(V_ij, V_ij)` with
/// `i ≠ j`, and `Cov(V_ii, V_jj)` with `i ≠ j`. Every other pair is
/// uncorrelated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementPattern {
    /// `Cov(V_ii, V_ii)`.
    pub diag: f64,
    /// `Cov(V_ij, V_ij)` for `i ≠ j`.
    pub offmatch: f64,
    /// `Cov(V_ii, V_jj)` for `i ≠ j`.
    pub crossdiag: f64,
}

impl ElementPattern {
    /// The full `n²×n²` covariance over `vec` positions.
    pub fn expand(&self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n * n, n * n, |x, y| {
            let (a, b) = (x % n, x / n);
            let (c, d) = (y % n, y / n);
            if a == b && c == d {
                if a == c {
                    self.diag
                } else {
                    self.crossdiag
                }
            } else if a != b && ((a == c && b == d) || (a == d && b == c)) {
                self.offmatch
            } else {
                0.0
            }
        })
    }
}

/// Fourth-order specification over the quadratic products of the residuals.
///
/// Each block is a covariance over `vec` positions of a square matrix
/// (position `a + n·b` for element `(a, b)`). Entries for `(a, b)` and
/// `(b, a)` must agree because the matrices are symmetric.
#[derive(Debug, Clone)]
pub struct QuarticSpec {
    /// `Var(vec V^ω)`, `p²×p²`.
    pub var_v_omega: DMatrix<f64>,
    /// `Var(vec V^ν)`, `r²×r²`.
    pub var_v_nu: DMatrix<f64>,
    /// `Var(vec S^ω_t)`, `p²×p²`.
    pub var_s_omega: DMatrix<f64>,
    /// `Var(vec S^ν_t)`, `r²×r²`.
    pub var_s_nu: DMatrix<f64>,
    /// `Cov(vec V^ω, vec V^ν)`, `p²×r²`.
    pub cross: DMatrix<f64>,
}

impl QuarticSpec {
    /// Validates the blocks, with zero cross-covariance.
    pub fn new(
        var_v_omega: DMatrix<f64>,
        var_v_nu: DMatrix<f64>,
        var_s_omega: DMatrix<f64>,
        var_s_nu: DMatrix<f64>,
    ) -> Result<Self> {
        let cross = DMatrix::zeros(var_v_omega.nrows(), var_v_nu.nrows());
        Self::with_cross(var_v_omega, var_v_nu, var_s_omega, var_s_nu, cross)
    }

    /// Validates the blocks and an explicit `Cov(vec V^ω, vec V^ν)`.
    pub fn with_cross(
        var_v_omega: DMatrix<f64>,
        var_v_nu: DMatrix<f64>,
        var_s_omega: DMatrix<f64>,
        var_s_nu: DMatrix<f64>,
        cross: DMatrix<f64>,
    ) -> Result<Self> {
        let tol = Tolerances::default();
        let p2 = var_v_omega.nrows();
        let r2 = var_v_nu.nrows();
        let p = side(p2)?;
        let r = side(r2)?;
        let var_v_omega = checked_block("Var(vec V^omega)", &var_v_omega, p, &tol)?;
        let var_v_nu = checked_block("Var(vec V^nu)", &var_v_nu, r, &tol)?;
        let var_s_omega = checked_block("Var(vec S^omega)", &var_s_omega, p, &tol)?;
        let var_s_nu = checked_block("Var(vec S^nu)", &var_s_nu, r, &tol)?;
        if cross.shape() != (p2, r2) {
            return Err(Error::Dimension(format!(
                "cross covariance is {}x{}, expected {p2}x{r2}",
                cross.nrows(),
                cross.ncols()
            )));
        }
        let mut joint = DMatrix::zeros(p2 + r2, p2 + r2);
        joint.view_mut((0, 0), (p2, p2)).copy_from(&var_v_omega);
        joint.view_mut((p2, p2), (r2, r2)).copy_from(&var_v_nu);
        joint.view_mut((0, p2), (p2, r2)).copy_from(&cross);
        joint.view_mut((p2, 0), (r2, p2)).copy_from(&cross.transpose());
        check_nnd("joint Var(vec V^omega, vec V^nu)", &joint, tol.psd)?;
        Ok(Self {
            var_v_omega,
            var_v_nu,
            var_s_omega,
            var_s_nu,
            cross,
        })
    }

    /// Builds the blocks from exchangeable element patterns.
    pub fn from_patterns(
        p: usize,
        r: usize,
        v_omega: ElementPattern,
        v_nu: ElementPattern,
        s_omega: ElementPattern,
        s_nu: ElementPattern,
    ) -> Result<Self> {
        Self::new(v_omega.expand(p), v_nu.expand(r), s_omega.expand(p), s_nu.expand(r))
    }

    /// A specification guided by normal theory. `V^ν` and `V^ω` get
    /// Wishart-like uncertainty `(E⊗E + E⋆E)/dof` about their expectations,
    /// and the residual blocks are `E(V⊗V + V⋆V)`, the fourth moments of a
    /// normal vector whose variance is the uncertain mean matrix.
    pub fn normal_guided(v: &DMatrix<f64>, w: &DMatrix<f64>, dof_nu: f64, dof_omega: f64) -> Result<Self> {
        if !(dof_nu > 0.0 && dof_omega > 0.0) {
            return Err(Error::InvalidArgument("degrees of freedom must be positive".into()));
        }
        let var_v_nu = pair_products(v, v) / dof_nu;
        let var_v_omega = pair_products(w, w) / dof_omega;
        let var_s_nu = expected_pair_products(v, &var_v_nu);
        let var_s_omega = expected_pair_products(w, &var_v_omega);
        Self::new(var_v_omega, var_v_nu, var_s_omega, var_s_nu)
    }

    /// A specification with every block zero.
    pub fn zero(p: usize, r: usize) -> Self {
        Self {
            var_v_omega: DMatrix::zeros(p * p, p * p),
            var_v_nu: DMatrix::zeros(r * r, r * r),
            var_s_omega: DMatrix::zeros(p * p, p * p),
            var_s_nu: DMatrix::zeros(r * r, r * r),
            cross: DMatrix::zeros(p * p, r * r),
        }
    }

    /// State dimension of the blocks.
    pub fn p(&self) -> usize {
        side(self.var_v_omega.nrows()).unwrap_or(0)
    }

    /// Observation dimension of the blocks.
    pub fn r(&self) -> usize {
        side(self.var_v_nu.nrows()).unwrap_or(0)
    }

    /// Checks that the blocks match a model's dimensions.
    pub fn check_against(&self, spec: &DlmSpec) -> Result<()> {
        if self.p() != spec.p() || self.r() != spec.r() {
            return Err(Error::Dimension(format!(
                "quartic blocks are for p = {}, r = {} but the model has p = {}, r = {}",
                self.p(),
                self.r(),
                spec.p(),
                spec.r()
            )));
        }
        Ok(())
    }
}

/// `M[(a,b),(c,d)] = E_ac E_bd + E_ad E_bc`: the normal fourth-moment pattern.
pub(crate) fn pair_products(e1: &DMatrix<f64>, e2: &DMatrix<f64>) -> DMatrix<f64> {
    let n = e1.nrows();
    DMatrix::from_fn(n * n, n * n, |x, y| {
        let (a, b) = (x % n, x / n);
        let (c, d) = (y % n, y / n);
        e1[(a, c)] * e2[(b, d)] + e1[(a, d)] * e2[(b, c)]
    })
}

/// `E(V_ac V_bd) + E(V_ad V_bc)` from the expectation and `Var(vec V)`.
pub(crate) fn expected_pair_products(e: &DMatrix<f64>, var: &DMatrix<f64>) -> DMatrix<f64> {
    let n = e.nrows();
    let at = |i: usize, j: usize, k: usize, l: usize| var[(i + n * j, k + n * l)];
    DMatrix::from_fn(n * n, n * n, |x, y| {
        let (a, b) = (x % n, x / n);
        let (c, d) = (y % n, y / n);
        e[(a, c)] * e[(b, d)] + at(a, c, b, d) + e[(a, d)] * e[(b, c)] + at(a, d, b, c)
    })
}

fn side(n2: usize) -> Result<usize> {
    let n = (n2 as f64).sqrt().round() as usize;
    if n * n != n2 || n == 0 {
        return Err(Error::Dimension(format!("block of size {n2} is not n²×n²")));
    }
    Ok(n)
}

fn checked_block(name: &str, m: &DMatrix<f64>, n: usize, tol: &Tolerances) -> Result<DMatrix<f64>> {
    if m.shape() != (n * n, n * n) {
        return Err(Error::Dimension(format!("{name} must be {0}x{0}", n * n)));
    }
    let s = checked_symmetric(name, m, tol.sym)?;
    check_nnd(name, &s, tol.psd)?;
    // Swapping the indices of either element must leave the entry unchanged.
    let scale = s.amax().max(f64::MIN_POSITIVE);
    for x in 0..n * n {
        let xt = (x / n) + n * (x % n);
        for y in 0..n * n {
            if (s[(x, y)] - s[(xt, y)]).abs() > tol.sym * scale {
                return Err(Error::InvalidArgument(format!(
                    "{name} treats elements ({},{}) and ({},{}) differently",
                    x % n,
                    x / n,
                    x / n,
                    x % n
                )));
            }
        }
    }
    Ok(symmetrize(&s))
}

/// Solves `HFᵀ = FᵀG` for an `r×r` matrix `H`.
///
/// The minimum-norm solution `FᵀG(Fᵀ)⁺` is taken first. When `r > p` that
/// solution is singular, so the free part on the orthogonal complement of
/// the column space of `Fᵀ` is filled with a multiple of the projector onto
/// that complement, scaled to the geometric mean of the nonzero singular
/// values so the conditioning of `H` is not degraded.
pub fn compute_h(f: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (p, r) = f.shape();
    if g.shape() != (p, p) {
        return Err(Error::Dimension(format!("G must be {p}x{p}")));
    }
    if f.amax() == 0.0 {
        return Err(Error::InvalidArgument("F must be nonzero".into()));
    }
    let ft = f.transpose();
    let ft_pinv = ft
        .clone()
        .pseudo_inverse(1e-12 * ft.amax())
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let target = &ft * g;
    let h0 = &target * &ft_pinv;
    let residual = (&h0 * &ft - &target).norm();
    if residual > TOL_H * ft.norm() * g.norm().max(1.0) {
        return Err(Error::NotTwoStepInvertible { residual });
    }
    let complement = DMatrix::identity(r, r) - &ft * &ft_pinv;
    if complement.amax() < 1e-12 {
        return Ok(h0);
    }
    let sv = h0.clone().svd(false, false).singular_values;
    let cutoff = 1e-12 * sv.max().max(1.0);
    let nonzero: Vec<f64> = sv.iter().copied().filter(|s| *s > cutoff).collect();
    let scale = if nonzero.is_empty() {
        1.0
    } else {
        (nonzero.iter().map(|s| s.ln()).sum::<f64>() / nonzero.len() as f64).exp()
    };
    Ok(h0 + complement * scale)
}

/// Smallest singular value of a square matrix.
pub fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.min()
}

/// One- and two-step differences of an observed series.
#[derive(Debug, Clone)]
pub struct DiffSeries {
    /// The differencing matrix.
    pub h: DMatrix<f64>,
    /// `X′_t = X_t − HX_{t−1}` for `t = 2, …, n`; entry `i` is time `i + 2`.
    pub one: Vec<DVector<f64>>,
    /// `X″_t = X_t − H²X_{t−2}` for `t = 3, …, n`; entry `i` is time `i + 3`.
    pub two: Vec<DVector<f64>>,
}

impl DiffSeries {
    /// Number of observations the series was formed from.
    pub fn len(&self) -> usize {
        self.one.len() + 1
    }

    /// Whether the series is empty. Never true for a constructed series.
    pub fn is_empty(&self) -> bool {
        self.one.is_empty()
    }

    /// `X′_t` at time `t ≥ 2` (times start at 1).
    pub fn one_at(&self, t: usize) -> Option<&DVector<f64>> {
        t.checked_sub(2).and_then(|i| self.one.get(i))
    }

    /// `X″_t` at time `t ≥ 3`.
    pub fn two_at(&self, t: usize) -> Option<&DVector<f64>> {
        t.checked_sub(3).and_then(|i| self.two.get(i))
    }
}

/// Forms `X′_t` and `X″_t` from `data[0] = X_1, data[1] = X_2, …`.
pub fn difference_observables(h: &DMatrix<f64>, data: &[DVector<f64>]) -> Result<DiffSeries> {
    if data.len() < 3 {
        return Err(Error::TooShort {
            len: data.len(),
            min: 3,
        });
    }
    let r = h.nrows();
    if !h.is_square() || data.iter().any(|x| x.len() != r) {
        return Err(Error::Dimension(format!(
            "H is {}x{} and observations must have length {r}",
            h.nrows(),
            h.ncols()
        )));
    }
    let h2 = h * h;
    let one = (1..data.len()).map(|i| &data[i] - h * &data[i - 1]).collect();
    let two = (2..data.len()).map(|i| &data[i] - &h2 * &data[i - 2]).collect();
    Ok(DiffSeries { h: h.clone(), one, two })
}
