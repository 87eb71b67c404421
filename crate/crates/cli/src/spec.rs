//! The JSON specification document.
//!
//! Matrices are row-major arrays of rows. Every section is optional; each
//! command checks for the sections it needs. Loading validates every section
//! that is present, so a document that loads is coherent.

use std::path::Path;

use bayeslin_core::linalg::check_nnd;
use bayeslin_core::{cov_from_cholesky, BeliefStore, Tolerances};
use bayeslin_dlm::{DlmSpec, ElementPattern, QuarticSpec};
use bayeslin_exchange::{ExchangeableModel, QuadraticModel, SymCoords};
use bayeslin_matrix::Weighting;
use bayeslin_moments::{KindPattern, PatternSpec};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A matrix written as a list of rows.
pub type Rows = Vec<Vec<f64>>;

/// The whole specification document.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    /// Names of the scalar quantities of the belief store.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantities: Option<Vec<String>>,
    /// Expectations of the quantities; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expectation: Option<Vec<f64>>,
    /// Covariance of the quantities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<CovarianceSection>,
    /// Second-order exchangeable vector specifications.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exchangeable: Vec<ExchangeableBlock>,
    /// Beliefs about a covariance matrix and the quadratic products of residuals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<QuadraticSection>,
    /// A dynamic linear model with fourth-order beliefs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dlm: Option<DlmSection>,
    /// Analysis options.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Options>,
}

/// A covariance matrix, given directly or through its lower Cholesky factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum CovarianceSection {
    /// The full matrix.
    Dense(Rows),
    /// Rows of the lower triangle of `Λ` with `M = ΛΛᵀ`; row `i` has `i + 1` entries.
    Cholesky(Rows),
}

/// An exchangeable collection `X_k = M + R_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExchangeableBlock {
    /// Name of the collection.
    pub name: String,
    /// `Var(X_k)`.
    pub sigma: Rows,
    /// `Cov(X_k, X_l)` for `k ≠ l`.
    pub delta: Rows,
}

/// Beliefs about `V = Var(R_k)` and the products `R_k R_kᵀ = V + U_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSection {
    /// Side of `V`.
    pub dimension: usize,
    /// Ordering of the distinct elements as 0-based `[i, j]` pairs with
    /// `i ≤ j`; the row-major upper triangle when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<[usize; 2]>>,
    /// `E(V)`.
    #[serde(rename = "expectation_V")]
    pub expectation_v: Rows,
    /// Covariance of the distinct elements of `V`.
    #[serde(rename = "var_vecV")]
    pub var_vec_v: Rows,
    /// Covariance of the distinct elements of `U_k`.
    #[serde(rename = "var_vecU")]
    pub var_vec_u: FourthSource,
}

/// Where the residual fourth moments come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FourthSource {
    /// An explicit matrix.
    Matrix(Rows),
    /// The keyword `"mvn-auto"`: normal-theory moments from `E(V)`.
    Keyword(String),
}

/// Keyword selecting normal-theory fourth moments.
pub const MVN_AUTO: &str = "mvn-auto";

/// A dynamic linear model `X_t = Fᵀθ_t + ν_t`, `θ_t = Gθ_{t−1} + ω_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DlmSection {
    /// `F`, state by observation.
    #[serde(rename = "F")]
    pub f: Rows,
    /// `G`, state by state.
    #[serde(rename = "G")]
    pub g: Rows,
    /// Initial state mean.
    pub mu0: Vec<f64>,
    /// Initial state variance.
    #[serde(rename = "Sigma0")]
    pub sigma0: Rows,
    /// Prior expectation of the observation variance.
    #[serde(rename = "V")]
    pub v: Rows,
    /// Prior expectation of the evolution variance.
    #[serde(rename = "W")]
    pub w: Rows,
    /// Fourth-order beliefs.
    pub quartic: QuarticSection,
}

/// Fourth-order beliefs over `vec` positions, in one of three forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum QuarticSection {
    /// Explicit covariance tables.
    Tables(QuarticTables),
    /// Exchangeable element patterns for the state and observation residuals.
    Patterns(QuarticPatterns),
    /// Normal-theory beliefs with the given degrees of freedom.
    NormalGuided(NormalGuided),
}

/// Explicit fourth-order tables; positions are `a + n·b` for element `(a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarticTables {
    /// `Var(vec V^ω)`.
    #[serde(rename = "var_vecV_omega")]
    pub var_v_omega: Rows,
    /// `Var(vec V^ν)`.
    #[serde(rename = "var_vecV_nu")]
    pub var_v_nu: Rows,
    /// `Var(vec S^ω_t)`.
    #[serde(rename = "var_vecS_omega")]
    pub var_s_omega: Rows,
    /// `Var(vec S^ν_t)`.
    #[serde(rename = "var_vecS_nu")]
    pub var_s_nu: Rows,
    /// `Cov(vec V^ω, vec V^ν)`; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross: Option<Rows>,
}

/// Pattern shorthand for both residual kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarticPatterns {
    /// Evolution residuals.
    pub omega: PatternShorthand,
    /// Observation residuals.
    pub nu: PatternShorthand,
}

/// Exchangeable element covariances for one residual kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternShorthand {
    /// `Var(V_ii)`.
    pub v_diag: f64,
    /// `Var(V_ij)`, `i ≠ j`.
    pub v_offmatch: f64,
    /// `Cov(V_ii, V_jj)`, `i ≠ j`.
    pub v_crossdiag: f64,
    /// `Var(S_ii)`.
    pub s_diag: f64,
    /// `Var(S_ij)`, `i ≠ j`.
    pub s_offmatch: f64,
}

/// Degrees of freedom of normal-theory fourth-order beliefs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalGuided {
    /// For `V^ν`.
    pub dof_nu: f64,
    /// For `V^ω`.
    pub dof_omega: f64,
}

/// Analysis options.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Inner-product weighting of matrix spaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighting: Option<WeightingName>,
    /// Numerical tolerances used when validating the document.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSection>,
    /// Size ratio at which diagnostic shading saturates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shading_scale: Option<f64>,
}

/// Weighting names accepted in documents and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingName {
    /// Every ordered element pair counts once.
    FullTrace,
    /// Every distinct element counts once.
    Distinct,
}

impl From<WeightingName> for Weighting {
    fn from(w: WeightingName) -> Self {
        match w {
            WeightingName::FullTrace => Weighting::FullTrace,
            WeightingName::Distinct => Weighting::Distinct,
        }
    }
}

/// Overrides of the default tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    /// Relative asymmetry allowed in symmetric inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sym: Option<f64>,
    /// Relative negative eigenvalue allowed in NND inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd: Option<f64>,
    /// Relative eigenvalue below which a matrix counts as singular.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pd: Option<f64>,
    /// Relative cutoff of pseudo-inverses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<f64>,
    /// Allowed discrepancy of observations along zero-variance directions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obs: Option<f64>,
}

/// Reads, parses and validates a specification file.
pub fn load_spec(path: impl AsRef<Path>) -> Result<SpecDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spec(&text, &path.display().to_string())
}

/// Parses and validates a specification from text.
pub fn parse_spec(text: &str, origin: &str) -> Result<SpecDocument> {
    let doc: SpecDocument = serde_json::from_str(text).map_err(|e| Error::json(origin, e))?;
    doc.validate()?;
    Ok(doc)
}

/// Writes a document in canonical form.
pub fn save_spec(doc: &SpecDocument, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, doc.to_canonical_string()).map_err(|e| Error::io(path, e))
}

impl SpecDocument {
    /// Canonical text: pretty-printed JSON in schema key order, shortest
    /// round-trip numbers, trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    /// Checks every section that is present.
    pub fn validate(&self) -> Result<()> {
        self.belief_store()?;
        self.exchangeable_models()?;
        self.quadratic_model()?;
        self.dlm()?;
        if let Some(k) = self.options.as_ref().and_then(|o| o.shading_scale) {
            if !(k.is_finite() && k > 1.0) {
                return Err(Error::Invalid(format!("shading_scale must exceed one, got {k}")));
            }
        }
        Ok(())
    }

    /// Tolerances with the document's overrides applied.
    pub fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(t) = self.options.as_ref().and_then(|o| o.tolerances) {
            tol.sym = t.sym.unwrap_or(tol.sym);
            tol.psd = t.psd.unwrap_or(tol.psd);
            tol.pd = t.pd.unwrap_or(tol.pd);
            tol.rank = t.rank.unwrap_or(tol.rank);
            tol.obs = t.obs.unwrap_or(tol.obs);
        }
        tol
    }

    /// The document's weighting, full-trace by default.
    pub fn weighting(&self) -> WeightingName {
        self.options
            .as_ref()
            .and_then(|o| o.weighting)
            .unwrap_or(WeightingName::FullTrace)
    }

    /// The document's shading scale, if set.
    pub fn shading_scale(&self) -> Option<f64> {
        self.options.as_ref().and_then(|o| o.shading_scale)
    }

    /// The covariance matrix of the quantities, NND-checked.
    pub fn covariance_matrix(&self) -> Result<Option<DMatrix<f64>>> {
        let m = match &self.covariance {
            None => return Ok(None),
            Some(CovarianceSection::Dense(rows)) => to_matrix("covariance", rows)?,
            Some(CovarianceSection::Cholesky(rows)) => {
                cov_from_cholesky(&lower_triangle("covariance.cholesky", rows)?)?
            }
        };
        if m.nrows() != m.ncols() {
            return Err(Error::Invalid(format!(
                "covariance is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        check_nnd("covariance", &m, self.tolerances().psd)?;
        Ok(Some(m))
    }

    /// The belief store over the named quantities, when a covariance is given.
    pub fn belief_store(&self) -> Result<Option<BeliefStore>> {
        let Some(cov) = self.covariance_matrix()? else {
            if self.quantities.is_some() || self.expectation.is_some() {
                return Err(Error::Invalid(
                    "quantities and expectation need a covariance section".into(),
                ));
            }
            return Ok(None);
        };
        let n = cov.nrows();
        let labels = match &self.quantities {
            Some(q) if q.len() != n => {
                return Err(Error::Invalid(format!(
                    "{} quantities for a {n}x{n} covariance",
                    q.len()
                )))
            }
            Some(q) => q.clone(),
            None => (1..=n).map(|i| format!("X{i}")).collect(),
        };
        let mean = match &self.expectation {
            Some(e) if e.len() != n => {
                return Err(Error::Invalid(format!("{} expectations for {n} quantities", e.len())))
            }
            Some(e) => DVector::from_vec(e.clone()),
            None => DVector::zeros(n),
        };
        Ok(Some(BeliefStore::with_tolerances(
            labels,
            mean,
            cov,
            self.tolerances(),
        )?))
    }

    /// The exchangeable collections, each validated.
    pub fn exchangeable_models(&self) -> Result<Vec<(String, ExchangeableModel)>> {
        self.exchangeable
            .iter()
            .map(|b| {
                let sigma = to_matrix(&format!("exchangeable {} sigma", b.name), &b.sigma)?;
                let delta = to_matrix(&format!("exchangeable {} delta", b.name), &b.delta)?;
                Ok((b.name.clone(), ExchangeableModel::new(sigma, delta)?))
            })
            .collect()
    }

    /// The quadratic model, when the section is present.
    pub fn quadratic_model(&self) -> Result<Option<QuadraticModel>> {
        let Some(q) = &self.quadratic else {
            return Ok(None);
        };
        let r = q.dimension;
        if r == 0 {
            return Err(Error::Invalid("quadratic.dimension must be positive".into()));
        }
        let coords = match &q.coordinates {
            None => SymCoords::canonical(r),
            Some(pairs) => {
                if let Some([i, j]) = pairs.iter().find(|[i, j]| i > j) {
                    return Err(Error::Invalid(format!("coordinate [{i}, {j}] must have i <= j")));
                }
                SymCoords::custom(r, pairs.iter().map(|[i, j]| (*i, *j)).collect())?
            }
        };
        let ev = to_matrix("quadratic.expectation_V", &q.expectation_v)?;
        let vv = to_matrix("quadratic.var_vecV", &q.var_vec_v)?;
        let model = match &q.var_vec_u {
            FourthSource::Matrix(rows) => QuadraticModel::new(coords, vv, to_matrix("quadratic.var_vecU", rows)?, ev)?,
            FourthSource::Keyword(k) if k == MVN_AUTO => QuadraticModel::mvn_auto(coords, vv, ev)?,
            FourthSource::Keyword(k) => {
                return Err(Error::Invalid(format!(
                    "quadratic.var_vecU must be a matrix or \"{MVN_AUTO}\", got \"{k}\""
                )))
            }
        };
        Ok(Some(model))
    }

    /// The dynamic linear model and its fourth-order beliefs.
    pub fn dlm(&self) -> Result<Option<(DlmSpec, QuarticSpec)>> {
        let Some(d) = &self.dlm else {
            return Ok(None);
        };
        let spec = DlmSpec::new(
            to_matrix("dlm.F", &d.f)?,
            to_matrix("dlm.G", &d.g)?,
            DVector::from_vec(d.mu0.clone()),
            to_matrix("dlm.Sigma0", &d.sigma0)?,
            to_matrix("dlm.V", &d.v)?,
            to_matrix("dlm.W", &d.w)?,
        )?;
        let (p, r) = (spec.p(), spec.r());
        let quartic = match &d.quartic {
            QuarticSection::Tables(t) => {
                let blocks = [
                    to_matrix("var_vecV_omega", &t.var_v_omega)?,
                    to_matrix("var_vecV_nu", &t.var_v_nu)?,
                    to_matrix("var_vecS_omega", &t.var_s_omega)?,
                    to_matrix("var_vecS_nu", &t.var_s_nu)?,
                ];
                let [a, b, c, e] = blocks;
                match &t.cross {
                    None => QuarticSpec::new(a, b, c, e)?,
                    Some(x) => QuarticSpec::with_cross(a, b, c, e, to_matrix("cross", x)?)?,
                }
            }
            QuarticSection::Patterns(pt) => {
                let (vo, so) = element_patterns(&pt.omega);
                let (vn, sn) = element_patterns(&pt.nu);
                QuarticSpec::from_patterns(p, r, vo, vn, so, sn)?
            }
            QuarticSection::NormalGuided(ng) => QuarticSpec::normal_guided(&spec.v, &spec.w, ng.dof_nu, ng.dof_omega)?,
        };
        quartic.check_against(&spec)?;
        Ok(Some((spec, quartic)))
    }

    /// Exact pattern specification for symbolic derivations.
    ///
    /// Needs the identity model (`F = G = I`), exchangeable `V` and `W`
    /// (constant diagonal and constant off-diagonal), and the pattern
    /// shorthand. Decimal inputs are read exactly as written.
    pub fn pattern_spec(&self) -> Result<(usize, PatternSpec<BigRational>)> {
        let (spec, _) = self
            .dlm()?
            .ok_or_else(|| Error::Invalid("the document has no dlm section".into()))?;
        let d = self.dlm.as_ref().expect("checked above");
        if !spec.is_identity() {
            return Err(Error::Invalid(
                "symbolic moments need the identity model (F = G = I)".into(),
            ));
        }
        let QuarticSection::Patterns(pt) = &d.quartic else {
            return Err(Error::Invalid(
                "symbolic moments need the quartic pattern shorthand".into(),
            ));
        };
        let kind = |name: &str, mean: &DMatrix<f64>, p: &PatternShorthand| -> Result<KindPattern<BigRational>> {
            let (diag, off) = exchangeable_values(name, mean)?;
            Ok(KindPattern {
                mean_diag: exact(diag)?,
                mean_off: exact(off)?,
                var_diag: exact(p.v_diag)?,
                var_off: exact(p.v_offmatch)?,
                cov_diag_diag: exact(p.v_crossdiag)?,
                fluct_diag: exact(p.s_diag)?,
                fluct_off: exact(p.s_offmatch)?,
            })
        };
        Ok((
            spec.r(),
            PatternSpec {
                state: kind("W", &spec.w, &pt.omega)?,
                obs: kind("V", &spec.v, &pt.nu)?,
                zero_fill: false,
            },
        ))
    }
}

fn element_patterns(p: &PatternShorthand) -> (ElementPattern, ElementPattern) {
    (
        ElementPattern {
            diag: p.v_diag,
            offmatch: p.v_offmatch,
            crossdiag: p.v_crossdiag,
        },
        ElementPattern {
            diag: p.s_diag,
            offmatch: p.s_offmatch,
            crossdiag: 0.0,
        },
    )
}

fn exchangeable_values(name: &str, m: &DMatrix<f64>) -> Result<(f64, f64)> {
    let n = m.nrows();
    let diag = m[(0, 0)];
    let off = if n > 1 { m[(0, 1)] } else { 0.0 };
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { diag } else { off };
            if m[(i, j)] != want {
                return Err(Error::Invalid(format!(
                    "{name} must have a constant diagonal and a constant off-diagonal for symbolic moments"
                )));
            }
        }
    }
    Ok((diag, off))
}

/// The exact rational written by the shortest decimal form of `x`.
pub fn exact(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Invalid(format!("non-finite value {x}")));
    }
    let text = format!("{x}");
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.as_str()),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    let numer: BigInt = format!("{int}{frac}").parse().expect("decimal digits");
    let denom = Pow::pow(BigInt::from(10u32), frac.len() as u32);
    let r = BigRational::new(numer, denom);
    Ok(if negative && !r.is_zero() { -r } else { r })
}

/// Converts rows to a matrix, rejecting empty, ragged or non-finite input.
pub fn to_matrix(name: &str, rows: &Rows) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(Error::Invalid(format!("{name} is empty")));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
        return Err(Error::Invalid(format!(
            "{name}: row {} has {} entries, expected {m}",
            i + 1,
            r.len()
        )));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("{name} has a non-finite entry")));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// Converts a matrix to rows.
pub fn from_matrix(m: &DMatrix<f64>) -> Rows {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn lower_triangle(name: &str, rows: &Rows) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Invalid(format!("{name} is empty")));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != i + 1 {
            return Err(Error::Invalid(format!(
                "{name}: row {} has {} entries, expected {}",
                i + 1,
                row.len(),
                i + 1
            )));
        }
        for (j, x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::Invalid(format!("{name} has a non-finite entry")));
            }
            m[(i, j)] = *x;
        }
    }
    Ok(m)
}
