use std::collections::BTreeMap;

use bayeslin_moments::{
    covariance_with, evaluate, expectation_with, in_slot, mean, residual, ExpectOptions, Kind, MomentExpr, TableSpec,
};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{expected_pair_products, is_identity, DlmSpec, QuarticSpec};

/// Which difference a quadratic product is formed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// `X′_tX′_tᵀ`, defined for `t ≥ 2`.
    One,
    /// `X″_tX″_tᵀ`, defined for `t ≥ 3`.
    Two,
}

impl Family {
    /// First time at which the product is defined.
    pub fn first_time(self) -> usize {
        match self {
            Family::One => 2,
            Family::Two => 3,
        }
    }
}

/// Conjugation applied to a quadratic product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conjugation {
    /// `Y`.
    Plain,
    /// `HYHᵀ`.
    H,
    /// `H⁻¹YH⁻ᵀ`.
    HInv,
}

/// A kind of observable matrix object: a conjugated quadratic product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectType {
    /// The difference the product is formed from.
    pub family: Family,
    /// The conjugation applied to it.
    pub conj: Conjugation,
}

impl ObjectType {
    /// Short name used for matrix-space objects.
    pub fn name(&self) -> &'static str {
        match (self.family, self.conj) {
            (Family::One, Conjugation::Plain) => "one",
            (Family::One, Conjugation::H) => "one_h",
            (Family::One, Conjugation::HInv) => "one_hinv",
            (Family::Two, Conjugation::Plain) => "two",
            (Family::Two, Conjugation::H) => "two_h",
            (Family::Two, Conjugation::HInv) => "two_hinv",
        }
    }
}

/// The covariance matrices being learned about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    /// `V^ν`.
    Nu,
    /// `FᵀV^ωF`, which is `V^ω` itself in the identity model.
    Omega,
}

impl Target {
    /// Both targets.
    pub const ALL: [Target; 2] = [Target::Nu, Target::Omega];

    /// Short name used for matrix-space objects.
    pub fn name(&self) -> &'static str {
        match self {
            Target::Nu => "V_nu",
            Target::Omega => "FtV_omegaF",
        }
    }
}

/// How the element covariances were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Closed forms for the identity model with uncorrelated `V^ω`, `V^ν`.
    ClosedForm,
    /// Symbolic derivation by the moment engine, evaluated numerically.
    Derived,
}

/// Largest lag at which products of one family can share a residual.
const MAX_LAG_ONE: i32 = 1;
const MAX_LAG_TWO: i32 = 2;
/// Offsets `δ` for which `X′_s` and `X″_{s+δ}` can share a residual.
const CROSS_OFFSETS: [i32; 4] = [-1, 0, 1, 2];
/// Largest `|δ|` at which two objects can share a residual. Beyond it every
/// object covariance equals its tail value.
pub const BAND: i64 = 2;
/// Offset used to evaluate constant tails.
const TAIL_OFFSET: i32 = 6;

/// Covariance structure over the targets and the quadratic products of the
/// differences.
///
/// Element tensors are `r²×r²` matrices over `vec` positions: entry
/// `(a + r·b, c + r·d)` is `Cov(A_ab, B_cd)`. Matrix-level inner products
/// of conjugated objects are contractions of these tensors.
#[derive(Debug, Clone)]
pub struct QuadraticStructure {
    r: usize,
    h: DMatrix<f64>,
    h_inv: Option<DMatrix<f64>>,
    source: Source,
    types: Vec<ObjectType>,
    mean_one: DMatrix<f64>,
    mean_two: DMatrix<f64>,
    target_means: BTreeMap<Target, DMatrix<f64>>,
    /// `Cov(vec Y_s, vec Y_{s+δ})` for `δ = 0, 1` and the tail.
    one_one: Vec<DMatrix<f64>>,
    /// `Cov(vec Z_s, vec Z_{s+δ})` for `δ = 0, 1, 2` and the tail.
    two_two: Vec<DMatrix<f64>>,
    /// `Cov(vec Y_s, vec Z_{s+δ})` for the sharing offsets.
    one_two: BTreeMap<i32, DMatrix<f64>>,
    one_two_tail: DMatrix<f64>,
    /// `Cov(vec T, vec Y)` per target and family.
    target_obs: BTreeMap<(Target, Family), DMatrix<f64>>,
    /// `Cov(vec T₁, vec T₂)`.
    target_target: BTreeMap<(Target, Target), DMatrix<f64>>,
}

/// Builds the structure, using closed forms for the identity model with
/// zero cross-covariance and the moment engine otherwise.
pub fn quadratic_structure(spec: &DlmSpec, quartic: &QuarticSpec, h: &DMatrix<f64>) -> Result<QuadraticStructure> {
    quartic.check_against(spec)?;
    check_h(spec, h)?;
    if spec.is_identity() && is_identity(h) && quartic.cross.amax() == 0.0 {
        Ok(closed_form(spec, quartic))
    } else {
        derived(spec, quartic, h)
    }
}

/// Builds the structure with the moment engine regardless of the model.
pub fn quadratic_structure_derived(
    spec: &DlmSpec,
    quartic: &QuarticSpec,
    h: &DMatrix<f64>,
) -> Result<QuadraticStructure> {
    quartic.check_against(spec)?;
    check_h(spec, h)?;
    derived(spec, quartic, h)
}

fn check_h(spec: &DlmSpec, h: &DMatrix<f64>) -> Result<()> {
    let r = spec.r();
    if h.shape() != (r, r) {
        return Err(Error::Dimension(format!("H must be {r}x{r}")));
    }
    let ft = spec.f.transpose();
    let residual = (h * &ft - &ft * &spec.g).norm();
    if residual > crate::model::TOL_H * ft.norm() * spec.g.norm().max(1.0) {
        return Err(Error::NotTwoStepInvertible { residual });
    }
    Ok(())
}

fn object_types(h: &DMatrix<f64>, invertible: bool) -> Vec<ObjectType> {
    let r = h.nrows();
    let id = DMatrix::identity(r, r);
    let trivial = (h - &id).amax() < 1e-14 || (h + &id).amax() < 1e-14;
    let t = |family, conj| ObjectType { family, conj };
    if trivial || !invertible {
        vec![t(Family::One, Conjugation::Plain), t(Family::Two, Conjugation::Plain)]
    } else {
        vec![
            t(Family::One, Conjugation::Plain),
            t(Family::One, Conjugation::H),
            t(Family::One, Conjugation::HInv),
            t(Family::Two, Conjugation::Plain),
            t(Family::Two, Conjugation::HInv),
        ]
    }
}

fn invert_h(h: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let smallest = crate::model::smallest_singular_value(h);
    let largest = h.clone().svd(false, false).singular_values.max();
    if smallest <= bayeslin_core::Tolerances::default().pd * largest.max(1.0) {
        None
    } else {
        h.clone().try_inverse()
    }
}

/// Closed forms for `F = G = H = I` with `Cov(V^ω, V^ν) = 0`.
fn closed_form(spec: &DlmSpec, q: &QuarticSpec) -> QuadraticStructure {
    let r = spec.r();
    let (w, v) = (&spec.w, &spec.v);
    let om = &q.var_v_omega;
    let nu = &q.var_v_nu;
    let s_om = &q.var_s_omega;
    let s_nu = &q.var_s_nu;
    let e_nn = expected_pair_products(v, nu);
    let e_ww = expected_pair_products(w, om);
    // Products of one ω and one ν factor on each side, paired at equal times.
    let cross_means = DMatrix::from_fn(r * r, r * r, |x, y| {
        let (a, b) = (x % r, x / r);
        let (c, d) = (y % r, y / r);
        w[(a, c)] * v[(b, d)] + w[(a, d)] * v[(b, c)] + v[(a, d)] * w[(b, c)] + v[(a, c)] * w[(b, d)]
    });
    let base_one = om + nu * 4.0;
    let base_two = om * 4.0 + nu * 4.0;
    let base_cross = om * 2.0 + nu * 4.0;
    let one_one = vec![
        &base_one + s_nu * 2.0 + s_om + &e_nn * 2.0 + &cross_means * 2.0,
        &base_one + s_nu,
        base_one.clone(),
    ];
    let two_two = vec![
        &base_two + s_nu * 2.0 + s_om * 2.0 + &e_nn * 2.0 + &e_ww * 2.0 + &cross_means * 4.0,
        &base_two + s_om,
        &base_two + s_nu,
        base_two.clone(),
    ];
    let mut one_two = BTreeMap::new();
    one_two.insert(-1, &base_cross + s_nu);
    one_two.insert(0, &base_cross + s_nu + s_om + &cross_means);
    one_two.insert(1, &base_cross + s_nu + s_om + &cross_means);
    one_two.insert(2, &base_cross + s_nu);
    let mut target_obs = BTreeMap::new();
    target_obs.insert((Target::Nu, Family::One), nu * 2.0);
    target_obs.insert((Target::Nu, Family::Two), nu * 2.0);
    target_obs.insert((Target::Omega, Family::One), om.clone());
    target_obs.insert((Target::Omega, Family::Two), om * 2.0);
    let mut target_target = BTreeMap::new();
    target_target.insert((Target::Nu, Target::Nu), nu.clone());
    target_target.insert((Target::Omega, Target::Omega), om.clone());
    target_target.insert((Target::Nu, Target::Omega), DMatrix::zeros(r * r, r * r));
    target_target.insert((Target::Omega, Target::Nu), DMatrix::zeros(r * r, r * r));
    let mut target_means = BTreeMap::new();
    target_means.insert(Target::Nu, v.clone());
    target_means.insert(Target::Omega, w.clone());
    let h = DMatrix::identity(r, r);
    QuadraticStructure {
        r,
        types: object_types(&h, true),
        h_inv: Some(h.clone()),
        h,
        source: Source::ClosedForm,
        mean_one: w + v * 2.0,
        mean_two: w * 2.0 + v * 2.0,
        target_means,
        one_one,
        two_two,
        one_two,
        one_two_tail: base_cross,
        target_obs,
        target_target,
    }
}

/// The specification as a moment-engine table.
pub fn moment_table(spec: &DlmSpec, q: &QuarticSpec) -> TableSpec {
    let mut t = TableSpec::new();
    let (p, r) = (spec.p(), spec.r());
    let fill = |t: &mut TableSpec, kind: Kind, n: usize, e: &DMatrix<f64>, var: &DMatrix<f64>, s: &DMatrix<f64>| {
        for a in 0..n {
            for b in a..n {
                t.set_mean(kind, a as u32, b as u32, e[(a, b)]);
                for c in 0..n {
                    for d in c..n {
                        let (x, y) = (a + n * b, c + n * d);
                        if var[(x, y)] != 0.0 {
                            t.set_mean_cov((kind, a as u32, b as u32), (kind, c as u32, d as u32), var[(x, y)]);
                        }
                        if s[(x, y)] != 0.0 {
                            t.set_fluct_cov(kind, (a as u32, b as u32), (c as u32, d as u32), s[(x, y)]);
                        }
                    }
                }
            }
        }
    };
    fill(&mut t, Kind::State, p, &spec.w, &q.var_v_omega, &q.var_s_omega);
    fill(&mut t, Kind::Obs, r, &spec.v, &q.var_v_nu, &q.var_s_nu);
    for a in 0..p {
        for b in a..p {
            for c in 0..r {
                for d in c..r {
                    let val = q.cross[(a + p * b, c + r * d)];
                    if val != 0.0 {
                        t.set_mean_cov((Kind::State, a as u32, b as u32), (Kind::Obs, c as u32, d as u32), val);
                    }
                }
            }
        }
    }
    t
}

/// Symbolic forms of the differences and targets for a concrete model.
pub struct DifferenceForms {
    f: DMatrix<f64>,
    fg: DMatrix<f64>,
    h: DMatrix<f64>,
    h2: DMatrix<f64>,
}

impl DifferenceForms {
    /// Forms for the model and differencing matrix.
    pub fn new(spec: &DlmSpec, h: &DMatrix<f64>) -> Self {
        Self {
            f: spec.f.clone(),
            fg: spec.f.transpose() * &spec.g,
            h: h.clone(),
            h2: h * h,
        }
    }

    fn linear(terms: impl Iterator<Item = (Kind, usize, i32, f64)>) -> MomentExpr<f64> {
        let mut e = MomentExpr::<f64>::zero();
        for (kind, i, t, c) in terms {
            if c != 0.0 {
                e = &e + &residual::<f64>(kind, i as u32, t).scale(&c);
            }
        }
        e
    }

    /// Element `a` of the difference at time `t`, in residuals.
    pub fn element(&self, family: Family, a: usize, t: i32) -> MomentExpr<f64> {
        let (p, r) = self.f.shape();
        match family {
            Family::One => Self::linear(
                (0..p)
                    .map(|i| (Kind::State, i, t, self.f[(i, a)]))
                    .chain(std::iter::once((Kind::Obs, a, t, 1.0)))
                    .chain((0..r).map(|b| (Kind::Obs, b, t - 1, -self.h[(a, b)]))),
            ),
            Family::Two => Self::linear(
                (0..p)
                    .map(|i| (Kind::State, i, t, self.f[(i, a)]))
                    .chain((0..p).map(|i| (Kind::State, i, t - 1, self.fg[(a, i)])))
                    .chain(std::iter::once((Kind::Obs, a, t, 1.0)))
                    .chain((0..r).map(|b| (Kind::Obs, b, t - 2, -self.h2[(a, b)]))),
            ),
        }
    }

    /// Element `(a, b)` of the quadratic product at time `t`, with its
    /// factors tagged by slots `first_slot` and `first_slot + 1`.
    pub fn product(&self, family: Family, a: usize, b: usize, t: i32, first_slot: u32) -> MomentExpr<f64> {
        &in_slot(&self.element(family, a, t), first_slot) * &in_slot(&self.element(family, b, t), first_slot + 1)
    }

    /// Element `(a, b)` of a target matrix in mean symbols.
    pub fn target(&self, target: Target, a: usize, b: usize) -> MomentExpr<f64> {
        match target {
            Target::Nu => mean(Kind::Obs, a as u32, b as u32),
            Target::Omega => {
                let p = self.f.nrows();
                let mut e = MomentExpr::<f64>::zero();
                for i in 0..p {
                    for j in 0..p {
                        let c = self.f[(i, a)] * self.f[(j, b)];
                        if c != 0.0 {
                            e = &e + &mean::<f64>(Kind::State, i as u32, j as u32).scale(&c);
                        }
                    }
                }
                e
            }
        }
    }
}

const KEEP_CROSS: ExpectOptions = ExpectOptions {
    factorize_cross_means: false,
};

/// Fills an `r²×r²` tensor from a covariance of elements, using the symmetry
/// of both operands in their index pairs.
fn tensor(r: usize, mut cov: impl FnMut(usize, usize, usize, usize) -> Result<f64>) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(r * r, r * r);
    for a in 0..r {
        for b in a..r {
            for c in 0..r {
                for d in c..r {
                    let v = cov(a, b, c, d)?;
                    for (x, y) in [(a, b), (b, a)] {
                        for (z, u) in [(c, d), (d, c)] {
                            m[(x + r * y, z + r * u)] = v;
                        }
                    }
                }
            }
        }
    }
    Ok(m)
}

fn derived(spec: &DlmSpec, q: &QuarticSpec, h: &DMatrix<f64>) -> Result<QuadraticStructure> {
    let r = spec.r();
    let table = moment_table(spec, q);
    let forms = DifferenceForms::new(spec, h);
    let cov_products = |f1: Family, f2: Family, delta: i32| -> Result<DMatrix<f64>> {
        tensor(r, |a, b, c, d| {
            let left = forms.product(f1, a, b, 0, 0);
            let right = forms.product(f2, c, d, delta, 2);
            Ok(evaluate(&covariance_with(&left, &right, KEEP_CROSS)?, &table)?)
        })
    };
    let mean_of = |family: Family| -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(r, r);
        for a in 0..r {
            for b in a..r {
                let e = expectation_with(&forms.product(family, a, b, 0, 0), KEEP_CROSS)?;
                let v = evaluate(&e, &table)?;
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        Ok(m)
    };
    let mut one_one = Vec::new();
    for lag in 0..=MAX_LAG_ONE {
        one_one.push(cov_products(Family::One, Family::One, lag)?);
    }
    one_one.push(cov_products(Family::One, Family::One, TAIL_OFFSET)?);
    let mut two_two = Vec::new();
    for lag in 0..=MAX_LAG_TWO {
        two_two.push(cov_products(Family::Two, Family::Two, lag)?);
    }
    two_two.push(cov_products(Family::Two, Family::Two, TAIL_OFFSET)?);
    let mut one_two = BTreeMap::new();
    for delta in CROSS_OFFSETS {
        one_two.insert(delta, cov_products(Family::One, Family::Two, delta)?);
    }
    let one_two_tail = cov_products(Family::One, Family::Two, TAIL_OFFSET)?;

    let mut target_obs = BTreeMap::new();
    let mut target_target = BTreeMap::new();
    let mut target_means = BTreeMap::new();
    for target in Target::ALL {
        for family in [Family::One, Family::Two] {
            let m = tensor(r, |a, b, c, d| {
                let e = covariance_with(
                    &forms.target(target, a, b),
                    &forms.product(family, c, d, 0, 0),
                    KEEP_CROSS,
                )?;
                Ok(evaluate(&e, &table)?)
            })?;
            target_obs.insert((target, family), m);
        }
        for other in Target::ALL {
            let m = tensor(r, |a, b, c, d| {
                let e = covariance_with(&forms.target(target, a, b), &forms.target(other, c, d), KEEP_CROSS)?;
                Ok(evaluate(&e, &table)?)
            })?;
            target_target.insert((target, other), m);
        }
        let mut m = DMatrix::zeros(r, r);
        for a in 0..r {
            for b in 0..r {
                m[(a, b)] = evaluate(&expectation_with(&forms.target(target, a, b), KEEP_CROSS)?, &table)?;
            }
        }
        target_means.insert(target, m);
    }
    let h_inv = invert_h(h);
    Ok(QuadraticStructure {
        r,
        types: object_types(h, h_inv.is_some()),
        h: h.clone(),
        h_inv,
        source: Source::Derived,
        mean_one: mean_of(Family::One)?,
        mean_two: mean_of(Family::Two)?,
        target_means,
        one_one,
        two_two,
        one_two,
        one_two_tail,
        target_obs,
        target_target,
    })
}

impl QuadraticStructure {
    /// Observation dimension.
    pub fn r(&self) -> usize {
        self.r
    }

    /// The differencing matrix.
    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// `H⁻¹` when `H` is invertible.
    pub fn h_inv(&self) -> Option<&DMatrix<f64>> {
        self.h_inv.as_ref()
    }

    /// How the element covariances were obtained.
    pub fn source(&self) -> Source {
        self.source
    }

    /// Object types observed at each time, in order. Conjugated types are
    /// present only when `H` is invertible and not `±I`.
    pub fn types(&self) -> &[ObjectType] {
        &self.types
    }

    /// Object types defined at time `t`.
    pub fn types_at(&self, t: usize) -> Vec<ObjectType> {
        self.types
            .iter()
            .copied()
            .filter(|ty| t >= ty.family.first_time())
            .collect()
    }

    /// The conjugating matrix `L` of an object `LYLᵀ`.
    pub fn conjugator(&self, conj: Conjugation) -> DMatrix<f64> {
        match conj {
            Conjugation::Plain => DMatrix::identity(self.r, self.r),
            Conjugation::H => self.h.clone(),
            Conjugation::HInv => self.h_inv.clone().expect("conjugated types need an invertible H"),
        }
    }

    /// `E(Y)` for a family.
    pub fn family_mean(&self, family: Family) -> &DMatrix<f64> {
        match family {
            Family::One => &self.mean_one,
            Family::Two => &self.mean_two,
        }
    }

    /// Expectation of an object of the given type.
    pub fn object_mean(&self, ty: ObjectType) -> DMatrix<f64> {
        let l = self.conjugator(ty.conj);
        &l * self.family_mean(ty.family) * l.transpose()
    }

    /// Expectation of a target.
    pub fn target_mean(&self, target: Target) -> &DMatrix<f64> {
        &self.target_means[&target]
    }

    /// `Cov(vec Y^{f1}_s, vec Y^{f2}_{s+δ})`.
    pub fn element_cov(&self, f1: Family, f2: Family, delta: i64) -> DMatrix<f64> {
        match (f1, f2) {
            (Family::One, Family::One) => {
                let m = &self.one_one[(delta.unsigned_abs() as usize).min(self.one_one.len() - 1)];
                if delta < 0 {
                    m.transpose()
                } else {
                    m.clone()
                }
            }
            (Family::Two, Family::Two) => {
                let m = &self.two_two[(delta.unsigned_abs() as usize).min(self.two_two.len() - 1)];
                if delta < 0 {
                    m.transpose()
                } else {
                    m.clone()
                }
            }
            (Family::One, Family::Two) => i32::try_from(delta)
                .ok()
                .and_then(|d| self.one_two.get(&d))
                .unwrap_or(&self.one_two_tail)
                .clone(),
            (Family::Two, Family::One) => self.element_cov(Family::One, Family::Two, -delta).transpose(),
        }
    }

    /// `Cov(vec T, vec Y)` for a target and an unconjugated family.
    pub fn element_target_cov(&self, target: Target, family: Family) -> &DMatrix<f64> {
        &self.target_obs[&(target, family)]
    }

    /// `Cov(vec T₁, vec T₂)`.
    pub fn element_target_var(&self, t1: Target, t2: Target) -> &DMatrix<f64> {
        &self.target_target[&(t1, t2)]
    }

    /// Constant-adjusted matrix inner product between an object of type
    /// `a` at time `s` and type `b` at time `s + δ`.
    pub fn object_cov(&self, a: ObjectType, b: ObjectType, delta: i64) -> f64 {
        let k = self.conjugator(a.conj).transpose() * self.conjugator(b.conj);
        contract(&k, &k, &self.element_cov(a.family, b.family, delta))
    }

    /// Constant-adjusted inner product of a target with an object.
    pub fn target_object_cov(&self, target: Target, ty: ObjectType) -> f64 {
        let l = self.conjugator(ty.conj);
        // Cov(T_jk, Σ L_ja L_kb Y_ab) summed over (j, k).
        contract(&l, &l, self.element_target_cov(target, ty.family))
    }

    /// Constant-adjusted inner product between two targets.
    pub fn target_cov(&self, t1: Target, t2: Target) -> f64 {
        self.element_target_var(t1, t2).diagonal().sum()
    }

    /// Full-trace sums of `E(V^ω)`, `E(V^ν)`, `E(X′X′ᵀ)` and `E(X″X″ᵀ)` from a
    /// model's `W` and `V`.
    pub fn expectation_sums(&self, spec: &DlmSpec) -> [f64; 4] {
        [spec.w.sum(), spec.v.sum(), self.mean_one.sum(), self.mean_two.sum()]
    }
}

/// `Σ_{a,b,c,d} K_ac K_bd C[(a,b),(c,d)]` with `vec` positions.
fn contract(k1: &DMatrix<f64>, k2: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let r = k1.nrows();
    let mut total = 0.0;
    for a in 0..r {
        for b in 0..r {
            for cc in 0..r {
                let kac = k1[(a, cc)];
                if kac == 0.0 {
                    continue;
                }
                for d in 0..r {
                    total += kac * k2[(b, d)] * c[(a + r * b, cc + r * d)];
                }
            }
        }
    }
    total
}
