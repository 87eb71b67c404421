use bayeslin_matrix::MatrixObject;
use bayeslin_moments::{canonical, MomentExpr, Sym};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{smallest_singular_value, DlmSpec};
use crate::structure::{Conjugation, DifferenceForms, Family, ObjectType, QuadraticStructure};

/// One term `c·L Y_{t+offset} Lᵀ` of a recipe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecipeTerm {
    /// Object type, including its conjugation.
    pub ty: ObjectType,
    /// Time offset relative to the recipe's time (`0` or negative).
    pub offset: i64,
    /// Coefficient.
    pub coeff: f64,
}

/// A linear combination of observable objects whose running means identify
/// a target matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    /// Human-readable name.
    pub name: String,
    /// Terms of the combination.
    pub terms: Vec<RecipeTerm>,
}

impl Recipe {
    fn new(name: &str, terms: &[(Family, Conjugation, i64, f64)]) -> Self {
        Self {
            name: name.to_string(),
            terms: terms
                .iter()
                .map(|&(family, conj, offset, coeff)| RecipeTerm {
                    ty: ObjectType { family, conj },
                    offset,
                    coeff,
                })
                .collect(),
        }
    }

    /// Merges conjugated terms into plain ones when `H = ±I`, where
    /// conjugation is the identity.
    pub fn simplified(&self, structure: &QuadraticStructure) -> Recipe {
        let r = structure.r();
        let h = structure.h();
        let trivial = (h - DMatrix::identity(r, r)).amax() < 1e-14 || (h + DMatrix::identity(r, r)).amax() < 1e-14;
        let mut out: Vec<RecipeTerm> = Vec::new();
        for term in &self.terms {
            let ty = if trivial {
                ObjectType {
                    family: term.ty.family,
                    conj: Conjugation::Plain,
                }
            } else {
                term.ty
            };
            match out.iter_mut().find(|t| t.ty == ty && t.offset == term.offset) {
                Some(t) => t.coeff += term.coeff,
                None => out.push(RecipeTerm { ty, ..*term }),
            }
        }
        out.retain(|t| t.coeff != 0.0);
        Recipe {
            name: self.name.clone(),
            terms: out,
        }
    }

    /// Earliest time at which every term is defined.
    pub fn first_time(&self) -> usize {
        self.terms
            .iter()
            .map(|t| (t.ty.family.first_time() as i64 - t.offset) as usize)
            .max()
            .unwrap_or(2)
    }

    /// Value from the quadratic products: `one(t)` and `two(t)` return
    /// `X′_tX′_tᵀ` and `X″_tX″_tᵀ`.
    pub fn realize(
        &self,
        structure: &QuadraticStructure,
        t: usize,
        one: impl Fn(usize) -> Option<DMatrix<f64>>,
        two: impl Fn(usize) -> Option<DMatrix<f64>>,
    ) -> Result<DMatrix<f64>> {
        let r = structure.r();
        let mut out = DMatrix::zeros(r, r);
        for term in &self.terms {
            let time = t as i64 + term.offset;
            let y = if time < 1 {
                None
            } else {
                match term.ty.family {
                    Family::One => one(time as usize),
                    Family::Two => two(time as usize),
                }
            };
            let y =
                y.ok_or_else(|| Error::InvalidArgument(format!("recipe `{}` is undefined at time {t}", self.name)))?;
            let l = structure.conjugator(term.ty.conj);
            out += &l * y * l.transpose() * term.coeff;
        }
        Ok(out)
    }

    /// Expectation of the recipe.
    pub fn expectation(&self, structure: &QuadraticStructure) -> DMatrix<f64> {
        let r = structure.r();
        let mut out = DMatrix::zeros(r, r);
        for term in &self.terms {
            out += structure.object_mean(term.ty) * term.coeff;
        }
        out
    }

    /// Constant-adjusted matrix variance of the recipe at one time.
    pub fn variance(&self, structure: &QuadraticStructure) -> f64 {
        let mut total = 0.0;
        for a in &self.terms {
            for b in &self.terms {
                total += a.coeff * b.coeff * structure.object_cov(a.ty, b.ty, b.offset - a.offset);
            }
        }
        total
    }

    /// Element `(a, b)` of the recipe at time 0 as a polynomial in residuals.
    pub fn symbolic(
        &self,
        structure: &QuadraticStructure,
        forms: &DifferenceForms,
        a: usize,
        b: usize,
    ) -> MomentExpr<f64> {
        let r = structure.r();
        let mut e = MomentExpr::<f64>::zero();
        for term in &self.terms {
            let l = structure.conjugator(term.ty.conj);
            for i in 0..r {
                for j in 0..r {
                    let c = term.coeff * l[(a, i)] * l[(b, j)];
                    if c != 0.0 {
                        e = &e + &forms.product(term.ty.family, i, j, term.offset as i32, 0).scale(&c);
                    }
                }
            }
        }
        e
    }
}

/// The part of an expression that survives averaging over time: after
/// the pair substitutions, the terms made only of mean-matrix elements.
pub fn mean_component(e: &MomentExpr<f64>) -> MomentExpr<f64> {
    let mut out = MomentExpr::<f64>::zero();
    for (monomial, c) in canonical(e).terms() {
        if monomial.iter().all(|s| matches!(s, Sym::Mean { .. })) {
            out = &out + &MomentExpr::term(*c, monomial.to_vec());
        }
    }
    out
}

/// Recipes identifying `V^ν`, `FᵀV^ωF` and `HV^νHᵀ`, and the limit matrices
/// of the two quadratic collections.
#[derive(Debug, Clone)]
pub struct IdentificationTargets {
    /// `M_t = ½[Y − H⁻¹(Z − Y)H⁻ᵀ]`, identifying `V^ν`.
    pub nu: Recipe,
    /// `Y − M_t − HM_tHᵀ`, identifying `FᵀV^ωF`.
    pub omega: Recipe,
    /// `½[HYHᵀ − (Z − Y)]`, identifying `HV^νHᵀ`.
    pub h_nu_h: Recipe,
    /// For the identity model, `−½(X′_tX′_{t−1}ᵀ + X′_{t−1}X′_tᵀ)`, written as
    /// `½Y_t + ½Y_{t−1} − ½Z_t`; it also identifies `V^ν`.
    pub cross_term: Option<Recipe>,
    /// Identified objects `M′`, `M″`, `V^ν`, `FᵀV^ωF`, `HV^νHᵀ` with their
    /// prior expectations.
    pub identified: Vec<MatrixObject>,
}

/// Builds the identification recipes. Requires an invertible `H`.
pub fn identification_targets(spec: &DlmSpec, structure: &QuadraticStructure) -> Result<IdentificationTargets> {
    let h = structure.h();
    let smallest = smallest_singular_value(h);
    let largest = h.clone().svd(false, false).singular_values.max();
    if structure.h_inv().is_none() || smallest <= bayeslin_core::Tolerances::default().pd * largest.max(1.0) {
        return Err(Error::SingularH { smallest });
    }
    use Conjugation::{HInv, Plain, H};
    use Family::{One, Two};
    let nu = Recipe::new("M", &[(One, Plain, 0, 0.5), (One, HInv, 0, 0.5), (Two, HInv, 0, -0.5)]).simplified(structure);
    let omega = Recipe::new(
        "FtV_omegaF",
        &[
            (One, HInv, 0, -0.5),
            (Two, HInv, 0, 0.5),
            (One, H, 0, -0.5),
            (Two, Plain, 0, 0.5),
        ],
    )
    .simplified(structure);
    let h_nu_h = Recipe::new(
        "HV_nuH",
        &[(One, H, 0, 0.5), (Two, Plain, 0, -0.5), (One, Plain, 0, 0.5)],
    )
    .simplified(structure);
    let cross_term = if spec.is_identity() && crate::model::is_identity(h) {
        Some(Recipe::new(
            "cross",
            &[(One, Plain, 0, 0.5), (One, Plain, -1, 0.5), (Two, Plain, 0, -0.5)],
        ))
    } else {
        None
    };
    let ft = spec.f.transpose();
    let fwf = &ft * &spec.w * &spec.f;
    let gwg = &ft * &spec.g * &spec.w * spec.g.transpose() * &spec.f;
    let h2 = h * h;
    let hvh = h * &spec.v * h.transpose();
    let m1 = &fwf + &spec.v + &hvh;
    let m2 = &gwg + &fwf + &spec.v + &h2 * &spec.v * h2.transpose();
    let identified = vec![
        MatrixObject::primitive("M_one", m1, true),
        MatrixObject::primitive("M_two", m2, true),
        MatrixObject::primitive("V_nu", spec.v.clone(), true),
        MatrixObject::primitive("FtV_omegaF", fwf, true),
        MatrixObject::primitive("HV_nuH", hvh, true),
    ];
    Ok(IdentificationTargets {
        nu,
        omega,
        h_nu_h,
        cross_term,
        identified,
    })
}
