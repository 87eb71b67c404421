use bayeslin_matrix::{MatrixObject, MatrixSpace, Weighting};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{compute_h, DiffSeries, DlmSpec, QuarticSpec};
use crate::structure::{quadratic_structure, Family, ObjectType, QuadraticStructure, Target, BAND};

/// An observable object: a conjugated quadratic product at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observable {
    /// Time index, starting at 1 for the first observation.
    pub t: usize,
    /// Object type.
    pub ty: ObjectType,
}

impl Observable {
    /// Name used in an assembled matrix space.
    pub fn name(&self) -> String {
        format!("{}[{}]", self.ty.name(), self.t)
    }
}

/// A model together with its quadratic structure and precomputed
/// matrix-level inner products by lag.
#[derive(Debug, Clone)]
pub struct DlmSpace {
    /// The model.
    pub spec: DlmSpec,
    /// Covariance structure of the quadratic products.
    pub structure: QuadraticStructure,
    /// `lags[α][β][δ + BAND + 1]`: inner product of type `α` at `s` with
    /// type `β` at `s + δ`, for `|δ| ≤ BAND + 1`; the outer entries are the
    /// tails.
    lags: Vec<Vec<Vec<f64>>>,
    /// Inner product of each target with each type.
    target_cov: Vec<Vec<f64>>,
}

impl DlmSpace {
    /// Computes `H` and the structure for a model.
    pub fn new(spec: DlmSpec, quartic: &QuarticSpec) -> Result<Self> {
        let h = compute_h(&spec.f, &spec.g)?;
        Self::with_h(spec, quartic, h)
    }

    /// As [`DlmSpace::new`] with a chosen `H`.
    pub fn with_h(spec: DlmSpec, quartic: &QuarticSpec, h: DMatrix<f64>) -> Result<Self> {
        let structure = quadratic_structure(&spec, quartic, &h)?;
        Ok(Self::from_structure(spec, structure))
    }

    /// Wraps an already computed structure.
    pub fn from_structure(spec: DlmSpec, structure: QuadraticStructure) -> Self {
        let types = structure.types().to_vec();
        let reach = BAND + 1;
        let lags = types
            .iter()
            .map(|&a| {
                types
                    .iter()
                    .map(|&b| (-reach..=reach).map(|d| structure.object_cov(a, b, d)).collect())
                    .collect()
            })
            .collect();
        let target_cov = Target::ALL
            .iter()
            .map(|&tg| types.iter().map(|&ty| structure.target_object_cov(tg, ty)).collect())
            .collect();
        Self {
            spec,
            structure,
            lags,
            target_cov,
        }
    }

    /// Position of a type in [`QuadraticStructure::types`].
    pub fn type_index(&self, ty: ObjectType) -> usize {
        self.structure
            .types()
            .iter()
            .position(|t| *t == ty)
            .expect("type belongs to the structure")
    }

    /// Inner product of `a` at `s` with `b` at `s + δ`, from the cache.
    pub fn lag_cov(&self, a: usize, b: usize, delta: i64) -> f64 {
        let reach = BAND + 1;
        let d = delta.clamp(-reach, reach);
        self.lags[a][b][(d + reach) as usize]
    }

    /// Tail inner product between types `a` and `b`.
    pub fn tail_cov(&self, a: usize, b: usize) -> f64 {
        self.lag_cov(a, b, BAND + 1)
    }

    /// Inner product of a target with type `a` at any time.
    pub fn target_type_cov(&self, target: Target, a: usize) -> f64 {
        self.target_cov[target_index(target)][a]
    }

    /// Observable objects up to time `n`, ordered by time then type.
    pub fn observables(&self, n: usize) -> Vec<Observable> {
        (2..=n)
            .flat_map(|t| {
                self.structure
                    .types_at(t)
                    .into_iter()
                    .map(move |ty| Observable { t, ty })
            })
            .collect()
    }

    /// Realized value of an observable.
    pub fn realize(&self, diffs: &DiffSeries, obs: Observable) -> Result<DMatrix<f64>> {
        let x = match obs.ty.family {
            Family::One => diffs.one_at(obs.t),
            Family::Two => diffs.two_at(obs.t),
        }
        .ok_or_else(|| Error::TooShort {
            len: diffs.len(),
            min: obs.t,
        })?;
        let y = x * x.transpose();
        let l = self.structure.conjugator(obs.ty.conj);
        Ok(&l * y * l.transpose())
    }

    /// Dense constant-adjusted Gram of the observables up to time `n`.
    pub fn gram(&self, n: usize) -> DMatrix<f64> {
        let objs = self.observables(n);
        let idx: Vec<usize> = objs.iter().map(|o| self.type_index(o.ty)).collect();
        DMatrix::from_fn(objs.len(), objs.len(), |i, j| {
            self.lag_cov(idx[i], idx[j], objs[j].t as i64 - objs[i].t as i64)
        })
    }

    /// Assembles a matrix space holding the two targets and every
    /// observable up to time `n`, with full-trace weighting. Returns the
    /// space and the observable names in order.
    ///
    /// The dense space is meant for moderate `n`; [`crate::adjust_dlm_covariances`]
    /// solves the same projection in linear time.
    pub fn assemble_matrix_space(&self, n: usize) -> Result<(MatrixSpace, Vec<String>)> {
        if n < 3 {
            return Err(Error::TooShort { len: n, min: 3 });
        }
        let objs = self.observables(n);
        let names: Vec<String> = objs.iter().map(|o| o.name()).collect();
        let mut builder = MatrixSpace::builder(None, Weighting::FullTrace);
        for tg in Target::ALL {
            builder = builder.object(MatrixObject::primitive(
                tg.name(),
                self.structure.target_mean(tg).clone(),
                true,
            ));
        }
        for (o, name) in objs.iter().zip(&names) {
            builder = builder.object(MatrixObject::primitive(
                name.clone(),
                self.structure.object_mean(o.ty),
                true,
            ));
        }
        for (i, t1) in Target::ALL.iter().enumerate() {
            for t2 in &Target::ALL[i..] {
                builder = builder.declare_covariance(t1.name(), t2.name(), self.structure.target_cov(*t1, *t2));
            }
            for (o, name) in objs.iter().zip(&names) {
                builder = builder.declare_covariance(t1.name(), name, self.target_type_cov(*t1, self.type_index(o.ty)));
            }
        }
        let gram = self.gram(n);
        for i in 0..objs.len() {
            for j in i..objs.len() {
                builder = builder.declare_covariance(&names[i], &names[j], gram[(i, j)]);
            }
        }
        Ok((builder.build()?, names))
    }
}

pub(crate) fn target_index(t: Target) -> usize {
    match t {
        Target::Nu => 0,
        Target::Omega => 1,
    }
}
