use std::collections::{BTreeMap, HashMap};

use bayeslin_core::linalg::{check_nnd, symmetrize};
use bayeslin_core::{BeliefStore, Tolerances};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::object::{MatrixObject, ObjectKind};

/// Which entries of `PQᵀ`'s diagonal contribute to the inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// `E(Tr(PQᵀ))`: every ordered pair `(j, k)` counts once.
    #[default]
    FullTrace,
    /// Each unordered pair `{j, k}` counts once (entries with `j ≤ k`).
    Distinct,
}

impl Weighting {
    /// Weight of entry `(j, k)`.
    pub fn weight(self, j: usize, k: usize) -> f64 {
        match self {
            Weighting::FullTrace => 1.0,
            Weighting::Distinct => {
                if j <= k {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `Σ w_jk a_jk b_jk` for two fixed matrices.
    pub fn pair(self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        let mut total = 0.0;
        for k in 0..a.ncols() {
            for j in 0..a.nrows() {
                total += self.weight(j, k) * a[(j, k)] * b[(j, k)];
            }
        }
        total
    }
}

/// Builder for a [`MatrixSpace`].
#[derive(Debug, Clone)]
pub struct MatrixSpaceBuilder {
    store: Option<BeliefStore>,
    weighting: Weighting,
    objects: Vec<MatrixObject>,
    declared: BTreeMap<(String, String), f64>,
}

impl MatrixSpaceBuilder {
    /// Adds an object.
    pub fn object(mut self, obj: MatrixObject) -> Self {
        self.objects.push(obj);
        self
    }

    /// Adds several objects.
    pub fn objects(mut self, objs: impl IntoIterator<Item = MatrixObject>) -> Self {
        self.objects.extend(objs);
        self
    }

    /// Declares the constant-adjusted inner product `ΣΣ w·Cov(A_jk, B_jk)`
    /// between two objects, at least one of which is primitive.
    pub fn declare_covariance(mut self, a: &str, b: &str, value: f64) -> Self {
        self.declared.insert(ordered(a, b), value);
        self
    }

    /// Validates the objects and computes the Gram matrix.
    pub fn build(self) -> Result<MatrixSpace> {
        MatrixSpace::from_builder(self)
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// A finite collection of random matrices with the inner product
/// `(P, Q) = E(Σ w_jk P_jk Q_jk)`.
///
/// The Gram matrices are computed when the space is built, so the space is
/// immutable and can be read from several threads.
#[derive(Debug, Clone)]
pub struct MatrixSpace {
    store: Option<BeliefStore>,
    weighting: Weighting,
    objects: Vec<MatrixObject>,
    index: HashMap<String, usize>,
    means: Vec<DMatrix<f64>>,
    cov_gram: DMatrix<f64>,
    gram: DMatrix<f64>,
}

impl MatrixSpace {
    /// Starts a space over an optional base store.
    pub fn builder(store: Option<BeliefStore>, weighting: Weighting) -> MatrixSpaceBuilder {
        MatrixSpaceBuilder {
            store,
            weighting,
            objects: Vec::new(),
            declared: BTreeMap::new(),
        }
    }

    fn from_builder(b: MatrixSpaceBuilder) -> Result<Self> {
        let mut index = HashMap::new();
        let r = b.objects.first().map(|o| o.r).unwrap_or(0);
        for (i, o) in b.objects.iter().enumerate() {
            if index.insert(o.name.clone(), i).is_some() {
                return Err(Error::DuplicateObject(o.name.clone()));
            }
            if o.r != r {
                return Err(Error::Dimension(format!(
                    "object `{}` is {}x{} but `{}` is {r}x{r}",
                    o.name, o.r, o.r, b.objects[0].name
                )));
            }
            validate(o, b.store.as_ref())?;
        }
        let mean_vec = b.store.as_ref().map(|s| s.expectation());
        let means: Vec<DMatrix<f64>> = b.objects.iter().map(|o| o.expectation(mean_vec)).collect();
        let n = b.objects.len();
        let mut cov_gram = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = pair_covariance(&b, i, j)?;
                cov_gram[(i, j)] = v;
                cov_gram[(j, i)] = v;
            }
        }
        check_nnd("matrix covariance Gram", &cov_gram, Tolerances::default().psd)?;
        let mut gram = cov_gram.clone();
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] += b.weighting.pair(&means[i], &means[j]);
            }
        }
        Ok(Self {
            store: b.store,
            weighting: b.weighting,
            objects: b.objects,
            index,
            means,
            cov_gram,
            gram: symmetrize(&gram),
        })
    }

    /// The weighting convention.
    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    /// The base store of derived objects, if any.
    pub fn store(&self) -> Option<&BeliefStore> {
        self.store.as_ref()
    }

    /// Matrix dimension shared by all objects.
    pub fn r(&self) -> usize {
        self.objects.first().map(|o| o.r).unwrap_or(0)
    }

    /// Objects in insertion order.
    pub fn objects(&self) -> &[MatrixObject] {
        &self.objects
    }

    /// Position of an object.
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    /// The object with the given name.
    pub fn object(&self, name: &str) -> Result<&MatrixObject> {
        Ok(&self.objects[self.index_of(name)?])
    }

    /// Expectation matrix of an object.
    pub fn expectation(&self, name: &str) -> Result<&DMatrix<f64>> {
        Ok(&self.means[self.index_of(name)?])
    }

    /// `(A, B)`: covariance part plus the weighted product of expectations.
    pub fn inner_product(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.gram[(self.index_of(a)?, self.index_of(b)?)])
    }

    /// The constant-adjusted inner product `ΣΣ w·Cov(A_jk, B_jk)`.
    pub fn matrix_covariance(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.cov_gram[(self.index_of(a)?, self.index_of(b)?)])
    }

    /// Norm `√(A, A)`.
    pub fn norm(&self, a: &str) -> Result<f64> {
        Ok(self.inner_product(a, a)?.max(0.0).sqrt())
    }

    /// Distance `√(A − B, A − B)`.
    pub fn distance(&self, a: &str, b: &str) -> Result<f64> {
        let d = self.inner_product(a, a)? + self.inner_product(b, b)? - 2.0 * self.inner_product(a, b)?;
        Ok(d.max(0.0).sqrt())
    }

    /// Inner-product Gram over the named objects.
    pub fn gram_of(&self, names: &[&str]) -> Result<DMatrix<f64>> {
        self.sub(&self.gram, names, names)
    }

    /// Constant-adjusted Gram over the named objects.
    pub fn cov_gram_of(&self, rows: &[&str], cols: &[&str]) -> Result<DMatrix<f64>> {
        self.sub(&self.cov_gram, rows, cols)
    }

    /// `Σ w·E(A)_jk·C_jk`, the inner product of an object with a constant matrix.
    pub fn inner_with_constant(&self, a: &str, c: &DMatrix<f64>) -> Result<f64> {
        Ok(self.weighting.pair(self.expectation(a)?, c))
    }

    fn sub(&self, m: &DMatrix<f64>, rows: &[&str], cols: &[&str]) -> Result<DMatrix<f64>> {
        let ri: Vec<usize> = rows.iter().map(|n| self.index_of(n)).collect::<Result<_>>()?;
        let ci: Vec<usize> = cols.iter().map(|n| self.index_of(n)).collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(ri.len(), ci.len(), |a, b| m[(ri[a], ci[b])]))
    }

    /// Realized value of a derived or constant object from a full vector of
    /// store values.
    pub fn evaluate(&self, name: &str, values: &DVector<f64>) -> Result<DMatrix<f64>> {
        let obj = self.object(name)?;
        obj.evaluate(values).ok_or_else(|| Error::Primitive(name.to_string()))
    }

    /// Realized value of a derived or constant object from observed values
    /// of the quantities it references, keyed by store label.
    pub fn observe(&self, name: &str, observed: &HashMap<String, f64>) -> Result<DMatrix<f64>> {
        let obj = self.object(name)?;
        match &obj.kind {
            ObjectKind::Constant(m) => Ok(m.clone()),
            ObjectKind::Primitive { .. } => Err(Error::Primitive(name.to_string())),
            ObjectKind::Derived { entries } => {
                let store = self.store.as_ref().ok_or_else(|| Error::ForeignQuantity(name.into()))?;
                let labels = store.labels();
                let mut values = DVector::zeros(store.len());
                for e in entries {
                    for &(q, _) in &e.terms {
                        values[q] = *observed
                            .get(&labels[q])
                            .ok_or_else(|| Error::MissingObservation(labels[q].clone()))?;
                    }
                }
                Ok(obj.evaluate(&values).expect("derived objects evaluate"))
            }
        }
    }
}

fn validate(o: &MatrixObject, store: Option<&BeliefStore>) -> Result<()> {
    match &o.kind {
        ObjectKind::Derived { entries } => {
            let store = store.ok_or_else(|| Error::ForeignQuantity(o.name.clone()))?;
            if entries.len() != o.r * o.r {
                return Err(Error::Dimension(format!("object `{}` has malformed entries", o.name)));
            }
            if entries
                .iter()
                .flat_map(|e| e.terms.iter())
                .any(|&(q, _)| q >= store.len())
            {
                return Err(Error::ForeignQuantity(o.name.clone()));
            }
        }
        ObjectKind::Primitive { expectation } | ObjectKind::Constant(expectation) => {
            if expectation.nrows() != expectation.ncols() {
                return Err(Error::Dimension(format!("object `{}` is not square", o.name)));
            }
        }
    }
    if o.symmetric {
        for i in 0..o.r {
            for j in (i + 1)..o.r {
                let equal = match &o.kind {
                    ObjectKind::Derived { entries } => entries[o.r * j + i] == entries[o.r * i + j],
                    ObjectKind::Primitive { expectation } | ObjectKind::Constant(expectation) => {
                        expectation[(i, j)] == expectation[(j, i)]
                    }
                };
                if !equal {
                    return Err(Error::NotSymmetric {
                        name: o.name.clone(),
                        i,
                        j,
                    });
                }
            }
        }
    }
    Ok(())
}

fn pair_covariance(b: &MatrixSpaceBuilder, i: usize, j: usize) -> Result<f64> {
    let (oa, ob) = (&b.objects[i], &b.objects[j]);
    match (&oa.kind, &ob.kind) {
        (ObjectKind::Constant(_), _) | (_, ObjectKind::Constant(_)) => Ok(0.0),
        (ObjectKind::Derived { entries: ea }, ObjectKind::Derived { entries: eb }) => {
            let cov = b.store.as_ref().expect("validated").covariance();
            let r = oa.r;
            let mut total = 0.0;
            for k in 0..r {
                for jj in 0..r {
                    let w = b.weighting.weight(jj, k);
                    if w != 0.0 {
                        total += w * ea[r * k + jj].covariance(&eb[r * k + jj], cov);
                    }
                }
            }
            Ok(total)
        }
        _ => b
            .declared
            .get(&ordered(&oa.name, &ob.name))
            .copied()
            .ok_or_else(|| Error::MissingGram(oa.name.clone(), ob.name.clone())),
    }
}
