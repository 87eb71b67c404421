use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::object::{Affine, MatrixObject};

/// Distinct pairs `(i, j)`, `i ≤ j`, of an `r×r` symmetric matrix in
/// row-major upper-triangle order.
pub fn upper_pairs(r: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(r * (r + 1) / 2);
    for i in 0..r {
        for j in i..r {
            out.push((i, j));
        }
    }
    out
}

/// A set of constant matrices spanning the constant part of a projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantBasis {
    /// The basis matrices.
    pub matrices: Vec<DMatrix<f64>>,
}

impl ConstantBasis {
    /// Symmetric unit patterns: `E_ii`, and `E_ij + E_ji` for `i < j`.
    pub fn symmetric(r: usize) -> Self {
        Self {
            matrices: upper_pairs(r).into_iter().map(|(i, j)| pattern(r, i, j)).collect(),
        }
    }

    /// All `r²` unit matrices, `C_{r·j+i}` having a single 1 at `(i, j)`.
    pub fn full(r: usize) -> Self {
        let mut matrices = Vec::with_capacity(r * r);
        for j in 0..r {
            for i in 0..r {
                let mut m = DMatrix::zeros(r, r);
                m[(i, j)] = 1.0;
                matrices.push(m);
            }
        }
        Self { matrices }
    }

    /// An arbitrary list of constant matrices.
    pub fn custom(matrices: Vec<DMatrix<f64>>) -> Self {
        Self { matrices }
    }

    /// No constants: projection onto the collection alone.
    pub fn none() -> Self {
        Self { matrices: Vec::new() }
    }

    /// Number of basis matrices.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    /// Whether the basis is empty.
    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

fn pattern(r: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(r, r);
    m[(i, j)] = 1.0;
    m[(j, i)] = 1.0;
    m
}

/// The single-object, individual and full variance collections built from a
/// symmetric matrix object.
#[derive(Debug, Clone)]
pub struct Collections {
    /// The object itself.
    pub single: Vec<MatrixObject>,
    /// One object per distinct element, placed in its own symmetric position.
    pub individual: Vec<MatrixObject>,
    /// Every distinct element placed in every distinct symmetric position.
    pub full: Vec<MatrixObject>,
}

/// Builds the collections for `s` over the distinct pairs in `pairs`.
///
/// Individual members are named `name[i,j]` and full members
/// `name[i,j]@[k,l]`, with 1-based indices.
pub fn build_collections(s: &MatrixObject, pairs: &[(usize, usize)]) -> Result<Collections> {
    Ok(Collections {
        single: vec![s.clone()],
        individual: individual_collection(s, pairs)?,
        full: full_collection(s, pairs)?,
    })
}

/// One object per distinct element of `s`, placed at `(i, j)` and `(j, i)`.
pub fn individual_collection(s: &MatrixObject, pairs: &[(usize, usize)]) -> Result<Vec<MatrixObject>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            let e = element(s, i, j)?;
            Ok(placed(format!("{}[{},{}]", s.name, i + 1, j + 1), s.r, e, i, j))
        })
        .collect()
}

/// Each distinct element of `s` placed in every distinct symmetric pattern,
/// element-major.
pub fn full_collection(s: &MatrixObject, pairs: &[(usize, usize)]) -> Result<Vec<MatrixObject>> {
    let mut out = Vec::with_capacity(pairs.len() * pairs.len());
    for &(i, j) in pairs {
        let e = element(s, i, j)?;
        for &(k, l) in pairs {
            out.push(placed(
                format!("{}[{},{}]@[{},{}]", s.name, i + 1, j + 1, k + 1, l + 1),
                s.r,
                e.clone(),
                k,
                l,
            ));
        }
    }
    Ok(out)
}

fn element(s: &MatrixObject, i: usize, j: usize) -> Result<Affine> {
    if i >= s.r || j >= s.r {
        return Err(Error::Dimension(format!(
            "pair ({i}, {j}) outside {}x{} object `{}`",
            s.r, s.r, s.name
        )));
    }
    s.entry(i, j).ok_or_else(|| Error::Primitive(s.name.clone()))
}

fn placed(name: String, r: usize, e: Affine, k: usize, l: usize) -> MatrixObject {
    let mut grid = vec![vec![Affine::zero(); r]; r];
    grid[k][l] = e.clone();
    grid[l][k] = e;
    MatrixObject::derived(name, grid, true)
}
