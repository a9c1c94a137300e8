//! Affine subspaces with rational direction vectors.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, rank};
use crate::rational::{to_f64, vec_from_json, vec_to_json, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubspace {
    pub n: usize,
    /// Linearly independent direction vectors.
    pub basis: Vec<Vec<Q>>,
    pub offset: Vec<Q>,
}

fn gram_schmidt(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for u in &out {
            let d: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        out.push(w.iter().map(|a| a / norm).collect());
    }
    out
}

impl AffineSubspace {
    pub fn new(basis: Vec<Vec<Q>>, offset: Vec<Q>) -> Result<Self> {
        let n = offset.len();
        if let Some(b) = basis.iter().find(|b| b.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        if rank(&basis) != basis.len() {
            return Err(Error::Subspace("direction vectors are linearly dependent".into()));
        }
        Ok(Self { n, basis, offset })
    }

    /// The hyperplane `x_axis = value`.
    pub fn coordinate_hyperplane(n: usize, axis: usize, value: Q) -> Self {
        let basis = (0..n)
            .filter(|&k| k != axis)
            .map(|k| (0..n).map(|j| Q::from_integer(((j == k) as i64).into())).collect())
            .collect();
        let mut offset = vec![Q::from_integer(0.into()); n];
        offset[axis] = value;
        Self { n, basis, offset }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.n - self.dim()
    }

    pub fn offset_f64(&self) -> Vec<f64> {
        self.offset.iter().map(to_f64).collect()
    }

    /// Orthonormal basis of the direction space.
    pub fn orthonormal_basis(&self) -> Vec<Vec<f64>> {
        gram_schmidt(&self.basis.iter().map(|b| b.iter().map(to_f64).collect()).collect::<Vec<_>>())
    }

    /// Orthonormal basis of the normal space.
    pub fn orthonormal_normals(&self) -> Vec<Vec<f64>> {
        let ns = nullspace(&self.basis, self.n);
        gram_schmidt(&ns.iter().map(|b| b.iter().map(to_f64).collect()).collect::<Vec<_>>())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "basis": self.basis.iter().map(|b| vec_to_json(b)).collect::<Vec<_>>(),
            "offset": vec_to_json(&self.offset),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let basis = v
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("subspace needs a \"basis\" array".into()))?
            .iter()
            .map(vec_from_json)
            .collect::<Result<Vec<_>>>()?;
        let offset = vec_from_json(v.get("offset").ok_or_else(|| Error::Format("subspace needs an \"offset\"".into()))?)?;
        Self::new(basis, offset)
    }
}
