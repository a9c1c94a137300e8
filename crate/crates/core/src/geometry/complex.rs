//! Polyhedral cells and weighted polyhedral complexes.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::polyhedron::{Constraint, Polyhedron};
use crate::geometry::Measure;
use crate::rational::{to_f64, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralCell {
    pub dim: usize,
    pub weight: u64,
    pub poly: Polyhedron,
}

impl PolyhedralCell {
    /// Builds a cell, computing its dimension. `None` if the polyhedron is empty.
    pub fn new(poly: Polyhedron, weight: u64) -> Option<Self> {
        let info = poly.analyze()?;
        Some(Self { dim: info.dim, weight, poly })
    }

    pub fn hausdorff(&self, d: usize) -> Measure {
        self.poly.hausdorff(d)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "weight": self.weight,
            "equalities": serde_json::to_value(&self.poly.equalities).expect("serializable"),
            "inequalities": serde_json::to_value(&self.poly.inequalities).expect("serializable"),
        })
    }

    pub fn from_json(n: usize, v: &Value) -> Result<Self> {
        let list = |key: &str| -> Result<Vec<Constraint>> {
            match v.get(key) {
                None => Ok(Vec::new()),
                Some(x) => serde_json::from_value(x.clone()).map_err(|e| Error::Format(format!("{key}: {e}"))),
            }
        };
        let poly = Polyhedron::new(n, list("equalities")?, list("inequalities")?);
        if let Some(c) = poly.equalities.iter().chain(&poly.inequalities).find(|c| c.normal.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: c.normal.len() });
        }
        let weight = v.get("weight").and_then(Value::as_u64).unwrap_or(1);
        let cell = PolyhedralCell::new(poly, weight).ok_or(Error::Empty("cell"))?;
        if let Some(d) = v.get("dim").and_then(Value::as_u64) {
            if d as usize != cell.dim {
                return Err(Error::Format(format!("cell declares dimension {d} but has dimension {}", cell.dim)));
            }
        }
        Ok(cell)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComplex {
    pub n: usize,
    pub codim: usize,
    /// Top-dimensional cells (dimension `n - codim`).
    pub cells: Vec<PolyhedralCell>,
}

/// Sum of cell measures, optionally weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    Unweighted,
    Weighted,
}

impl WeightedComplex {
    pub fn empty(n: usize, codim: usize) -> Self {
        Self { n, codim, cells: Vec::new() }
    }

    pub fn top_dim(&self) -> usize {
        self.n - self.codim
    }

    pub fn total_weight(&self) -> u64 {
        self.cells.iter().map(|c| c.weight).sum()
    }

    pub fn hausdorff(&self, d: usize, weighting: Weighting) -> Result<Measure> {
        if d > self.n {
            return Err(Error::OutOfRange(format!("measure dimension {d} exceeds ambient dimension {}", self.n)));
        }
        let mut value = 0.0;
        let mut exact = Some(Q::zero());
        for c in &self.cells {
            let w = match weighting {
                Weighting::Unweighted => 1,
                Weighting::Weighted => c.weight,
            };
            match c.hausdorff(d) {
                Measure::Divergent => return Ok(Measure::Divergent),
                Measure::Finite { value: v, exact: e } => {
                    value += w as f64 * v;
                    exact = match (exact, e) {
                        (Some(a), Some(b)) => Some(a + b * Q::from_integer(w.into())),
                        _ => None,
                    };
                }
            }
        }
        if let Some(x) = &exact {
            value = to_f64(x);
        }
        Ok(Measure::Finite { value, exact })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "version": 1,
            "n": self.n,
            "codim": self.codim,
            "cells": self.cells.iter().map(PolyhedralCell::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Format("complex needs \"n\"".into()))? as usize;
        let cells: Vec<PolyhedralCell> = v
            .get("cells")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("complex needs a \"cells\" array".into()))?
            .iter()
            .map(|c| PolyhedralCell::from_json(n, c))
            .collect::<Result<_>>()?;
        let codim = match v.get("codim").and_then(Value::as_u64) {
            Some(p) => p as usize,
            None => cells.first().map_or(0, |c| n - c.dim),
        };
        if let Some(c) = cells.iter().find(|c| c.dim + codim != n) {
            return Err(Error::Format(format!("cell of dimension {} in a complex of codimension {codim}", c.dim)));
        }
        Ok(Self { n, codim, cells })
    }
}
