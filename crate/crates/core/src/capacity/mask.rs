//! Sets given as unions of boxes and balls, rasterized to grid node masks.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hessian::GridFunction;
use crate::rational::{from_json, to_f64};

const EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Box { lo, .. } => lo.len(),
            Shape::Ball { center, .. } => center.len(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Shape::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *v >= a - EPS && *v <= b + EPS),
            Shape::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 <= radius * radius + EPS
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Shape::Box { lo, hi } => json!({"box": lo.iter().zip(hi).map(|(a, b)| [a, b]).collect::<Vec<_>>()}),
            Shape::Ball { center, radius } => json!({"ball": {"center": center, "radius": radius}}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(sides) = v.get("box") {
            let sides = sides.as_array().ok_or_else(|| Error::Format("box must be a list of [lo, hi] pairs".into()))?;
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for s in sides {
                match s.as_array().map(|p| p.as_slice()) {
                    Some([a, b]) => {
                        lo.push(number(a)?);
                        hi.push(number(b)?);
                    }
                    _ => return Err(Error::Format(format!("bad box side {s}"))),
                }
            }
            if lo.iter().zip(&hi).any(|(a, b)| a > b) {
                return Err(Error::Format("box side with lo > hi".into()));
            }
            return Ok(Shape::Box { lo, hi });
        }
        if let Some(b) = v.get("ball") {
            let center = b
                .get("center")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Format("ball needs a center".into()))?
                .iter()
                .map(number)
                .collect::<Result<Vec<_>>>()?;
            let radius = number(b.get("radius").ok_or_else(|| Error::Format("ball needs a radius".into()))?)?;
            if radius < 0.0 {
                return Err(Error::Format("negative radius".into()));
            }
            return Ok(Shape::Ball { center, radius });
        }
        Err(Error::Format(format!("unknown shape {v}")))
    }
}

/// Plain JSON numbers, or rationals in any form `rational::from_json` accepts.
pub(crate) fn number(v: &Value) -> Result<f64> {
    match v.as_f64() {
        Some(x) if v.is_f64() => Ok(x),
        _ => from_json(v).map(|x| to_f64(&x)),
    }
}

/// A set as a union of shapes, or as explicit node indices of a particular grid.
#[derive(Clone, Debug, PartialEq)]
pub enum MaskSpec {
    Shapes(Vec<Shape>),
    Nodes(Vec<usize>),
}

impl MaskSpec {
    pub fn empty() -> Self {
        MaskSpec::Shapes(Vec::new())
    }

    pub fn is_geometric(&self) -> bool {
        matches!(self, MaskSpec::Shapes(_))
    }

    /// Point membership; only meaningful for geometric masks.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            MaskSpec::Shapes(s) => s.iter().any(|s| s.contains(x)),
            MaskSpec::Nodes(_) => false,
        }
    }

    pub fn rasterize(&self, grid: &GridFunction) -> Result<Vec<bool>> {
        let mut out = vec![false; grid.len()];
        match self {
            MaskSpec::Shapes(shapes) => {
                if let Some(s) = shapes.iter().find(|s| s.dim() != grid.n()) {
                    return Err(Error::DimensionMismatch { expected: grid.n(), found: s.dim() });
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o = self.contains(&grid.point(k));
                }
            }
            MaskSpec::Nodes(nodes) => {
                for &k in nodes {
                    *out.get_mut(k).ok_or_else(|| Error::Grid(format!("node {k} outside the grid")))? = true;
                }
            }
        }
        Ok(out)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (MaskSpec::Shapes(a), MaskSpec::Shapes(b)) => Ok(MaskSpec::Shapes(a.iter().chain(b).cloned().collect())),
            (MaskSpec::Nodes(a), MaskSpec::Nodes(b)) => {
                let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
                v.sort_unstable();
                v.dedup();
                Ok(MaskSpec::Nodes(v))
            }
            _ => Err(Error::Problem("cannot unite a shape mask with a node mask".into())),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            MaskSpec::Shapes(s) => Value::Array(s.iter().map(Shape::to_json).collect()),
            MaskSpec::Nodes(n) => json!({ "nodes": n }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Array(items) => Ok(MaskSpec::Shapes(items.iter().map(Shape::from_json).collect::<Result<_>>()?)),
            Value::Object(o) if o.contains_key("nodes") => {
                let nodes = o["nodes"]
                    .as_array()
                    .ok_or_else(|| Error::Format("nodes must be a list".into()))?
                    .iter()
                    .map(|x| x.as_u64().map(|k| k as usize).ok_or_else(|| Error::Format(format!("bad node index {x}"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(MaskSpec::Nodes(nodes))
            }
            Value::Object(_) => Ok(MaskSpec::Shapes(vec![Shape::from_json(v)?])),
            _ => Err(Error::Format(format!("bad mask {v}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn ball_rasterization_includes_boundary_nodes() {
        let g = GridFunction::sample_cube(2, q(-1), q(1), 5, |_| 0.0).unwrap();
        let m = MaskSpec::Shapes(vec![Shape::Ball { center: vec![0.0, 0.0], radius: 0.5 }]);
        let r = m.rasterize(&g).unwrap();
        assert_eq!(r.iter().filter(|&&b| b).count(), 5);
    }

    #[test]
    fn json_round_trip() {
        let v: Value = serde_json::from_str(r#"[{"box": [[-0.25, 0.25], ["1/8", 0.5]]}, {"ball": {"center": [0, 0], "radius": 0.5}}]"#).unwrap();
        let m = MaskSpec::from_json(&v).unwrap();
        assert_eq!(MaskSpec::from_json(&m.to_json()).unwrap(), m);
        match &m {
            MaskSpec::Shapes(s) => assert_eq!(s[0], Shape::Box { lo: vec![-0.25, 0.125], hi: vec![0.25, 0.5] }),
            _ => unreachable!(),
        }
    }
}
