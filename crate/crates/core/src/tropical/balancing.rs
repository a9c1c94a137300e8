//! The balancing condition for weighted rational polyhedral complexes.

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::geometry::polyhedron::{primitive_normal, CellInfo, Polyhedron};
use crate::geometry::WeightedComplex;
use crate::rational::{dot, vec_to_json, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct BalancingViolation {
    /// Relative-interior point of the offending codimension-one face.
    pub point: Vec<Q>,
    /// Weighted sum of primitive normals, which should lie in the face's span.
    pub sum: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalancingReport {
    pub balanced: bool,
    pub faces_checked: usize,
    pub violations: Vec<BalancingViolation>,
}

impl BalancingReport {
    pub fn to_json(&self) -> Value {
        json!({
            "balanced": self.balanced,
            "faces_checked": self.faces_checked,
            "violations": self.violations.iter().map(|v| json!({
                "point": vec_to_json(&v.point),
                "sum": v.sum.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

struct Ridge {
    face: Polyhedron,
    info: CellInfo,
    sum: Vec<BigInt>,
}

pub fn check_balancing(cx: &WeightedComplex) -> BalancingReport {
    let n = cx.n;
    let mut ridges: Vec<Ridge> = Vec::new();
    for cell in &cx.cells {
        if cell.dim == 0 {
            continue;
        }
        let Some(cinfo) = cell.poly.analyze() else { continue };
        let sigma_eqs = cell.poly.equality_normals(&cinfo);
        for (face, finfo) in cell.poly.facets() {
            let tau_eqs = face.equality_normals(&finfo);
            let dir: Vec<Q> = cinfo.relint.iter().zip(&finfo.relint).map(|(a, b)| a - b).collect();
            let u = primitive_normal(&sigma_eqs, &tau_eqs, &dir, n).expect("facet of a rational cell has a primitive normal");
            let pos = ridges.iter().position(|r| r.face.contains(&finfo.relint) && face.contains(&r.info.relint));
            let idx = match pos {
                Some(i) => i,
                None => {
                    ridges.push(Ridge { face, info: finfo, sum: vec![BigInt::zero(); n] });
                    ridges.len() - 1
                }
            };
            for (s, x) in ridges[idx].sum.iter_mut().zip(&u) {
                *s += x * BigInt::from(cell.weight);
            }
        }
    }
    let mut violations = Vec::new();
    for r in &ridges {
        let sum_q: Vec<Q> = r.sum.iter().map(|x| Q::from_integer(x.clone())).collect();
        let inside = r.face.equality_normals(&r.info).iter().all(|a| dot(a, &sum_q).is_zero());
        if !inside {
            violations.push(BalancingViolation { point: r.info.relint.clone(), sum: r.sum.clone() });
        }
    }
    BalancingReport { balanced: violations.is_empty(), faces_checked: ridges.len(), violations }
}
