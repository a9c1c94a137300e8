//! Tropical hypersurfaces: the corner locus of `f`, weighted by dual edge lengths.

use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use super::{check_balancing, TropicalPolynomial};
use crate::error::{Error, Result};
use crate::geometry::polyhedron::{Constraint, Polyhedron};
use crate::geometry::{PolyhedralCell, WeightedComplex};
use crate::rational::{dot, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct DualEdge {
    /// All terms attaining the maximum on the cell (lattice points of the dual edge).
    pub terms: Vec<usize>,
    /// Endpoints of the dual edge, as term indices.
    pub ends: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TropicalHypersurface {
    pub poly: TropicalPolynomial,
    pub complex: WeightedComplex,
    /// `duality[k]` is the dual edge of `complex.cells[k]`.
    pub duality: Vec<DualEdge>,
    /// Set when the Newton polytope is a point and the hypersurface is empty.
    pub empty: bool,
}

impl TropicalHypersurface {
    pub fn to_json(&self) -> Value {
        let mut v = self.complex.to_json();
        v["empty"] = json!(self.empty);
        v["duality"] = self
            .duality
            .iter()
            .map(|d| {
                json!({
                    "terms": d.terms,
                    "edge": [self.poly.terms()[d.ends.0].alpha, self.poly.terms()[d.ends.1].alpha],
                })
            })
            .collect();
        v
    }
}

fn tie_constraint(f: &TropicalPolynomial, i: usize, k: usize) -> Constraint {
    let (ti, tk) = (&f.terms()[i], &f.terms()[k]);
    let normal = tk.alpha.iter().zip(&ti.alpha).map(|(a, b)| Q::from_integer((a - b).into())).collect();
    Constraint::new(normal, &tk.upsilon - &ti.upsilon)
}

/// `{x : f_a(x) = f_b(x) = f(x)}` for terms `a`, `b`.
fn tie_region(f: &TropicalPolynomial, a: usize, b: usize) -> Polyhedron {
    let ineqs = (0..f.terms().len()).filter(|&k| k != a && k != b).map(|k| tie_constraint(f, a, k)).collect();
    Polyhedron::new(f.n(), vec![tie_constraint(f, a, b)], ineqs)
}

pub fn hypersurface(f: &TropicalPolynomial) -> Result<TropicalHypersurface> {
    let n = f.n();
    let m = f.terms().len();
    let mut cells = Vec::new();
    let mut duality: Vec<DualEdge> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let region = tie_region(f, i, j);
            let Some(info) = region.analyze() else { continue };
            if info.dim + 1 != n {
                continue;
            }
            let terms = f.active_terms(&info.relint);
            if duality.iter().any(|d| d.terms == terms) {
                continue;
            }
            let dir: Vec<Q> = tie_constraint(f, i, j).normal;
            let along = |k: usize| dot(&dir, &f.terms()[k].alpha_q());
            let a = *terms.iter().min_by_key(|&&k| along(k)).expect("at least two active terms");
            let b = *terms.iter().max_by_key(|&&k| along(k)).expect("at least two active terms");
            let mut eq = tie_constraint(f, a, b);
            let g = f.terms()[b].alpha.iter().zip(&f.terms()[a].alpha).fold(0i64, |g, (x, y)| g.gcd(&(x - y)));
            let gq = Q::from_integer(g.into());
            eq.normal.iter_mut().for_each(|x| *x /= &gq);
            eq.offset /= &gq;
            let cell = tie_region(f, a, b);
            let cell = Polyhedron::new(n, vec![eq], cell.inequalities).irredundant();
            cells.push(PolyhedralCell { dim: n - 1, weight: g as u64, poly: cell });
            duality.push(DualEdge { terms, ends: (a, b) });
        }
    }
    let complex = WeightedComplex { n, codim: 1, cells };
    let report = check_balancing(&complex);
    if !report.balanced {
        return Err(Error::Unbalanced(format!("{} unbalanced ridges", report.violations.len())));
    }
    let empty = complex.cells.is_empty() && f.terms().len() == 1;
    debug_assert!(complex.cells.iter().all(|c| !c.poly.equalities[0].normal.iter().all(Zero::is_zero)));
    Ok(TropicalHypersurface { poly: f.clone(), complex, duality, empty })
}
