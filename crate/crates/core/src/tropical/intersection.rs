//! Stable intersection of tropical hypersurfaces as the limit of generic translates.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{check_balancing, fnv1a, TropicalHypersurface};
use crate::error::{Error, Result};
use crate::geometry::polyhedron::{analyze_rows, Constraint, Polyhedron};
use crate::geometry::{PolyhedralCell, WeightedComplex};
use crate::linalg::{gcd_of_maximal_minors, rank};
use crate::lp::{feasible_point, Eps, Row};
use crate::rational::{dot, primitive, vec_to_json, Q};

const MAX_ATTEMPTS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct TropicalCycle {
    pub complex: WeightedComplex,
    /// Displacement applied to each factor (the first is always zero).
    pub displacement: Vec<Vec<Q>>,
    /// Number of displacements tried, including the successful one.
    pub attempts: usize,
}

impl TropicalCycle {
    pub fn to_json(&self) -> Value {
        let mut v = self.complex.to_json();
        v["displacement"] = json!(self.displacement.iter().map(|d| vec_to_json(d)).collect::<Vec<_>>());
        v["attempts"] = json!(self.attempts);
        v
    }
}

pub fn stable_intersection(hs: &[TropicalHypersurface]) -> Result<TropicalCycle> {
    let text: String = hs.iter().map(|h| h.poly.to_json().to_string()).collect::<Vec<_>>().join(";");
    stable_intersection_seeded(hs, fnv1a(text.as_bytes()))
}

pub fn stable_intersection_seeded(hs: &[TropicalHypersurface], seed: u64) -> Result<TropicalCycle> {
    let first = hs.first().ok_or(Error::Empty("hypersurface list"))?;
    let n = first.complex.n;
    if let Some(h) = hs.iter().find(|h| h.complex.n != n) {
        return Err(Error::DimensionMismatch { expected: n, found: h.complex.n });
    }
    let p = hs.len();
    if p > n {
        return Err(Error::OutOfRange(format!("cannot intersect {p} hypersurfaces in dimension {n}")));
    }
    if p == 1 {
        return Ok(TropicalCycle { complex: first.complex.clone(), displacement: vec![vec![Q::zero(); n]], attempts: 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let mut displacement = vec![vec![Q::zero(); n]];
        for _ in 1..p {
            displacement.push((0..n).map(|_| Q::new(rng.gen_range(-997i64..=997).into(), rng.gen_range(1i64..=89).into())).collect());
        }
        if let Some(complex) = displaced_limit(hs, &displacement) {
            let report = check_balancing(&complex);
            if !report.balanced {
                return Err(Error::Unbalanced(format!("{} unbalanced ridges in the stable intersection", report.violations.len())));
            }
            return Ok(TropicalCycle { complex, displacement, attempts: attempt });
        }
    }
    Err(Error::NonGeneric(MAX_ATTEMPTS))
}

fn eps_rows(cs: &[Constraint], v: &[Q]) -> Vec<Row<Eps>> {
    cs.iter().map(|c| Row::new(c.normal.clone(), Eps::new(c.offset.clone(), dot(&c.normal, v)))).collect()
}

/// Limit cycle for one displacement, or `None` if the displacement is not generic.
fn displaced_limit(hs: &[TropicalHypersurface], disp: &[Vec<Q>]) -> Option<WeightedComplex> {
    let n = hs[0].complex.n;
    let p = hs.len();
    let mut out = WeightedComplex::empty(n, p);
    let mut centers: Vec<Vec<Q>> = Vec::new();
    if hs.iter().any(|h| h.complex.cells.is_empty()) {
        return Some(out);
    }
    let mut idx = vec![0usize; p];
    'tuples: loop {
        let cells: Vec<&PolyhedralCell> = idx.iter().zip(hs).map(|(&k, h)| &h.complex.cells[k]).collect();
        let meet = cells.iter().skip(1).fold(cells[0].poly.clone(), |acc, c| acc.intersect(&c.poly));
        if let Some(info0) = meet.analyze() {
            let normals: Vec<Vec<Q>> = cells.iter().map(|c| c.poly.equalities[0].normal.clone()).collect();
            let mut eqs = Vec::new();
            let mut ineqs = Vec::new();
            for (c, v) in cells.iter().zip(disp) {
                eqs.extend(eps_rows(&c.poly.equalities, v));
                ineqs.extend(eps_rows(&c.poly.inequalities, v));
            }
            if rank(&normals) < p {
                if feasible_point(n, &ineqs, &eqs).is_some() {
                    return None;
                }
            } else if let Some(info) = analyze_rows(n, &eqs, &ineqs) {
                if info.dim + p != n {
                    return None;
                }
                if info0.dim + p == n {
                    let ints: Vec<Vec<BigInt>> = normals.iter().map(|a| primitive(a)).collect();
                    let mut mult = gcd_of_maximal_minors(&ints);
                    for c in &cells {
                        mult *= BigInt::from(c.weight);
                    }
                    let weight: u64 = mult.abs().try_into().expect("multiplicity fits in u64");
                    let pos = out
                        .cells
                        .iter()
                        .zip(&centers)
                        .position(|(c, r)| c.poly.contains(&info0.relint) && meet.contains(r));
                    match pos {
                        Some(k) => out.cells[k].weight += weight,
                        None => {
                            let poly = if info0.dim == 0 { point_cell(&info0.relint) } else { meet.irredundant() };
                            out.cells.push(PolyhedralCell { dim: info0.dim, weight, poly });
                            centers.push(info0.relint.clone());
                        }
                    }
                }
            }
        }
        for k in (0..p).rev() {
            idx[k] += 1;
            if idx[k] < hs[k].complex.cells.len() {
                continue 'tuples;
            }
            idx[k] = 0;
        }
        break;
    }
    Some(out)
}

fn point_cell(x: &[Q]) -> Polyhedron {
    let n = x.len();
    let eqs = (0..n)
        .map(|k| {
            let mut e = vec![Q::zero(); n];
            e[k] = Q::one();
            Constraint::new(e, x[k].clone())
        })
        .collect();
    Polyhedron::new(n, eqs, Vec::new())
}

/// Total multiplicity of a zero-dimensional cycle.
pub fn intersection_mass(c: &TropicalCycle) -> Result<Q> {
    if c.complex.codim < c.complex.n {
        return Err(Error::OutOfRange(format!(
            "mass needs a cycle of codimension {}, got {}",
            c.complex.n, c.complex.codim
        )));
    }
    Ok(Q::from_integer(c.complex.total_weight().into()))
}

/// Equality of weighted complexes whose cells are compared as sets.
pub fn same_cycle(a: &WeightedComplex, b: &WeightedComplex) -> bool {
    if a.n != b.n || a.codim != b.codim || a.cells.len() != b.cells.len() {
        return false;
    }
    let relint = |c: &PolyhedralCell| c.poly.analyze().map(|i| i.relint);
    a.cells.iter().all(|ca| {
        let Some(ra) = relint(ca) else { return false };
        b.cells.iter().any(|cb| {
            cb.weight == ca.weight
                && cb.dim == ca.dim
                && cb.poly.contains(&ra)
                && relint(cb).is_some_and(|rb| ca.poly.contains(&rb))
        })
    })
}
