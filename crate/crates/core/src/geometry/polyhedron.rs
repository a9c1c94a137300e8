//! Polyhedra in H-representation: `a·x = b` equalities and `a·x ≤ b` inequalities.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::geometry::hull::ConvexHull;
use crate::geometry::Measure;
use crate::linalg::{integer_kernel, rank, solve, subsets};
use crate::lp::{maximize, LpResult, Row, Scalar};
use crate::rational::{dot, primitive, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(with = "crate::rational::serde_qvec")]
    pub normal: Vec<Q>,
    #[serde(with = "crate::rational::serde_q")]
    pub offset: Q,
}

impl Constraint {
    pub fn new(normal: Vec<Q>, offset: Q) -> Self {
        Self { normal, offset }
    }

    pub fn slack(&self, x: &[Q]) -> Q {
        &self.offset - dot(&self.normal, x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron {
    pub n: usize,
    pub equalities: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
}

/// Result of [`Polyhedron::analyze`].
#[derive(Clone, Debug)]
pub struct CellInfo<R = Q> {
    pub dim: usize,
    /// A point in the relative interior.
    pub relint: Vec<R>,
    /// Inequalities that hold with equality on the whole set.
    pub implicit: Vec<bool>,
}

/// Dimension, relative-interior point and implicit equalities of
/// `{x : eqs, ineqs}` with right-hand sides in any LP scalar.
pub fn analyze_rows<R: Scalar>(n: usize, eqs: &[Row<R>], ineqs: &[Row<R>]) -> Option<CellInfo<R>> {
    let one = R::from_q(Q::one());
    let mut objective = vec![Q::zero(); n + 1];
    objective[n] = Q::one();
    let lift = |r: &Row<R>, t: Q| {
        let mut c = r.coeffs.clone();
        c.push(t);
        Row::new(c, r.rhs.clone())
    };
    let eqs_t: Vec<Row<R>> = eqs.iter().map(|r| lift(r, Q::zero())).collect();
    let mut cap = vec![Q::zero(); n + 1];
    cap[n] = Q::one();
    let strict = |target: Option<usize>| {
        let mut rows: Vec<Row<R>> = ineqs
            .iter()
            .enumerate()
            .map(|(i, r)| lift(r, if target.map_or(true, |t| t == i) { Q::one() } else { Q::zero() }))
            .collect();
        rows.push(Row::new(cap.clone(), one.clone()));
        maximize(n + 1, &objective, &rows, &eqs_t)
    };
    let eq_rank_with = |implicit: &[bool]| {
        let mut normals: Vec<Vec<Q>> = eqs.iter().map(|r| r.coeffs.clone()).collect();
        normals.extend(ineqs.iter().zip(implicit).filter(|(_, &b)| b).map(|(r, _)| r.coeffs.clone()));
        rank(&normals)
    };
    let (value, point) = match strict(None) {
        LpResult::Infeasible => return None,
        LpResult::Unbounded => unreachable!("t is capped"),
        LpResult::Optimal { value, point } => (value, point),
    };
    if value.sign() == std::cmp::Ordering::Less {
        return None;
    }
    if value.sign() == std::cmp::Ordering::Greater || ineqs.is_empty() {
        let implicit = vec![false; ineqs.len()];
        let dim = n - eq_rank_with(&implicit);
        return Some(CellInfo { dim, relint: point[..n].to_vec(), implicit });
    }
    let mut implicit = vec![false; ineqs.len()];
    let mut sum: Option<Vec<R>> = None;
    let mut count = 0i64;
    for i in 0..ineqs.len() {
        match strict(Some(i)) {
            LpResult::Optimal { value, point } if value.sign() == std::cmp::Ordering::Greater => {
                count += 1;
                sum = Some(match sum {
                    None => point[..n].to_vec(),
                    Some(s) => s.iter().zip(&point[..n]).map(|(a, b)| a.add(b)).collect(),
                });
            }
            _ => implicit[i] = true,
        }
    }
    let relint = match sum {
        Some(s) => {
            let inv = Q::one() / Q::from_integer(BigInt::from(count));
            s.iter().map(|x| x.scale(&inv)).collect()
        }
        None => point[..n].to_vec(),
    };
    let dim = n - eq_rank_with(&implicit);
    Some(CellInfo { dim, relint, implicit })
}

impl Polyhedron {
    pub fn new(n: usize, equalities: Vec<Constraint>, inequalities: Vec<Constraint>) -> Self {
        Self { n, equalities, inequalities }
    }

    pub fn whole_space(n: usize) -> Self {
        Self::new(n, Vec::new(), Vec::new())
    }

    pub fn rows(cs: &[Constraint]) -> Vec<Row<Q>> {
        cs.iter().map(|c| Row::new(c.normal.clone(), c.offset.clone())).collect()
    }

    pub fn analyze(&self) -> Option<CellInfo> {
        analyze_rows(self.n, &Self::rows(&self.equalities), &Self::rows(&self.inequalities))
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.equalities.iter().all(|c| c.slack(x).is_zero()) && self.inequalities.iter().all(|c| !c.slack(x).is_negative())
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        let mut p = self.clone();
        p.equalities.extend(other.equalities.iter().cloned());
        p.inequalities.extend(other.inequalities.iter().cloned());
        p
    }

    /// Translate by `v`.
    pub fn translate(&self, v: &[Q]) -> Polyhedron {
        let shift = |c: &Constraint| Constraint::new(c.normal.clone(), &c.offset + dot(&c.normal, v));
        Polyhedron::new(
            self.n,
            self.equalities.iter().map(shift).collect(),
            self.inequalities.iter().map(shift).collect(),
        )
    }

    /// Normals of the equalities, implicit ones included.
    pub fn equality_normals(&self, info: &CellInfo) -> Vec<Vec<Q>> {
        let mut normals: Vec<Vec<Q>> = self.equalities.iter().map(|c| c.normal.clone()).collect();
        normals.extend(
            self.inequalities.iter().zip(&info.implicit).filter(|(_, &b)| b).map(|(c, _)| c.normal.clone()),
        );
        normals
    }

    /// Facets (faces of codimension one in the cell), each with a relative-interior point.
    pub fn facets(&self) -> Vec<(Polyhedron, CellInfo)> {
        let Some(info) = self.analyze() else { return Vec::new() };
        if info.dim == 0 {
            return Vec::new();
        }
        let mut out: Vec<(Polyhedron, CellInfo)> = Vec::new();
        for (i, c) in self.inequalities.iter().enumerate() {
            if info.implicit[i] {
                continue;
            }
            let mut face = self.clone();
            face.inequalities.remove(i);
            face.equalities.push(c.clone());
            let Some(fi) = face.analyze() else { continue };
            if fi.dim + 1 != info.dim {
                continue;
            }
            if out.iter().any(|(g, gi)| g.contains(&fi.relint) && face.contains(&gi.relint)) {
                continue;
            }
            out.push((face, fi));
        }
        out
    }

    /// Drops inequalities implied by the remaining constraints.
    pub fn irredundant(&self) -> Polyhedron {
        let mut p = self.clone();
        let eqs = Self::rows(&p.equalities);
        let mut i = 0;
        while i < p.inequalities.len() {
            let c = p.inequalities[i].clone();
            let others: Vec<Row<Q>> =
                Self::rows(&p.inequalities).into_iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r).collect();
            let implied = match maximize(self.n, &c.normal, &others, &eqs) {
                LpResult::Optimal { value, .. } => value <= c.offset,
                LpResult::Infeasible => true,
                LpResult::Unbounded => false,
            };
            if implied {
                p.inequalities.remove(i);
            } else {
                i += 1;
            }
        }
        p
    }

    pub fn is_bounded(&self) -> bool {
        let eqs = Self::rows(&self.equalities);
        let ineqs = Self::rows(&self.inequalities);
        (0..self.n).all(|k| {
            [Q::one(), -Q::one()].iter().all(|s| {
                let mut obj = vec![Q::zero(); self.n];
                obj[k] = s.clone();
                !matches!(maximize(self.n, &obj, &ineqs, &eqs), LpResult::Unbounded)
            })
        })
    }

    /// Vertices of a bounded polyhedron by brute-force basis enumeration.
    pub fn vertices(&self) -> Vec<Vec<Q>> {
        let eq_rows: Vec<Vec<Q>> = self.equalities.iter().map(|c| c.normal.clone()).collect();
        let eq_rank = rank(&eq_rows);
        let need = self.n - eq_rank;
        let mut out: Vec<Vec<Q>> = Vec::new();
        for pick in subsets(self.inequalities.len(), need) {
            let mut a = eq_rows.clone();
            let mut b: Vec<Q> = self.equalities.iter().map(|c| c.offset.clone()).collect();
            for &i in &pick {
                a.push(self.inequalities[i].normal.clone());
                b.push(self.inequalities[i].offset.clone());
            }
            if rank(&a) != self.n {
                continue;
            }
            if let Some(x) = solve(&a, &b) {
                if self.contains(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out.sort();
        out
    }

    /// d-dimensional Lebesgue measure of the set (`Divergent` for unbounded or too-large sets).
    pub fn hausdorff(&self, d: usize) -> Measure {
        let Some(info) = self.analyze() else { return Measure::zero() };
        if info.dim > d {
            return Measure::Divergent;
        }
        if info.dim < d {
            return Measure::zero();
        }
        if !self.is_bounded() {
            return Measure::Divergent;
        }
        let verts = self.vertices();
        if verts.is_empty() {
            return Measure::zero();
        }
        let (value, exact) = ConvexHull::new(&verts).intrinsic_measure();
        Measure::Finite { value, exact }
    }
}

/// Lattice `lin(cell) ∩ Z^n`, given the equality normals of the cell.
pub fn cell_lattice(eq_normals: &[Vec<Q>], n: usize) -> Vec<Vec<BigInt>> {
    integer_kernel(eq_normals, n)
}

/// Primitive lattice vector of `lin(sigma)` pointing from the facet `tau` into `sigma`,
/// well defined modulo `lin(tau)`.
pub fn primitive_normal(
    sigma_eqs: &[Vec<Q>],
    tau_eqs: &[Vec<Q>],
    direction: &[Q],
    n: usize,
) -> Option<Vec<BigInt>> {
    let basis = cell_lattice(sigma_eqs, n);
    let k = basis.len();
    if k == 0 {
        return None;
    }
    // coordinates of lin(tau) in the lattice basis of lin(sigma)
    let bq: Vec<Vec<Q>> = basis.iter().map(|v| v.iter().map(|x| Q::from_integer(x.clone())).collect()).collect();
    let coords = |v: &[Q]| -> Option<Vec<Q>> {
        // solve sum_j c_j basis_j = v
        let a: Vec<Vec<Q>> = (0..n).map(|i| (0..k).map(|j| bq[j][i].clone()).collect()).collect();
        solve(&a, v)
    };
    let tau_dirs = crate::linalg::nullspace(tau_eqs, n);
    let tau_coords: Vec<Vec<Q>> = tau_dirs.iter().filter_map(|v| coords(v)).collect();
    let funcs = crate::linalg::nullspace(&tau_coords, k);
    if funcs.len() != 1 {
        return None;
    }
    let mut g = primitive(&funcs[0]);
    let dc = coords(direction)?;
    let along: Q = g.iter().zip(&dc).map(|(a, b)| Q::from_integer(a.clone()) * b).sum();
    if along.is_negative() {
        g.iter_mut().for_each(|x| *x = -&*x);
    }
    // integer e with g·e = 1 (extended Euclid over the entries)
    let e = unit_preimage(&g)?;
    let mut u = vec![BigInt::zero(); n];
    for (j, ej) in e.iter().enumerate() {
        for i in 0..n {
            u[i] += ej * &basis[j][i];
        }
    }
    Some(u)
}

fn unit_preimage(g: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut acc = BigInt::zero();
    let mut e = vec![BigInt::zero(); g.len()];
    for (i, gi) in g.iter().enumerate() {
        if gi.is_zero() {
            continue;
        }
        if acc.is_zero() {
            acc = gi.clone();
            e[i] = BigInt::one();
            continue;
        }
        let ext = acc.extended_gcd(gi);
        for x in e.iter_mut().take(i) {
            *x *= &ext.x;
        }
        e[i] = ext.y.clone();
        acc = ext.gcd;
    }
    if acc == BigInt::one() {
        Some(e)
    } else if acc == -BigInt::one() {
        Some(e.into_iter().map(|x| -x).collect())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};

    fn c(a: &[i64], b: i64) -> Constraint {
        Constraint::new(qvec(a), q(b))
    }

    #[test]
    fn analyze_detects_implicit_equalities() {
        // x ≥ 0, x ≤ 0, y ≤ 1, y ≥ -1  → a segment
        let p = Polyhedron::new(2, vec![], vec![c(&[-1, 0], 0), c(&[1, 0], 0), c(&[0, 1], 1), c(&[0, -1], 1)]);
        let info = p.analyze().unwrap();
        assert_eq!(info.dim, 1);
        assert_eq!(info.implicit, vec![true, true, false, false]);
        assert!(p.contains(&info.relint));
        assert_eq!(p.facets().len(), 2);
        assert!(p.is_bounded());
        assert_eq!(p.hausdorff(1), Measure::exact(q(2)));
        assert_eq!(p.hausdorff(0), Measure::Divergent);
    }

    #[test]
    fn unbounded_ray() {
        let p = Polyhedron::new(2, vec![c(&[0, 1], 0)], vec![c(&[-1, 0], 0)]);
        assert_eq!(p.analyze().unwrap().dim, 1);
        assert!(!p.is_bounded());
        assert_eq!(p.hausdorff(1), Measure::Divergent);
        assert_eq!(p.hausdorff(2), Measure::zero());
        let empty = Polyhedron::new(1, vec![], vec![c(&[1], -1), c(&[-1], -1)]);
        assert!(empty.analyze().is_none());
    }

    #[test]
    fn primitive_normals() {
        // sigma = half-plane y ≥ 0 in R^2, tau = x-axis: normal (0,1) mod (1,0)
        let u = primitive_normal(&[], &[qvec(&[0, 1])], &qvec(&[3, 2]), 2).unwrap();
        assert_eq!(u[1], BigInt::one());
        // sigma = line x = y in R^2 (ray direction (1,1)), tau = origin
        let u = primitive_normal(&[qvec(&[1, -1])], &[qvec(&[1, 0]), qvec(&[0, 1])], &qvec(&[2, 2]), 2).unwrap();
        assert_eq!(u, vec![BigInt::one(), BigInt::one()]);
        assert_eq!(unit_preimage(&[BigInt::from(6), BigInt::from(10), BigInt::from(15)]).map(|e| {
            e[0].clone() * 6 + e[1].clone() * 10 + e[2].clone() * 15
        }), Some(BigInt::one()));
    }
}
