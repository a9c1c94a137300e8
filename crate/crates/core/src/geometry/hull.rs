//! Exact convex hulls in any dimension by beneath–beyond insertion.
//!
//! Points are first projected onto coordinates that parametrize their affine
//! hull, so the incremental construction always runs full-dimensionally.
//! Points coplanar with a facet are treated as not visible; the boundary
//! triangulation may then contain coplanar simplices, which are merged when
//! facets are extracted.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::linalg::{det, nullspace, rank, rref};
use crate::rational::{dot, exact_sqrt, primitive, to_f64, Q};

/// Affine hull of a point set, parametrized by a subset of coordinates.
#[derive(Clone, Debug)]
pub struct AffineFrame {
    pub n: usize,
    pub origin: Vec<Q>,
    /// Coordinates that parametrize the affine hull injectively.
    pub pivots: Vec<usize>,
    /// Row `k` is the direction moved when pivot coordinate `k` increases by one.
    pub directions: Vec<Vec<Q>>,
}

impl AffineFrame {
    pub fn of(points: &[Vec<Q>]) -> Self {
        let n = points[0].len();
        let origin = points[0].clone();
        let mut diffs: Vec<Vec<Q>> =
            points.iter().skip(1).map(|p| p.iter().zip(&origin).map(|(a, b)| a - b).collect()).collect();
        let pivots = rref(&mut diffs);
        AffineFrame { n, origin, pivots, directions: diffs }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn project(&self, x: &[Q]) -> Vec<Q> {
        self.pivots.iter().map(|&j| x[j].clone()).collect()
    }

    pub fn lift(&self, y: &[Q]) -> Vec<Q> {
        let mut x = self.origin.clone();
        for (k, dir) in self.directions.iter().enumerate() {
            let t = &y[k] - &self.origin[self.pivots[k]];
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi += &t * di;
            }
        }
        x
    }

    /// Normals `a` with `a · x = a · origin` cutting out the affine hull.
    pub fn equations(&self) -> Vec<(Vec<Q>, Q)> {
        nullspace(&self.directions, self.n)
            .into_iter()
            .map(|a| {
                let b = dot(&a, &self.origin);
                (a, b)
            })
            .collect()
    }

    /// Gram determinant of the parametrization; d-volumes scale by its square root.
    pub fn gram(&self) -> Q {
        let g: Vec<Vec<Q>> = self
            .directions
            .iter()
            .map(|u| self.directions.iter().map(|v| dot(u, v)).collect())
            .collect();
        det(&g)
    }
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Outward normal in projected coordinates.
    pub normal: Vec<Q>,
    pub offset: Q,
    /// Indices (into `ConvexHull::points`) of all points on the facet.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Face {
    pub dim: usize,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ConvexHull {
    /// Input points with duplicates removed, in first-occurrence order.
    pub points: Vec<Vec<Q>>,
    /// For each entry of `points`, its index in the caller's input.
    pub source: Vec<usize>,
    pub frame: AffineFrame,
    pub projected: Vec<Vec<Q>>,
    /// Simplicial triangulation of the boundary (projected coordinates).
    pub boundary: Vec<Vec<usize>>,
    pub facets: Vec<Facet>,
    /// Extreme points, as indices into `points`, sorted lexicographically by coordinates.
    pub vertices: Vec<usize>,
}

struct Simplex {
    verts: Vec<usize>,
    normal: Vec<Q>,
    offset: Q,
}

fn plane_through(pts: &[&Vec<Q>], interior: &[Q]) -> (Vec<Q>, Q) {
    let d = pts[0].len();
    let rows: Vec<Vec<Q>> = pts[1..].iter().map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect()).collect();
    let mut ns = nullspace(&rows, d);
    debug_assert_eq!(ns.len(), 1, "degenerate facet simplex");
    let mut a = ns.pop().unwrap();
    let mut b = dot(&a, pts[0]);
    if dot(&a, interior) > b {
        a.iter_mut().for_each(|x| *x = -&*x);
        b = -b;
    }
    (a, b)
}

impl ConvexHull {
    pub fn new(input: &[Vec<Q>]) -> Self {
        assert!(!input.is_empty(), "hull of an empty set");
        let mut seen = HashMap::new();
        let mut points = Vec::new();
        let mut source = Vec::new();
        for (i, p) in input.iter().enumerate() {
            if seen.insert(p.clone(), ()).is_none() {
                points.push(p.clone());
                source.push(i);
            }
        }
        let frame = AffineFrame::of(&points);
        let projected: Vec<Vec<Q>> = points.iter().map(|p| frame.project(p)).collect();
        let d = frame.dim();
        let (boundary, facets) = match d {
            0 => (vec![vec![0]], Vec::new()),
            1 => Self::segment(&projected),
            _ => Self::beneath_beyond(&projected, d),
        };
        let mut vertices: Vec<usize> = if d == 0 {
            vec![0]
        } else {
            (0..points.len())
                .filter(|&i| {
                    let normals: Vec<Vec<Q>> =
                        facets.iter().filter(|f| f.members.contains(&i)).map(|f| f.normal.clone()).collect();
                    rank(&normals) == d
                })
                .collect()
        };
        vertices.sort_by(|&a, &b| points[a].cmp(&points[b]));
        ConvexHull { points, source, frame, projected, boundary, facets, vertices }
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    fn segment(proj: &[Vec<Q>]) -> (Vec<Vec<usize>>, Vec<Facet>) {
        let lo = (0..proj.len()).min_by(|&a, &b| proj[a][0].cmp(&proj[b][0])).unwrap();
        let hi = (0..proj.len()).max_by(|&a, &b| proj[a][0].cmp(&proj[b][0])).unwrap();
        let facets = vec![
            Facet { normal: vec![-Q::one()], offset: -proj[lo][0].clone(), members: vec![lo] },
            Facet { normal: vec![Q::one()], offset: proj[hi][0].clone(), members: vec![hi] },
        ];
        (vec![vec![lo], vec![hi]], facets)
    }

    fn beneath_beyond(proj: &[Vec<Q>], d: usize) -> (Vec<Vec<usize>>, Vec<Facet>) {
        // initial simplex: greedy affinely independent points
        let mut init = vec![0usize];
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for i in 1..proj.len() {
            if init.len() == d + 1 {
                break;
            }
            let diff: Vec<Q> = proj[i].iter().zip(&proj[0]).map(|(a, b)| a - b).collect();
            rows.push(diff);
            if rank(&rows) == rows.len() {
                init.push(i);
            } else {
                rows.pop();
            }
        }
        let k = Q::from_integer(BigInt::from(d as i64 + 1));
        let interior: Vec<Q> = (0..d).map(|c| init.iter().map(|&i| proj[i][c].clone()).sum::<Q>() / &k).collect();
        let make = |verts: Vec<usize>| {
            let pts: Vec<&Vec<Q>> = verts.iter().map(|&i| &proj[i]).collect();
            let (normal, offset) = plane_through(&pts, &interior);
            Simplex { verts, normal, offset }
        };
        let mut simplices: Vec<Simplex> = (0..=d)
            .map(|skip| {
                let verts: Vec<usize> =
                    init.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v).collect();
                make(verts)
            })
            .collect();
        for p in 0..proj.len() {
            if init.contains(&p) {
                continue;
            }
            let visible: Vec<bool> = simplices.iter().map(|s| dot(&s.normal, &proj[p]) > s.offset).collect();
            if !visible.iter().any(|&v| v) {
                continue;
            }
            let mut ridges: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for (s, _) in simplices.iter().zip(&visible).filter(|(_, &v)| v) {
                for skip in 0..s.verts.len() {
                    let mut r = s.verts.clone();
                    r.remove(skip);
                    *ridges.entry(r).or_insert(0) += 1;
                }
            }
            let mut kept: Vec<Simplex> =
                simplices.into_iter().zip(visible).filter(|(_, v)| !v).map(|(s, _)| s).collect();
            for (ridge, count) in ridges {
                if count == 1 {
                    let mut verts = ridge;
                    verts.push(p);
                    verts.sort_unstable();
                    kept.push(make(verts));
                }
            }
            simplices = kept;
        }
        // merge coplanar simplices into facets
        let mut groups: BTreeMap<(Vec<BigInt>, Q), Vec<Q>> = BTreeMap::new();
        for s in &simplices {
            let prim = primitive(&s.normal);
            let scale = &prim
                .iter()
                .zip(&s.normal)
                .find(|(_, x)| !x.is_zero())
                .map(|(p, x)| Q::from_integer(p.clone()) / x)
                .unwrap();
            groups.entry((prim, &s.offset * scale)).or_insert_with(|| s.normal.clone());
        }
        let facets = groups
            .into_iter()
            .map(|((_, _), normal)| {
                let s = simplices.iter().find(|s| s.normal == normal).unwrap();
                let members = (0..proj.len()).filter(|&i| dot(&normal, &proj[i]) == s.offset).collect();
                Facet { normal, offset: s.offset.clone(), members }
            })
            .collect();
        (simplices.into_iter().map(|s| s.verts).collect(), facets)
    }

    /// Volume in projected coordinates: sum of cone volumes from the first vertex.
    pub fn projected_volume(&self) -> Q {
        let d = self.dim();
        if d == 0 {
            return Q::one();
        }
        let base = &self.projected[self.vertices[0]];
        let mut total = Q::zero();
        for s in &self.boundary {
            let m: Vec<Vec<Q>> =
                s.iter().map(|&i| self.projected[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
            total += det(&m).abs();
        }
        let fact: i64 = (1..=d as i64).product();
        total / Q::from_integer(BigInt::from(fact))
    }

    /// d-dimensional measure of the hull, where d is its own dimension.
    /// Exact when the Gram factor is a rational square.
    pub fn intrinsic_measure(&self) -> (f64, Option<Q>) {
        let vp = self.projected_volume();
        let gram = self.frame.gram();
        match exact_sqrt(&gram) {
            Some(r) => {
                let v = vp * r;
                (to_f64(&v), Some(v))
            }
            None => (to_f64(&vp) * to_f64(&gram).sqrt(), None),
        }
    }

    /// All proper nonempty faces (plus the hull itself), with member point sets.
    pub fn faces(&self) -> Vec<Face> {
        let mut found: BTreeSet<Vec<usize>> = self.facets.iter().map(|f| f.members.clone()).collect();
        let mut frontier: Vec<Vec<usize>> = found.iter().cloned().collect();
        while let Some(face) = frontier.pop() {
            for f in &self.facets {
                let meet: Vec<usize> = face.iter().filter(|i| f.members.contains(i)).copied().collect();
                if !meet.is_empty() && meet != face && found.insert(meet.clone()) {
                    frontier.push(meet);
                }
            }
        }
        let mut faces: Vec<Face> = found
            .into_iter()
            .map(|members| {
                let pts: Vec<Vec<Q>> = members.iter().map(|&i| self.points[i].clone()).collect();
                Face { dim: AffineFrame::of(&pts).dim(), members }
            })
            .collect();
        faces.push(Face { dim: self.dim(), members: (0..self.points.len()).collect() });
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.members.cmp(&b.members)));
        faces
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf, qvec};

    fn pts(v: &[&[i64]]) -> Vec<Vec<Q>> {
        v.iter().map(|p| qvec(p)).collect()
    }

    #[test]
    fn square_with_interior_and_edge_points() {
        let h = ConvexHull::new(&pts(&[&[0, 0], &[2, 0], &[2, 2], &[0, 2], &[1, 1], &[1, 0]]));
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.facets.len(), 4);
        assert_eq!(h.projected_volume(), q(4));
        let edges = h.faces().iter().filter(|f| f.dim == 1).count();
        assert_eq!(edges, 4);
    }

    #[test]
    fn cube_faces() {
        let mut v = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    v.push(qvec(&[x, y, z]));
                }
            }
        }
        v.push(vec![qf(1, 2), qf(1, 2), qf(1, 2)]);
        v.push(vec![qf(1, 2), q(0), q(0)]);
        let h = ConvexHull::new(&v);
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        assert_eq!(h.projected_volume(), q(1));
        let faces = h.faces();
        assert_eq!(faces.iter().filter(|f| f.dim == 1).count(), 12);
        assert_eq!(faces.iter().filter(|f| f.dim == 0).count(), 8);
    }

    #[test]
    fn lower_dimensional_sets() {
        let h = ConvexHull::new(&pts(&[&[0, 0], &[3, 4], &[6, 8]]));
        assert_eq!(h.dim(), 1);
        assert_eq!(h.vertices.len(), 2);
        assert_eq!(h.intrinsic_measure().1, Some(q(10)));
        let h = ConvexHull::new(&pts(&[&[1, 1, 1]]));
        assert_eq!(h.dim(), 0);
        // a triangle in 3-space: area sqrt(3)/2
        let h = ConvexHull::new(&pts(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
        assert_eq!(h.dim(), 2);
        let (area, exact) = h.intrinsic_measure();
        assert!(exact.is_none());
        assert!((area - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }
}
