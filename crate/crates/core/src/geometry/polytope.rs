//! Convex polytopes in V-representation.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::hull::ConvexHull;
use crate::linalg::subsets;
use crate::rational::{vec_from_json, vec_to_json, Q};

/// A polytope stored by its irredundant, lexicographically sorted vertex list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polytope {
    n: usize,
    vertices: Vec<Vec<Q>>,
}

fn check_dims(points: &[Vec<Q>]) -> Result<usize> {
    let n = points.first().ok_or(Error::Empty("point set"))?.len();
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    Ok(n)
}

impl Polytope {
    pub fn convex_hull(points: &[Vec<Q>]) -> Result<Self> {
        let n = check_dims(points)?;
        let hull = ConvexHull::new(points);
        let vertices = hull.vertices.iter().map(|&i| hull.points[i].clone()).collect();
        Ok(Self { n, vertices })
    }

    pub fn from_integer_points(points: &[Vec<i64>]) -> Result<Self> {
        let pts: Vec<Vec<Q>> = points.iter().map(|p| crate::rational::qvec(p)).collect();
        Self::convex_hull(&pts)
    }

    pub fn point(x: Vec<Q>) -> Self {
        Self { n: x.len(), vertices: vec![x] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn hull(&self) -> ConvexHull {
        ConvexHull::new(&self.vertices)
    }

    pub fn dim(&self) -> usize {
        self.hull().dim()
    }

    /// Facet inequalities `normal·x ≤ offset` (relative to the affine hull for lower-dimensional polytopes).
    pub fn facets(&self) -> Vec<(Vec<Q>, Q)> {
        let h = self.hull();
        h.facets
            .iter()
            .map(|f| {
                let mut a = vec![Q::zero(); self.n];
                for (k, &j) in h.frame.pivots.iter().enumerate() {
                    a[j] = f.normal[k].clone();
                }
                (a, f.offset.clone())
            })
            .collect()
    }

    /// Euclidean n-volume; zero unless the polytope is full-dimensional.
    pub fn volume(&self) -> Q {
        let h = self.hull();
        if h.dim() < self.n {
            return Q::zero();
        }
        h.projected_volume()
    }

    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        Polytope::convex_hull(&pts)
    }

    pub fn scale(&self, lambda: &Q) -> Polytope {
        let mut vertices: Vec<Vec<Q>> =
            self.vertices.iter().map(|v| v.iter().map(|x| x * lambda).collect()).collect();
        if lambda.is_zero() {
            vertices.truncate(1);
        } else if lambda < &Q::zero() {
            vertices.sort();
        }
        Polytope { n: self.n, vertices }
    }

    pub fn translate(&self, t: &[Q]) -> Polytope {
        let vertices = self.vertices.iter().map(|v| v.iter().zip(t).map(|(x, y)| x + y).collect()).collect();
        Polytope { n: self.n, vertices }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "version": 1,
            "n": self.n,
            "vertices": self.vertices.iter().map(|v| vec_to_json(v)).collect::<Vec<_>>(),
        })
    }

    /// Parses a polytope document; the vertex list may be redundant.
    pub fn from_json(v: &Value) -> Result<Polytope> {
        let verts = v
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("polytope needs a \"vertices\" array".into()))?;
        let pts: Vec<Vec<Q>> = verts.iter().map(vec_from_json).collect::<Result<_>>()?;
        let p = Polytope::convex_hull(&pts)?;
        if let Some(n) = v.get("n").and_then(Value::as_u64) {
            if n as usize != p.n {
                return Err(Error::DimensionMismatch { expected: n as usize, found: p.n });
            }
        }
        Ok(p)
    }
}

/// Normalized mixed volume, `MV(P, …, P) = n!·Vol(P)`, by inclusion–exclusion.
pub fn mixed_volume(bodies: &[Polytope]) -> Result<Q> {
    let n = bodies.first().ok_or(Error::WrongBodyCount { expected: 1, found: 0 })?.n;
    if bodies.len() != n {
        return Err(Error::WrongBodyCount { expected: n, found: bodies.len() });
    }
    if let Some(b) = bodies.iter().find(|b| b.n != n) {
        return Err(Error::DimensionMismatch { expected: n, found: b.n });
    }
    let mut total = Q::zero();
    for k in 1..=n {
        let sign = if (n - k) % 2 == 0 { Q::one() } else { -Q::one() };
        for pick in subsets(n, k) {
            let mut sum = bodies[pick[0]].clone();
            for &i in &pick[1..] {
                sum = sum.minkowski_sum(&bodies[i])?;
            }
            total += &sign * sum.volume();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf, qvec};

    fn poly(pts: &[&[i64]]) -> Polytope {
        Polytope::from_integer_points(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn hull_examples() {
        let p = Polytope::convex_hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), vec![qf(1, 4), qf(1, 4)]]).unwrap();
        assert_eq!(p.vertices(), &[qvec(&[0, 0]), qvec(&[0, 1]), qvec(&[1, 0])]);
        assert_eq!(poly(&[&[0, 0]]).vertices().len(), 1);
        assert_eq!(poly(&[&[0, 0], &[2, 0], &[0, 2], &[1, 1]]).vertices().len(), 3);
        assert!(Polytope::convex_hull(&[qvec(&[0]), qvec(&[0, 1])]).is_err());
    }

    #[test]
    fn volumes_and_sums() {
        let square = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let tri = poly(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(square.volume(), q(1));
        assert_eq!(tri.volume(), qf(1, 2));
        assert_eq!(poly(&[&[0, 0], &[1, 1]]).volume(), q(0));
        assert_eq!(tri.minkowski_sum(&tri).unwrap(), tri.scale(&q(2)));
        let seg = poly(&[&[0, 0], &[1, 0]]);
        assert_eq!(square.minkowski_sum(&seg).unwrap(), poly(&[&[0, 0], &[2, 0], &[2, 1], &[0, 1]]));
        assert_eq!(poly(&[&[3, 4]]).minkowski_sum(&tri).unwrap(), tri.translate(&qvec(&[3, 4])));
    }

    #[test]
    fn mixed_volume_examples() {
        let square = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let tri = poly(&[&[0, 0], &[1, 0], &[0, 1]]);
        let seg = poly(&[&[0, 0], &[1, 1]]);
        assert_eq!(mixed_volume(&[tri.clone(), tri.clone()]).unwrap(), q(1));
        assert_eq!(mixed_volume(&[square.clone(), square.clone()]).unwrap(), q(2));
        assert_eq!(mixed_volume(&[seg.clone(), seg]).unwrap(), q(0));
        assert!(mixed_volume(&[tri]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = Polytope::convex_hull(&[qvec(&[0, 0]), vec![qf(3, 2), q(0)], qvec(&[0, 1])]).unwrap();
        let v = p.to_json();
        assert_eq!(v["vertices"][2][0], json!([3, 2]));
        assert_eq!(Polytope::from_json(&v).unwrap(), p);
    }
}
