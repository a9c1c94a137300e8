//! Capacity problems and their discretization.

use serde_json::{json, Value};

use super::mask::MaskSpec;
use crate::error::{Error, Result};
use crate::geometry::AffineSubspace;
use crate::hessian::GridFunction;
use crate::rational::{from_f64_approx, from_json, to_json, Q};

/// Nodes of `K` must stay this many grid steps away from the complement of `D`.
pub const MARGIN: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityProblem {
    /// The box carrying the grid.
    pub bounds: Vec<(Q, Q)>,
    pub resolution: Vec<usize>,
    /// `D` is the open box, intersected with this set when present.
    pub domain: Option<MaskSpec>,
    pub k: MaskSpec,
    pub v: Option<AffineSubspace>,
    pub m: usize,
}

/// A node is fixed at 0, fixed at −1, or free.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Outside,
    Obstacle,
    Free,
}

/// The grid a problem is solved on: the box grid itself, or a grid in
/// orthonormal coordinates of `V`.
#[derive(Clone, Debug)]
pub struct Layout {
    pub grid: GridFunction,
    pub kinds: Vec<NodeKind>,
    /// Degree of the Hessian operator on this grid (`m − p`).
    pub degree: usize,
    pub region: Region,
}

/// `D` as a point set in grid coordinates, for locating its boundary between nodes.
#[derive(Clone, Debug)]
pub struct Region {
    lo: Vec<f64>,
    hi: Vec<f64>,
    domain: Option<MaskSpec>,
    frame: Option<VarietyFrame>,
}

impl Region {
    /// `None` when `D` is given by nodes and has no geometry between them.
    pub fn contains(&self, p: &[f64]) -> Option<bool> {
        let x = self.frame.as_ref().map_or_else(|| p.to_vec(), |f| f.embed(p));
        let tol = 1e-12;
        let in_box = x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v > a + tol && *v < b - tol);
        match &self.domain {
            None => Some(in_box),
            Some(d) if d.is_geometric() => Some(in_box && d.contains(&x)),
            Some(_) => None,
        }
    }
}

impl Layout {
    pub fn obstacle(&self) -> impl Iterator<Item = usize> + '_ {
        self.kinds.iter().enumerate().filter(|(_, k)| **k == NodeKind::Obstacle).map(|(i, _)| i)
    }

    pub fn dim(&self) -> usize {
        self.grid.n()
    }
}

impl CapacityProblem {
    pub fn new(bounds: Vec<(Q, Q)>, resolution: Vec<usize>, k: MaskSpec, m: usize) -> Self {
        Self { bounds, resolution, domain: None, k, v: None, m }
    }

    /// `[-1, 1]^n` with `res` nodes per axis.
    pub fn unit_box(n: usize, res: usize, k: MaskSpec, m: usize) -> Self {
        Self::new(vec![(Q::from_integer((-1).into()), Q::from_integer(1.into())); n], vec![res; n], k, m)
    }

    pub fn with_domain(mut self, d: MaskSpec) -> Self {
        self.domain = Some(d);
        self
    }

    pub fn with_variety(mut self, v: AffineSubspace) -> Self {
        self.v = Some(v);
        self
    }

    pub fn with_k(&self, k: MaskSpec) -> Self {
        Self { k, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.bounds.len()
    }

    pub fn codim(&self) -> usize {
        self.v.as_ref().map_or(0, |v| v.codim())
    }

    /// The empty grid of the ambient box.
    pub fn box_grid(&self) -> Result<GridFunction> {
        let count = self.resolution.iter().product();
        GridFunction::new(self.bounds.clone(), self.resolution.clone(), vec![0.0; count])
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.resolution.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.resolution.len() });
        }
        let p = self.codim();
        if let Some(v) = &self.v {
            if v.n != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.n });
            }
        }
        if self.m > n || self.m <= p {
            return Err(Error::Problem(format!("need n >= m > p, got n={n}, m={}, p={p}", self.m)));
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<Layout> {
        self.validate()?;
        let boxed = self.box_grid()?;
        let region = Region {
            lo: boxed.lo(),
            hi: self.bounds.iter().map(|(_, b)| crate::rational::to_f64(b)).collect(),
            domain: self.domain.clone(),
            frame: self.v.as_ref().map(VarietyFrame::new),
        };
        let (grid, inside, in_k): (GridFunction, Vec<bool>, Vec<bool>) = match &self.v {
            None => {
                let inside = (0..boxed.len())
                    .map(|i| boxed.is_interior(i) && self.domain.as_ref().map_or(true, |d| d.contains(&boxed.point(i))))
                    .collect();
                let in_k = self.k.rasterize(&boxed)?;
                (boxed, inside, in_k)
            }
            Some(v) => {
                if !self.k.is_geometric() || self.domain.as_ref().is_some_and(|d| !d.is_geometric()) {
                    return Err(Error::Problem("node masks cannot be restricted to a variety".into()));
                }
                let frame = VarietyFrame::new(v);
                let grid = frame.grid(&boxed)?;
                let lo = boxed.lo();
                let hi: Vec<f64> = self.bounds.iter().map(|(_, b)| crate::rational::to_f64(b)).collect();
                let tol = 1e-12;
                let mut inside = Vec::with_capacity(grid.len());
                let mut in_k = Vec::with_capacity(grid.len());
                for i in 0..grid.len() {
                    let x = frame.embed(&grid.point(i));
                    let in_box = x.iter().zip(lo.iter().zip(&hi)).all(|(v, (a, b))| *v > a + tol && *v < b - tol);
                    inside.push(
                        grid.is_interior(i) && in_box && self.domain.as_ref().map_or(true, |d| d.contains(&x)),
                    );
                    in_k.push(self.k.contains(&x));
                }
                (grid, inside, in_k)
            }
        };
        let mut kinds: Vec<NodeKind> =
            inside.iter().map(|&b| if b { NodeKind::Free } else { NodeKind::Outside }).collect();
        let margin = margin_ok(&grid, &inside);
        for i in 0..grid.len() {
            if in_k[i] {
                if !margin[i] {
                    let x = grid.point(i);
                    return Err(Error::Problem(format!("K reaches within {MARGIN} nodes of the boundary of D at {x:?}")));
                }
                kinds[i] = NodeKind::Obstacle;
            }
        }
        Ok(Layout { grid, kinds, degree: self.m - self.codim(), region })
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "box": self.bounds.iter().map(|(a, b)| [to_json(a), to_json(b)]).collect::<Vec<_>>(),
            "resolution": self.resolution,
            "K": self.k.to_json(),
            "m": self.m,
        });
        if let Some(d) = &self.domain {
            v["D"] = d.to_json();
        }
        if let Some(s) = &self.v {
            v["V"] = s.to_json();
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bounds = v
            .get("box")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("problem needs a box".into()))?
            .iter()
            .map(|side| match side.as_array().map(|s| s.as_slice()) {
                Some([a, b]) => Ok((from_json(a)?, from_json(b)?)),
                _ => Err(Error::Format(format!("bad box side {side}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let n = bounds.len();
        let resolution = match v.get("resolution") {
            None => vec![default_resolution(n); n],
            Some(Value::Number(r)) => vec![r.as_u64().ok_or_else(|| Error::Format("bad resolution".into()))? as usize; n],
            Some(Value::Array(rs)) => rs
                .iter()
                .map(|r| r.as_u64().map(|r| r as usize).ok_or_else(|| Error::Format(format!("bad resolution {r}"))))
                .collect::<Result<_>>()?,
            Some(other) => return Err(Error::Format(format!("bad resolution {other}"))),
        };
        let k = match v.get("K") {
            Some(k) => MaskSpec::from_json(k)?,
            None => MaskSpec::empty(),
        };
        let m = v.get("m").and_then(Value::as_u64).ok_or_else(|| Error::Format("problem needs an integer m".into()))? as usize;
        let domain = v.get("D").map(MaskSpec::from_json).transpose()?;
        let sub = v.get("V").map(AffineSubspace::from_json).transpose()?;
        Ok(Self { bounds, resolution, domain, k, v: sub, m })
    }
}

pub fn default_resolution(n: usize) -> usize {
    if n <= 2 {
        65
    } else {
        33
    }
}

/// Nodes whose `MARGIN`-neighbourhood (sup norm) lies in `inside`.
fn margin_ok(grid: &GridFunction, inside: &[bool]) -> Vec<bool> {
    let res = grid.resolution();
    let n = grid.n();
    let mut ok = inside.to_vec();
    // erode one step at a time along each axis
    for _ in 0..MARGIN {
        for axis in 0..n {
            let st = grid.strides()[axis];
            let prev = ok.clone();
            for (i, o) in ok.iter_mut().enumerate() {
                let a = grid.multi_index(i)[axis];
                let lo = a == 0 || !prev[i - st];
                let hi = a + 1 == res[axis] || !prev[i + st];
                if lo || hi {
                    *o = false;
                }
            }
        }
    }
    ok
}

/// Orthonormal coordinates on an affine subspace.
#[derive(Clone, Debug)]
pub(crate) struct VarietyFrame {
    pub basis: Vec<Vec<f64>>,
    pub origin: Vec<f64>,
}

impl VarietyFrame {
    pub fn new(v: &AffineSubspace) -> Self {
        let basis = v.orthonormal_basis();
        let offset = v.offset_f64();
        // use the point of V closest to the origin so the parameter box is centred
        let normals = v.orthonormal_normals();
        let mut origin = vec![0.0; offset.len()];
        for nu in &normals {
            let c: f64 = nu.iter().zip(&offset).map(|(a, b)| a * b).sum();
            for (o, a) in origin.iter_mut().zip(nu) {
                *o += c * a;
            }
        }
        Self { basis, origin }
    }

    pub fn embed(&self, t: &[f64]) -> Vec<f64> {
        let mut x = self.origin.clone();
        for (tj, b) in t.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += tj * bi;
            }
        }
        x
    }

    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| b.iter().zip(x.iter().zip(&self.origin)).map(|(bi, (xi, oi))| bi * (xi - oi)).sum()).collect()
    }

    /// A grid on `V` covering the section of the box, with spacing no larger
    /// than the box grid's finest spacing.
    pub fn grid(&self, boxed: &GridFunction) -> Result<GridFunction> {
        let n = boxed.n();
        let lo = boxed.lo();
        let hi: Vec<f64> = boxed.bounds().iter().map(|(_, b)| crate::rational::to_f64(b)).collect();
        let d = self.basis.len();
        let mut tlo = vec![f64::INFINITY; d];
        let mut thi = vec![f64::NEG_INFINITY; d];
        for corner in 0..1usize << n {
            let x: Vec<f64> = (0..n).map(|i| if corner >> i & 1 == 1 { hi[i] } else { lo[i] }).collect();
            for (j, t) in self.coords(&x).into_iter().enumerate() {
                tlo[j] = tlo[j].min(t);
                thi[j] = thi[j].max(t);
            }
        }
        let s = boxed.spacing().into_iter().fold(f64::INFINITY, f64::min);
        let s = from_f64_approx(s, 1 << 20);
        let sf = crate::rational::to_f64(&s);
        let mut bounds = Vec::with_capacity(d);
        let mut res = Vec::with_capacity(d);
        for j in 0..d {
            // symmetric node layout around the parameter origin
            let k = (tlo[j].abs().max(thi[j].abs()) / sf).ceil() as i64;
            let r = &s * Q::from_integer(k.into());
            bounds.push((-r.clone(), r));
            res.push((2 * k + 1).max(3) as usize);
        }
        GridFunction::new(bounds, res.clone(), vec![0.0; res.iter().product()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::mask::Shape;
    use crate::rational::q;

    fn ball(r: f64) -> MaskSpec {
        MaskSpec::Shapes(vec![Shape::Ball { center: vec![0.0, 0.0], radius: r }])
    }

    #[test]
    fn margin_is_enforced() {
        let p = CapacityProblem::unit_box(2, 9, ball(0.3), 1);
        assert!(p.layout().is_ok());
        let p = CapacityProblem::unit_box(2, 9, ball(0.8), 1);
        assert!(matches!(p.layout(), Err(Error::Problem(_))));
    }

    #[test]
    fn json_round_trip() {
        let p = CapacityProblem::unit_box(3, 9, ball(0.3).union(&ball(0.1)).unwrap(), 2)
            .with_variety(AffineSubspace::coordinate_hyperplane(3, 2, q(0)));
        let p = CapacityProblem { k: MaskSpec::Shapes(vec![Shape::Ball { center: vec![0.0; 3], radius: 0.3 }]), ..p };
        assert_eq!(CapacityProblem::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn variety_grid_is_a_plane_section() {
        let p = CapacityProblem::unit_box(3, 9, MaskSpec::Shapes(vec![Shape::Ball { center: vec![0.0; 3], radius: 0.3 }]), 2)
            .with_variety(AffineSubspace::coordinate_hyperplane(3, 2, q(0)));
        let l = p.layout().unwrap();
        assert_eq!(l.grid.resolution(), &[9, 9]);
        assert_eq!(l.degree, 1);
        assert_eq!(l.obstacle().count(), 5);
    }

    #[test]
    fn degree_checks() {
        let p = CapacityProblem::unit_box(3, 9, MaskSpec::empty(), 1).with_variety(AffineSubspace::coordinate_hyperplane(3, 2, q(0)));
        assert!(p.layout().is_err());
    }
}
