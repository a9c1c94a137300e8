//! Mixed Hessian masses against the current of integration of an affine subspace.

use super::grid::GridFunction;
use super::measure::superform_constant;
use super::superform::wedge_f64;
use crate::error::{Error, Result};
use crate::geometry::AffineSubspace;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Restriction {
    /// `∫_G [V] ∧ β^{n−m} ∧ (dd#u)^{m−p}`, as a volume quadrature with a smeared `[V]`.
    pub lhs: f64,
    /// `∫_{G∩V} (i*β)^{n−m} ∧ (dd# i*u)^{m−p}`, as a quadrature over a parametrization of V.
    pub rhs: f64,
}

fn inside(g: &[(f64, f64)], x: &[f64]) -> bool {
    g.iter().zip(x).all(|((a, b), xi)| *xi >= a - 1e-12 && *xi <= b + 1e-12)
}

pub fn restrict_to_variety(u: &GridFunction, v: &AffineSubspace, m: usize, g: Option<&[(f64, f64)]>) -> Result<Restriction> {
    let n = u.n();
    if v.n != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.n });
    }
    let p = v.codim();
    if p > m || m > n || m == p {
        return Err(Error::OutOfRange(format!("need codim(V) = {p} < m = {m} ≤ n = {n}")));
    }
    let grid_box: Vec<(f64, f64)> = u.bounds().iter().map(|(a, b)| (crate::rational::to_f64(a), crate::rational::to_f64(b))).collect();
    let g: Vec<(f64, f64)> = g.map_or(grid_box.clone(), |g| g.to_vec());
    let normals = v.orthonormal_normals();
    let basis = v.orthonormal_basis();
    let offset = v.offset_f64();
    let hessians: Vec<_> = (0..u.len()).map(|k| u.hessian_clamped(k)).collect();
    let identity: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i32 as f64).collect()).collect();

    // left side: smeared delta of width w along each unit normal
    let w = u.spacing().iter().cloned().fold(0.0, f64::max);
    let mut factors: Vec<Vec<Vec<f64>>> =
        normals.iter().map(|nv| (0..n).map(|i| (0..n).map(|j| nv[i] * nv[j]).collect()).collect()).collect();
    let fixed = factors.len();
    let mut lhs = 0.0;
    for k in 0..u.len() {
        let x = u.point(k);
        if !inside(&g, &x) {
            continue;
        }
        let mut delta = 1.0;
        for nv in &normals {
            let d: f64 = nv.iter().zip(x.iter().zip(&offset)).map(|(a, (xi, oi))| a * (xi - oi)).sum();
            delta *= (1.0 - d.abs() / w).max(0.0) / w;
        }
        if delta == 0.0 {
            continue;
        }
        factors.truncate(fixed);
        factors.extend(std::iter::repeat(hessians[k].rows()).take(m - p));
        factors.extend(std::iter::repeat(identity.clone()).take(n - m));
        lhs += u.quadrature_weight(k) * delta * wedge_f64(&factors);
    }

    // right side: midpoint rule on a box of parameters covering G ∩ V
    let d = n - p;
    let mut corners = vec![vec![]];
    for side in &g {
        corners = corners.into_iter().flat_map(|c: Vec<f64>| [side.0, side.1].map(|x| [c.clone(), vec![x]].concat())).collect();
    }
    let range: Vec<(f64, f64)> = (0..d)
        .map(|a| {
            let proj = corners.iter().map(|c| basis[a].iter().zip(c.iter().zip(&offset)).map(|(b, (x, o))| b * (x - o)).sum::<f64>());
            proj.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)))
        })
        .collect();
    let step = u.spacing().iter().cloned().fold(f64::INFINITY, f64::min) / 2.0;
    let counts: Vec<usize> = range.iter().map(|(lo, hi)| (((hi - lo) / step).ceil() as usize).max(1)).collect();
    let widths: Vec<f64> = range.iter().zip(&counts).map(|((lo, hi), c)| (hi - lo) / *c as f64).collect();
    let area: f64 = widths.iter().product();
    let c_rhs = superform_constant(m - p, d) as f64;
    let mut rhs = 0.0;
    let total: usize = counts.iter().product();
    for code in 0..total {
        let mut c = code;
        let mut t = vec![0.0; d];
        for a in (0..d).rev() {
            let i = c % counts[a];
            c /= counts[a];
            t[a] = range[a].0 + (i as f64 + 0.5) * widths[a];
        }
        let x: Vec<f64> = (0..n).map(|i| offset[i] + (0..d).map(|a| basis[a][i] * t[a]).sum::<f64>()).collect();
        if !inside(&g, &x) {
            continue;
        }
        let mut h = super::matrix::SymmetricMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let val = u.interpolate_with(&x, |k| hessians[k].get(i, j));
                let Some(val) = val else { continue };
                h.set(i, j, val);
            }
        }
        let restricted = h.congruence(&basis);
        rhs += area * c_rhs * restricted.sigmas()[m - p - 1];
    }
    Ok(Restriction { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn paraboloid_on_a_coordinate_plane() {
        let u = GridFunction::sample_cube(3, qf(-1, 2), qf(1, 2), 9, |x| 0.5 * x.iter().map(|a| a * a).sum::<f64>()).unwrap();
        let v = AffineSubspace::coordinate_hyperplane(3, 2, q(0));
        let r = restrict_to_variety(&u, &v, 2, None).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-9, "{r:?}");
        assert!((r.rhs - 2.0).abs() < 1e-9, "{r:?}");
        let aff = GridFunction::sample_cube(3, qf(-1, 2), qf(1, 2), 5, |x| x[0] - x[2]).unwrap();
        let r = restrict_to_variety(&aff, &v, 2, None).unwrap();
        assert!(r.lhs.abs() < 1e-9 && r.rhs.abs() < 1e-9);
        let far = AffineSubspace::coordinate_hyperplane(3, 2, q(5));
        let r = restrict_to_variety(&u, &far, 2, None).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }
}
