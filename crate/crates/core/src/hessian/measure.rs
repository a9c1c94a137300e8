//! Hessian measures `(dd#u)^m ∧ β^{n−m}` of sampled and piecewise-linear functions.

use num_traits::Zero;
use serde_json::{json, Value};

use super::grid::{is_m_subharmonic, GridFunction};
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::rational::{to_f64, to_json, vec_to_json, Q};
use crate::tropical::{dual_subdivision, TropicalPolynomial};

/// `m!(n−m)!`, the factor turning `σ_m` into the density of `(dd#u)^m ∧ β^{n−m}`.
pub fn superform_constant(m: usize, n: usize) -> u64 {
    let f = |k: usize| (1..=k as u64).product::<u64>();
    f(m) * f(n - m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub point: Vec<Q>,
    pub mass: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HessianMeasure {
    pub n: usize,
    pub m: usize,
    /// Absolutely continuous part (density with respect to Lebesgue measure).
    pub density: Option<GridFunction>,
    pub atoms: Vec<Atom>,
}

impl HessianMeasure {
    pub fn atom_mass(&self) -> Q {
        self.atoms.iter().map(|a| a.mass.clone()).sum()
    }

    /// Trapezoid quadrature of the density plus all atoms.
    pub fn total(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// `∫ φ dμ` for a test function `φ`.
    pub fn integrate(&self, phi: impl Fn(&[f64]) -> f64) -> f64 {
        let mut total = 0.0;
        if let Some(d) = &self.density {
            for k in 0..d.len() {
                let v = d.values()[k];
                if v != 0.0 {
                    total += d.quadrature_weight(k) * v * phi(&d.point(k));
                }
            }
        }
        for a in &self.atoms {
            let p: Vec<f64> = a.point.iter().map(to_f64).collect();
            total += to_f64(&a.mass) * phi(&p);
        }
        total
    }

    pub fn min_density(&self) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d.values().iter().copied().fold(f64::INFINITY, f64::min))
    }

    pub fn to_json(&self, density_ref: Option<&str>) -> Value {
        let mut v = json!({
            "n": self.n,
            "m": self.m,
            "atoms": self.atoms.iter().map(|a| json!({"point": vec_to_json(&a.point), "mass": to_json(&a.mass)})).collect::<Vec<_>>(),
            "total": self.total(),
        });
        if let Some(r) = density_ref {
            v["density"] = json!(r);
        }
        v
    }
}

/// Density `m!(n−m)! σ_m(D²u)` at every node (boundary nodes borrow the nearest interior Hessian).
pub fn hessian_measure_smooth(u: &GridFunction, m: usize, tol: Option<f64>) -> Result<HessianMeasure> {
    let n = u.n();
    if m == 0 || m > n {
        return Err(Error::OutOfRange(format!("m = {m} must lie in 1..={n}")));
    }
    let report = is_m_subharmonic(u, m, tol);
    if !report.ok {
        return Err(Error::NotMSubharmonic { m, count: report.violations.len() });
    }
    Ok(smooth_density_unchecked(u, m))
}

pub(crate) fn smooth_density_unchecked(u: &GridFunction, m: usize) -> HessianMeasure {
    let n = u.n();
    let c = superform_constant(m, n) as f64;
    let values = (0..u.len()).map(|k| c * u.hessian_clamped(k).sigmas()[m - 1]).collect();
    HessianMeasure { n, m, density: Some(u.with_values(values).expect("same grid")), atoms: Vec::new() }
}

/// `(dd#f)^n` of a tropical polynomial: an atom `n!·Vol(cell)` at the vertex dual to each maximal cell.
pub fn pl_monge_ampere(f: &TropicalPolynomial) -> HessianMeasure {
    let n = f.n();
    let sub = dual_subdivision(f);
    let fact: i64 = (1..=n as i64).product();
    let mut atoms = Vec::new();
    for cell in &sub.cells {
        let vol = cell.polytope.volume();
        if vol.is_zero() {
            continue;
        }
        // vertex: the terms of the cell tie; use n+1 affinely independent ones
        let t0 = &f.terms()[cell.terms[0]];
        let rows: Vec<(Vec<Q>, Q)> = cell.terms[1..]
            .iter()
            .map(|&i| {
                let t = &f.terms()[i];
                let a: Vec<Q> = t.alpha_q().iter().zip(t0.alpha_q()).map(|(x, y)| x - y).collect();
                (a, &t.upsilon - &t0.upsilon)
            })
            .collect();
        let a: Vec<Vec<Q>> = rows.iter().map(|r| r.0.clone()).collect();
        let b: Vec<Q> = rows.iter().map(|r| r.1.clone()).collect();
        let point = solve(&a, &b).expect("a full-dimensional dual cell determines its vertex");
        atoms.push(Atom { point, mass: vol * Q::from_integer(fact.into()) });
    }
    atoms.sort_by(|a, b| a.point.cmp(&b.point));
    HessianMeasure { n, m: n, density: None, atoms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};
    use crate::tropical::parse_tropical;

    #[test]
    fn quadratic_masses() {
        let u = GridFunction::sample_cube(2, q(0), q(1), 17, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        for m in 1..=2 {
            let mu = hessian_measure_smooth(&u, m, None).unwrap();
            assert!((mu.total() - 2.0).abs() < 1e-9, "m={m}: {}", mu.total());
        }
        let aff = GridFunction::sample_cube(2, q(0), q(1), 9, |x| x[0] - 2.0 * x[1]).unwrap();
        assert!(hessian_measure_smooth(&aff, 2, None).unwrap().total().abs() < 1e-9);
        let saddle = GridFunction::sample_cube(3, q(-1), q(1), 5, |x| x[0] * x[0] + x[1] * x[1] - x[2] * x[2]).unwrap();
        assert!(matches!(hessian_measure_smooth(&saddle, 2, None), Err(Error::NotMSubharmonic { m: 2, .. })));
    }

    #[test]
    fn pl_atoms() {
        let mu = pl_monge_ampere(&parse_tropical("max(0, x1, x2)", 2).unwrap());
        assert_eq!(mu.atoms, vec![Atom { point: qvec(&[0, 0]), mass: q(1) }]);
        let mu = pl_monge_ampere(&parse_tropical("max(0, 2*x1)", 1).unwrap());
        assert_eq!(mu.atoms, vec![Atom { point: qvec(&[0]), mass: q(2) }]);
        assert!(pl_monge_ampere(&parse_tropical("max(1 + x1 - x2)", 2).unwrap()).atoms.is_empty());
        let sq = pl_monge_ampere(&parse_tropical("max(0, x1, x2, -1 + x1 + x2)", 2).unwrap());
        assert_eq!(sq.atoms.len(), 2);
        assert_eq!(sq.atom_mass(), q(2));
    }
}
