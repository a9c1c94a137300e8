//! Recession functions of sampled functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Indicator;
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::hessian::GridFunction;
use crate::rational::{from_f64_approx, to_f64, Q};

#[derive(Clone, Debug)]
pub struct LimitOptions {
    /// Number of sampled directions (ignored for n = 1).
    pub directions: usize,
    /// Halvings of the ray length; the ratio of the longest to the shortest
    /// ray is `2^scales`.
    pub scales: usize,
    /// Relative agreement required of the two outermost slopes.
    pub tol: f64,
    /// Allowed misfit of the fitted max of linear forms, relative to `1 + |Ψ|`.
    pub fit_tol: f64,
    pub max_den: i64,
    /// Largest fraction of directions allowed to be unsettled.
    pub max_unsettled: f64,
}

/// A fitted indicator and the directions whose limit had not settled; those are
/// left out of the fit.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFit {
    pub indicator: Indicator,
    pub unsettled: Vec<Vec<f64>>,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self { directions: 96, scales: 6, tol: 0.02, fit_tol: 0.05, max_den: 12, max_unsettled: 0.1 }
    }
}

fn directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if r > 0.1 && r <= 1.0 {
                    out.push(v.into_iter().map(|x| x / r).collect());
                }
            }
            out
        }
    }
}

/// Longest `t` with `x + t z` in the grid box.
fn reach(u: &GridFunction, x: &[f64], z: &[f64]) -> f64 {
    let lo = u.lo();
    let hi: Vec<f64> = u.bounds().iter().map(|(_, b)| to_f64(b)).collect();
    let mut t = f64::INFINITY;
    for k in 0..x.len() {
        if z[k] > 0.0 {
            t = t.min((hi[k] - x[k]) / z[k]);
        } else if z[k] < 0.0 {
            t = t.min((lo[k] - x[k]) / z[k]);
        }
    }
    t * (1.0 - 1e-9)
}

/// Outermost and next difference quotients of `t ↦ u(x + t z)` over halving rays.
fn slopes(u: &GridFunction, x: &[f64], z: &[f64], scales: usize) -> Option<(f64, f64)> {
    let tmax = reach(u, x, z);
    let at = |t: f64| u.interpolate(&x.iter().zip(z).map(|(a, b)| a + t * b).collect::<Vec<_>>());
    let ts: Vec<f64> = (0..=scales.max(2)).map(|j| tmax * 0.5f64.powi(j as i32)).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| at(t)).collect::<Option<_>>()?;
    let s0 = (vals[0] - vals[1]) / (ts[0] - ts[1]);
    let s1 = (vals[1] - vals[2]) / (ts[1] - ts[2]);
    Some((s0, s1))
}

/// Fits `Ψ_{u,x}` from difference quotients along rays from `x` out to the edge
/// of the grid box. The slope at direction `y` and its derivatives in `y` give
/// candidate gradients, which are rounded to rationals and thinned to the
/// vertices of their hull.
pub fn grid_indicator(u: &GridFunction, x: &[f64], opts: &LimitOptions) -> Result<GridFit> {
    let n = u.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if u.interpolate(x).is_none() {
        return Err(Error::OutOfRange(format!("base point {x:?} outside the grid")));
    }
    let all = directions(n, opts.directions);
    let psi = |z: &[f64]| slopes(u, x, z, opts.scales).map(|s| s.0);
    let (mut dirs, mut values, mut unsettled) = (Vec::new(), Vec::new(), Vec::new());
    for y in all {
        match slopes(u, x, &y, opts.scales) {
            Some((s0, s1)) if (s0 - s1).abs() <= opts.tol * (1.0 + s0.abs()) => {
                dirs.push(y);
                values.push(s0);
            }
            _ => unsettled.push(y),
        }
    }
    if unsettled.len() as f64 > opts.max_unsettled * (dirs.len() + unsettled.len()) as f64 {
        return Err(Error::NonConvergentLimits(unsettled));
    }
    // the Euler relation pins the radial part; tangential parts by central differences
    let delta = 0.02;
    let mut candidates: Vec<Vec<Q>> = Vec::new();
    for y in &dirs {
        let grad = |d: f64| -> Option<Vec<f64>> {
            (0..n)
                .map(|k| {
                    let mut p = y.clone();
                    let mut m = y.clone();
                    p[k] += d;
                    m[k] -= d;
                    Some((psi(&p)? - psi(&m)?) / (2.0 * d))
                })
                .collect()
        };
        let (Some(g1), Some(g2)) = (grad(delta), grad(2.0 * delta)) else { continue };
        if g1.iter().zip(&g2).any(|(a, b)| (a - b).abs() > opts.fit_tol) {
            continue;
        }
        let a: Vec<Q> = g1.iter().map(|v| from_f64_approx(*v, opts.max_den)).collect();
        if !candidates.contains(&a) {
            candidates.push(a);
        }
    }
    // keep candidates below the sampled Ψ everywhere
    let misfit = |a: &[Q], y: &[f64], v: f64| a.iter().zip(y).map(|(p, q)| to_f64(p) * q).sum::<f64>() - v;
    candidates.retain(|a| dirs.iter().zip(&values).all(|(y, v)| misfit(a, y, *v) <= opts.fit_tol * (1.0 + v.abs())));
    if candidates.is_empty() {
        return Err(Error::IndicatorFit("no candidate gradient survived".into()));
    }
    let hull = Polytope::convex_hull(&candidates)?;
    let fitted = Indicator::new(n, hull.vertices().to_vec())?;
    for (y, v) in dirs.iter().zip(&values) {
        let e = fitted.eval_f64(y) - v;
        if e.abs() > opts.fit_tol * (1.0 + v.abs()) {
            return Err(Error::IndicatorFit(format!("misfit {e:.3} in direction {y:?}")));
        }
    }
    Ok(GridFit { indicator: fitted, unsettled })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupSample {
    pub r: f64,
    pub value: f64,
    /// The box `|t_k − x_k| ≤ |y_k|^R` left the grid and was cut to it.
    pub clipped: bool,
}

/// `R^{-1} sup{u(t) : |t_k − x_k| ≤ |y_k|^R}` over grid nodes, for each `R`.
/// A cross-check on sampled input only; nothing downstream uses it.
pub fn sup_formula_profile(u: &GridFunction, x: &[f64], y: &[f64], rs: &[f64]) -> Vec<SupSample> {
    let lo = u.lo();
    let hi: Vec<f64> = u.bounds().iter().map(|(_, b)| to_f64(b)).collect();
    rs.iter()
        .map(|&r| {
            let half: Vec<f64> = y.iter().map(|v| v.abs().powf(r)).collect();
            let clipped = (0..x.len()).any(|k| x[k] - half[k] < lo[k] || x[k] + half[k] > hi[k]);
            let sup = (0..u.len())
                .filter(|&i| u.point(i).iter().zip(x).zip(&half).all(|((t, c), h)| (t - c).abs() <= h + 1e-12))
                .map(|i| u.values()[i])
                .fold(f64::NEG_INFINITY, f64::max);
            SupSample { r, value: sup / r, clipped }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};

    #[test]
    fn recovers_the_tropical_line() {
        let u = GridFunction::sample_cube(2, q(-4), q(4), 129, |x| x[0].max(x[1]).max(0.0)).unwrap();
        let psi = grid_indicator(&u, &[0.0, 0.0], &LimitOptions::default()).unwrap().indicator;
        assert_eq!(psi, Indicator::new(2, vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])]).unwrap());
    }

    #[test]
    fn constants_and_base_point_drop_out() {
        let f = |x: &[f64]| (-3.0 + 2.0 * x[0]).max(1.0 + x[1]);
        let u = GridFunction::sample_cube(2, q(-40), q(40), 161, f).unwrap();
        let psi = grid_indicator(&u, &[1.0, -2.0], &LimitOptions::default()).unwrap().indicator;
        assert_eq!(psi, Indicator::new(2, vec![qvec(&[2, 0]), qvec(&[0, 1])]).unwrap());
    }

    #[test]
    fn sup_profile_of_a_constant() {
        let u = GridFunction::sample_cube(2, q(-2), q(2), 17, |_| 1.0).unwrap();
        let s = sup_formula_profile(&u, &[0.0, 0.0], &[1.0, 1.0], &[1.0, 2.0]);
        assert_eq!(s[0].value, 1.0);
        assert_eq!(s[1].value, 0.5);
        assert!(!s[0].clipped);
    }
}
