//! The capacity functional, its extremal value and a candidate-family lower bound.

use serde_json::{json, Value};

use super::extremal::{relative_extremal_with, ExtremalFunction, Scheme, SweepOrder, DEFAULT_MAX_ITER, DEFAULT_TOL};
use super::problem::{CapacityProblem, Layout, NodeKind};
use crate::error::Result;
use crate::hessian::{is_m_positive, superform_constant, GridFunction};

/// Tolerance for accepting a candidate as m-subharmonic.
const CANDIDATE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct CapacityResult {
    pub value: f64,
    pub lower_bound: f64,
    pub extremal: ExtremalFunction,
}

impl CapacityResult {
    pub fn to_json(&self) -> Value {
        json!({
            "capacity": self.value,
            "lower_bound": self.lower_bound,
            "residual": self.extremal.residual,
            "iterations": self.extremal.iterations,
            "converged": self.extremal.converged,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub order: SweepOrder,
    pub scheme: Scheme,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, order: SweepOrder::Lexicographic, scheme: Scheme::Monotone }
    }
}

/// `c Σ_K σ_d(D²φ) s^N`; used for `d = 1`, where the five-point Laplacian is in
/// divergence form and this sum is the discrete mass of `K`.
pub fn mass_on_k(layout: &Layout, phi: &GridFunction) -> f64 {
    let n = layout.dim();
    let d = layout.degree;
    let c = superform_constant(d, n) as f64;
    layout.obstacle().map(|i| phi.hessian_at(i).sigmas()[d - 1]).sum::<f64>() * c * phi.cell_volume()
}

/// `∫ χ (dd φ)^d ∧ β^{N−d} = −(c/d) ∫ ∇χ · T_{d−1}(D²φ) ∇φ`, with `T` the Newton tensor.
///
/// Pointwise `σ_d` of a discrete Hessian does not converge across a kink for
/// `d ≥ 2`; the divergence form only needs second differences where `∇χ ≠ 0`.
pub fn tested_mass(layout: &Layout, phi: &GridFunction, chi: &[f64]) -> f64 {
    let g = &layout.grid;
    let n = g.n();
    let d = layout.degree;
    let c = superform_constant(d, n) as f64;
    if d == 2 {
        return c * quadratic_form_mass(g, phi, chi);
    }
    let mut sum = 0.0;
    for i in 0..g.len() {
        if !g.is_interior(i) {
            continue;
        }
        let gc = central_gradient(g, chi, i);
        if gc.iter().all(|x| *x == 0.0) {
            continue;
        }
        let gp = central_gradient(g, phi.values(), i);
        let t = newton_tensor(&phi.hessian_at(i).rows(), d - 1);
        for a in 0..n {
            for b in 0..n {
                sum += gc[a] * t[a][b] * gp[b];
            }
        }
    }
    -c / d as f64 * sum * g.cell_volume()
}

/// `∫ χ σ_2(D²φ) = ½ ∫ (∂_a∂_b χ ∂_aφ ∂_bφ − Δχ |∇φ|²)`: only first differences
/// of `φ`, which converge uniformly where its second differences do not.
fn quadratic_form_mass(g: &GridFunction, phi: &GridFunction, chi: &[f64]) -> f64 {
    let Ok(cg) = g.with_values(chi.to_vec()) else { return f64::NAN };
    let mut sum = 0.0;
    for i in 0..g.len() {
        if !g.is_interior(i) {
            continue;
        }
        let hc = cg.hessian_at(i).rows();
        if hc.iter().flatten().all(|x| *x == 0.0) {
            continue;
        }
        let gp = central_gradient(g, phi.values(), i);
        let lap: f64 = (0..gp.len()).map(|a| hc[a][a]).sum();
        let norm: f64 = gp.iter().map(|x| x * x).sum();
        let form: f64 = (0..gp.len()).flat_map(|a| (0..gp.len()).map(move |b| (a, b))).map(|(a, b)| hc[a][b] * gp[a] * gp[b]).sum();
        sum += 0.5 * (form - lap * norm);
    }
    sum * g.cell_volume()
}

fn central_gradient(g: &GridFunction, v: &[f64], i: usize) -> Vec<f64> {
    let st = g.strides();
    let h = g.spacing();
    (0..g.n()).map(|a| (v[i + st[a]] - v[i - st[a]]) / (2.0 * h[a])).collect()
}

/// `T_0 = I`, `T_k = σ_k(H) I − H T_{k−1}`.
fn newton_tensor(h: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let n = h.len();
    let sig = crate::hessian::SymmetricMatrix::from_rows(h).map(|m| m.sigmas()).unwrap_or_default();
    let mut t: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| (a == b) as u8 as f64).collect()).collect();
    for j in 1..=k {
        let mut next = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let ht: f64 = (0..n).map(|l| h[a][l] * t[l][b]).sum();
                next[a][b] = if a == b { sig[j - 1] } else { 0.0 } - ht;
            }
        }
        t = next;
    }
    t
}

/// Euclidean distance from every node to the nearest node of `targets`.
fn distance_to(g: &GridFunction, targets: &[usize]) -> Vec<f64> {
    let pts: Vec<Vec<f64>> = targets.iter().map(|&i| g.point(i)).collect();
    (0..g.len())
        .map(|i| {
            let x = g.point(i);
            pts.iter()
                .map(|p| p.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect()
}

/// Nodes of kind `inner` with a neighbour (along an axis) of another kind.
fn rim(layout: &Layout, inner: impl Fn(NodeKind) -> bool) -> Vec<usize> {
    let g = &layout.grid;
    let st = g.strides();
    let res = g.resolution();
    (0..g.len())
        .filter(|&i| {
            let idx = g.multi_index(i);
            inner(layout.kinds[i])
                && (0..g.n()).any(|a| {
                    (idx[a] > 0 && !inner(layout.kinds[i - st[a]])) || (idx[a] + 1 < res[a] && !inner(layout.kinds[i + st[a]]))
                })
        })
        .collect()
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// 1 on `K`, 0 off `D`, smooth in between.
///
/// Distance functions have kinks on the medial axis, which is where the extremal
/// function has its ridges; the cutoff is blurred at a fixed physical width so
/// `∇χ` is continuous across them.
pub fn outer_cutoff(layout: &Layout) -> Vec<f64> {
    let dk = distance_to(&layout.grid, &rim(layout, |k| k == NodeKind::Obstacle));
    let dd = distance_to(&layout.grid, &rim(layout, |k| k == NodeKind::Outside));
    let mut chi: Vec<f64> = (0..layout.kinds.len())
        .map(|i| match layout.kinds[i] {
            NodeKind::Obstacle => 1.0,
            NodeKind::Outside => 0.0,
            NodeKind::Free => 1.0 - smoothstep((dk[i] / (dk[i] + dd[i]) - 0.25) * 2.0),
        })
        .collect();
    let longest = layout.grid.resolution().iter().copied().max().unwrap_or(3);
    let passes = ((longest as f64 / 16.0).powi(2).round() as usize).max(2);
    blur(layout, &mut chi, passes);
    chi
}

/// Repeated `[1/4, 1/2, 1/4]` averaging along each axis, holding `K` at 1 and the
/// complement of `D` at 0.
fn blur(layout: &Layout, v: &mut [f64], passes: usize) {
    let g = &layout.grid;
    let st = g.strides();
    let res = g.resolution();
    for _ in 0..passes {
        for a in 0..g.n() {
            let prev = v.to_vec();
            for i in 0..v.len() {
                if layout.kinds[i] != NodeKind::Free {
                    continue;
                }
                let x = g.multi_index(i)[a];
                let lo = if x > 0 { prev[i - st[a]] } else { prev[i] };
                let hi = if x + 1 < res[a] { prev[i + st[a]] } else { prev[i] };
                v[i] = 0.25 * lo + 0.5 * prev[i] + 0.25 * hi;
            }
        }
    }
}

/// Supported in `K`, at most 1, reaching 1 at half the inradius of `K`.
pub fn inner_cutoff(layout: &Layout) -> Vec<f64> {
    let outside: Vec<usize> = rim(layout, |k| k != NodeKind::Obstacle);
    let depth = distance_to(&layout.grid, &outside);
    let width = 0.5 * layout.obstacle().map(|i| depth[i]).fold(0.0, f64::max);
    (0..layout.kinds.len())
        .map(|i| if layout.kinds[i] == NodeKind::Obstacle && width > 0.0 { smoothstep(depth[i] / width) } else { 0.0 })
        .collect()
}

/// The capacity functional at the extremal competitor `φ = 1 + u`.
pub fn extremal_mass(layout: &Layout, phi: &GridFunction) -> f64 {
    if layout.degree == 1 {
        mass_on_k(layout, phi)
    } else {
        tested_mass(layout, phi, &outer_cutoff(layout))
    }
}

pub fn capacity(prob: &CapacityProblem) -> Result<CapacityResult> {
    capacity_with(prob, SolveOptions::default())
}

pub fn capacity_with(prob: &CapacityProblem, opts: SolveOptions) -> Result<CapacityResult> {
    let layout = prob.layout()?;
    let extremal = relative_extremal_with(prob, opts.tol, opts.max_iter, opts.order, opts.scheme)?;
    if layout.obstacle().next().is_none() {
        return Ok(CapacityResult { value: 0.0, lower_bound: 0.0, extremal });
    }
    let phi = extremal.u.with_values(extremal.u.values().iter().map(|v| 1.0 + v).collect())?;
    let value = extremal_mass(&layout, &phi);
    let lower_bound = candidate_lower_bound(&layout)?;
    Ok(CapacityResult { value, lower_bound, extremal })
}

/// Is `phi` an admissible competitor: `0 ≤ φ ≤ 1` on the grid and
/// m-subharmonic at every node of `D`?
pub fn admissible(layout: &Layout, phi: &GridFunction, degree: usize) -> bool {
    phi.values().iter().all(|v| (-CANDIDATE_TOL..=1.0 + CANDIDATE_TOL).contains(v))
        && (0..phi.len())
            .filter(|&i| layout.kinds[i] != NodeKind::Outside)
            .all(|i| is_m_positive(&phi.hessian_at(i), degree, CANDIDATE_TOL))
}

/// Affine directions used by the polyhedral candidates (at most 7, plus the zero
/// function). Kinks along axes and diagonals keep the central-difference Hessian
/// in the cone, so `±e_i` are used while they fit.
fn directions(n: usize) -> Vec<Vec<f64>> {
    if 2 * n <= 7 {
        (0..2 * n).map(|k| (0..n).map(|j| if j == k / 2 { 1.0 - 2.0 * (k % 2) as f64 } else { 0.0 }).collect()).collect()
    } else {
        // vertices of a simplex centred at the origin
        let mut v: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|j| (j == k) as u8 as f64).collect()).collect();
        v.push(vec![-1.0 / n as f64; n]);
        v
    }
}

/// The candidate functions: a quadratic bump, polyhedral cones `max(0, ℓ_1, …)` around
/// the centroid of `K`, and averages of one-variable cones `max(0, ±x_a − t)`.
pub fn candidates(layout: &Layout) -> Result<Vec<GridFunction>> {
    let g = &layout.grid;
    let pts: Vec<Vec<f64>> = (0..g.len()).map(|i| g.point(i)).collect();
    let k: Vec<usize> = layout.obstacle().collect();
    if k.is_empty() {
        return Ok(Vec::new());
    }
    let n = g.n();
    let mut c = vec![0.0; n];
    for &i in &k {
        for (a, x) in c.iter_mut().zip(&pts[i]) {
            *a += x / k.len() as f64;
        }
    }
    let dist2 = |x: &[f64]| x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let r2 = pts.iter().map(|x| dist2(x)).fold(0.0, f64::max);
    let mut out = vec![g.with_values(pts.iter().map(|x| dist2(x) / r2).collect())?];

    let dirs = directions(n);
    let proj = |x: &[f64], d: &[f64]| x.iter().zip(&c).zip(d).map(|((a, b), e)| (a - b) * e).sum::<f64>();
    let reach: Vec<f64> = dirs.iter().map(|d| pts.iter().map(|x| proj(x, d)).fold(f64::NEG_INFINITY, f64::max)).collect();
    let support = dirs
        .iter()
        .map(|d| k.iter().map(|&i| proj(&pts[i], d)).fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    let axial: Vec<f64> = (0..n).map(|a| pts.iter().map(|x| (x[a] - c[a]).abs()).fold(0.0, f64::max)).collect();
    for j in 0..=8 {
        let t = support * j as f64 / 8.0;
        let vals = pts
            .iter()
            .map(|x| {
                dirs.iter()
                    .zip(&reach)
                    .map(|(d, r)| if *r > t { (proj(x, d) - t) / (r - t) } else { 0.0 })
                    .fold(0.0, f64::max)
            })
            .collect();
        out.push(g.with_values(vals)?);
        // the same zero set with every kink parallel to an axis
        let vals = pts
            .iter()
            .map(|x| {
                (0..n)
                    .map(|a| {
                        if axial[a] > t {
                            (((x[a] - c[a]).abs() - t) / (axial[a] - t)).max(0.0)
                        } else {
                            0.0
                        }
                    })
                    .sum::<f64>()
                    / n as f64
            })
            .collect();
        out.push(g.with_values(vals)?);
    }
    Ok(out)
}

/// Best value of the capacity functional over the admissible candidates. For
/// `d ≥ 2` the mass of `K` is bounded below by testing against the inner cutoff.
pub fn candidate_lower_bound(layout: &Layout) -> Result<f64> {
    let chi = if layout.degree == 1 { Vec::new() } else { inner_cutoff(layout) };
    Ok(candidates(layout)?
        .iter()
        .filter(|phi| admissible(layout, phi, layout.degree))
        .map(|phi| if layout.degree == 1 { mass_on_k(layout, phi) } else { tested_mass(layout, phi, &chi) })
        .fold(0.0, f64::max))
}
