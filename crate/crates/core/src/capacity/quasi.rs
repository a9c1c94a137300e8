//! The quasicontinuity experiment and the numerical pluripolarity surrogate.

use serde_json::{json, Value};

use super::functional::{capacity_with, SolveOptions};
use super::mask::MaskSpec;
use super::problem::{CapacityProblem, MARGIN};
use crate::error::Result;
use crate::hessian::{mollify, GridFunction};

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiRow {
    pub k: usize,
    pub h: f64,
    pub threshold: f64,
    /// Number of grid nodes in `G_k`.
    pub nodes: usize,
    pub capacity: f64,
    pub lower_bound: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiReport {
    pub m: usize,
    pub eps: f64,
    pub rows: Vec<QuasiRow>,
    /// First `k` with `cap(G_k) < eps`.
    pub first_below: Option<usize>,
}

impl QuasiReport {
    pub fn nonincreasing(&self, tol: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].capacity <= w[0].capacity + tol)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "eps": self.eps,
            "first_below": self.first_below,
            "rows": self.rows.iter().map(|r| json!({
                "k": r.k,
                "h": r.h,
                "threshold": r.threshold,
                "nodes": r.nodes,
                "capacity": r.capacity,
                "lower_bound": r.lower_bound,
                "converged": r.converged,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuasiOptions {
    /// Mollifier radius at `k = 1`; `h_k = h_1 / k`.
    pub h1: f64,
    pub max_k: usize,
    pub solve: SolveOptions,
}

impl QuasiOptions {
    pub fn for_grid(u: &GridFunction) -> Self {
        let side = u.bounds().iter().map(|(a, b)| crate::rational::to_f64(&(b - a))).fold(f64::INFINITY, f64::min);
        Self { h1: side / 4.0, max_k: 12, solve: SolveOptions::default() }
    }
}

/// Mollify `u` at `h_k`, form `G_k = {u_{h_k} > u + 1/k}` and compute `cap_m(G_k, D)`
/// with `D` the box of `u`. Stops at the first `k` with capacity below `eps`, or when
/// `h_k` drops below the grid spacing.
pub fn quasicontinuity_experiment(u: &GridFunction, m: usize, eps: f64) -> Result<QuasiReport> {
    quasicontinuity_experiment_with(u, m, eps, QuasiOptions::for_grid(u))
}

pub fn quasicontinuity_experiment_with(u: &GridFunction, m: usize, eps: f64, opts: QuasiOptions) -> Result<QuasiReport> {
    let spacing = u.spacing().into_iter().fold(0.0, f64::max);
    let base = CapacityProblem::new(u.bounds().to_vec(), u.resolution().to_vec(), MaskSpec::empty(), m);
    let mut rows = Vec::new();
    let mut first_below = None;
    for k in 1..=opts.max_k {
        let h = opts.h1 / k as f64;
        if h < spacing {
            break;
        }
        let smooth = match mollify(u, h) {
            Ok(s) => s,
            Err(_) => break,
        };
        let threshold = 1.0 / k as f64;
        let nodes = exceedance(u, &smooth, threshold);
        let res = capacity_with(&base.with_k(MaskSpec::Nodes(nodes.clone())), opts.solve)?;
        rows.push(QuasiRow {
            k,
            h,
            threshold,
            nodes: nodes.len(),
            capacity: res.value,
            lower_bound: res.lower_bound,
            converged: res.extremal.converged,
        });
        if res.value < eps {
            first_below = Some(k);
            break;
        }
    }
    Ok(QuasiReport { m, eps, rows, first_below })
}

/// Nodes of `u`'s grid where the mollified function exceeds `u + threshold`,
/// keeping the margin that makes `G` compact in `D`.
fn exceedance(u: &GridFunction, smooth: &GridFunction, threshold: f64) -> Vec<usize> {
    let n = u.n();
    let s = u.spacing();
    let offset: Vec<usize> = (0..n).map(|a| ((smooth.lo()[a] - u.lo()[a]) / s[a]).round() as usize).collect();
    let res = u.resolution();
    let mut out = Vec::new();
    for j in 0..smooth.len() {
        let idx: Vec<usize> = smooth.multi_index(j).iter().zip(&offset).map(|(a, b)| a + b).collect();
        if idx.iter().zip(res).any(|(&i, &r)| i < MARGIN + 1 || i + MARGIN + 1 >= r) {
            continue;
        }
        let i = u.index_of(&idx);
        if smooth.values()[j] > u.values()[i] + threshold {
            out.push(i);
        }
    }
    out
}

/// Numerical surrogate for `(V, m)`-pluripolarity: the computed capacity of `E`
/// is below `threshold`. This is evidence at one resolution, not a proof.
pub fn pluripolar_test(e: &MaskSpec, prob: &CapacityProblem, threshold: f64) -> Result<bool> {
    pluripolar_test_with(e, prob, threshold, SolveOptions::default())
}

pub fn pluripolar_test_with(e: &MaskSpec, prob: &CapacityProblem, threshold: f64, opts: SolveOptions) -> Result<bool> {
    Ok(capacity_with(&prob.with_k(e.clone()), opts)?.value < threshold)
}
