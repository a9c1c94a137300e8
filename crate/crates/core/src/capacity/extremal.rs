//! Nondecreasing Perron iteration for the discrete relative extremal function.

use serde_json::{json, Value};

use super::problem::{CapacityProblem, Layout, NodeKind};
use super::stencil::{constraints, Constraint};
use crate::error::Result;
use crate::hessian::{is_m_positive, GridFunction, SymmetricMatrix};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 200_000;
const BISECTION_STEPS: usize = 40;

/// How a node update decides membership in Γ_m.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    /// Nonnegative combinations of directional second differences (see `stencil`).
    #[default]
    Monotone,
    /// The central-difference Hessian must lie in Γ_m; found by bisection. Not
    /// monotone for `m ≥ 2`: from a subsolution the iteration can stall short of
    /// the extremal function.
    CentralDifference,
}

/// Node visiting order within a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SweepOrder {
    /// Sequential, lexicographic.
    #[default]
    Lexicographic,
    /// Nodes grouped by coordinate parity (the red-black splitting for the
    /// full 3^n stencil); each group is updated in parallel.
    Colored,
}

#[derive(Clone, Debug)]
pub struct ExtremalFunction {
    pub u: GridFunction,
    /// Sup-norm change of the last sweep.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ExtremalFunction {
    pub fn to_json(&self) -> Value {
        json!({
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
        })
    }
}

const CROSSING_STEPS: usize = 40;

/// `c` at node `i` with every arm that leaves `D` cut where it crosses the boundary.
fn shorten(layout: &Layout, i: usize, c: &Constraint) -> Constraint {
    let g = &layout.grid;
    let x = g.point(i);
    let h = g.spacing();
    let arm = |t: &super::stencil::Term, sign: f64| -> f64 {
        let j = (i as isize + sign as isize * t.offset) as usize;
        if layout.kinds[j] != NodeKind::Outside {
            return 1.0;
        }
        let at = |s: f64| -> Vec<f64> { x.iter().zip(&t.step).zip(&h).map(|((p, d), hh)| p + sign * s * *d as f64 * hh).collect() };
        if layout.region.contains(&at(1.0)) != Some(false) {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..CROSSING_STEPS {
            let mid = 0.5 * (lo + hi);
            if layout.region.contains(&at(mid)) == Some(true) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.max(1e-3)
    };
    let arms: Vec<(f64, f64)> = c.terms.iter().map(|t| (arm(t, 1.0), arm(t, -1.0))).collect();
    c.shortened(&arms)
}

/// Iteration state; exposed so callers can step sweep by sweep.
pub struct ExtremalSolver {
    pub layout: Layout,
    values: Vec<f64>,
    free: Vec<usize>,
    colors: Vec<Vec<usize>>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
    scheme: Scheme,
    stencil: Vec<Constraint>,
    /// Free nodes too close to the grid edge or to the complement of `D` for the
    /// shared stencil, with their own constraints.
    local: std::collections::HashMap<usize, Vec<Constraint>>,
}

impl ExtremalSolver {
    pub fn new(layout: Layout) -> Self {
        Self::with_scheme(layout, Scheme::default())
    }

    pub fn with_scheme(layout: Layout, scheme: Scheme) -> Self {
        let g = &layout.grid;
        let values = initial_competitor(&layout);
        let free: Vec<usize> = (0..g.len()).filter(|&i| layout.kinds[i] == NodeKind::Free).collect();
        let mut colors = vec![Vec::new(); 1 << g.n()];
        for &i in &free {
            let c = g.multi_index(i).iter().enumerate().fold(0, |acc, (a, x)| acc | (x & 1) << a);
            colors[c].push(i);
        }
        colors.retain(|c| !c.is_empty());
        let stencil = if scheme == Scheme::Monotone { constraints(g, layout.degree) } else { Vec::new() };
        let reach = stencil.iter().map(Constraint::reach).max().unwrap_or(1);
        let mut local = std::collections::HashMap::new();
        for &i in &free {
            let idx = g.multi_index(i);
            let near_edge = idx.iter().zip(g.resolution()).any(|(&a, &r)| a < reach || a + reach >= r);
            let fitting: Vec<&Constraint> = stencil.iter().filter(|c| !near_edge || c.fits(&idx, g.resolution())).collect();
            let cut = fitting.iter().any(|c| {
                c.terms.iter().any(|t| {
                    [t.offset, -t.offset].iter().any(|o| layout.kinds[(i as isize + o) as usize] == NodeKind::Outside)
                })
            });
            if near_edge || cut {
                local.insert(i, fitting.into_iter().map(|c| shorten(&layout, i, c)).collect());
            }
        }
        Self { spacing: g.spacing(), strides: g.strides(), values, free, colors, layout, scheme, stencil, local }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// One sweep; returns the sup-norm change.
    pub fn sweep(&mut self, order: SweepOrder) -> f64 {
        match order {
            SweepOrder::Lexicographic => {
                let mut change: f64 = 0.0;
                for idx in 0..self.free.len() {
                    let i = self.free[idx];
                    let new = self.update(i, &self.values);
                    if new > self.values[i] {
                        change = change.max(new - self.values[i]);
                        self.values[i] = new;
                    }
                }
                change
            }
            SweepOrder::Colored => {
                let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(16);
                let mut change: f64 = 0.0;
                for color in 0..self.colors.len() {
                    let nodes = &self.colors[color];
                    let chunk = nodes.len().div_ceil(threads).max(1);
                    let this = &*self;
                    let updates: Vec<f64> = std::thread::scope(|s| {
                        let handles: Vec<_> = nodes
                            .chunks(chunk)
                            .map(|c| s.spawn(move || c.iter().map(|&i| this.update(i, &this.values)).collect::<Vec<_>>()))
                            .collect();
                        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
                    });
                    for (&i, new) in self.colors[color].iter().zip(updates) {
                        if new > self.values[i] {
                            change = change.max(new - self.values[i]);
                            self.values[i] = new;
                        }
                    }
                }
                change
            }
        }
    }

    /// Hessian at `i` with the centre value replaced by 0.
    fn base_hessian(&self, i: usize, u: &[f64]) -> SymmetricMatrix {
        let n = self.spacing.len();
        let (h, st) = (&self.spacing, &self.strides);
        let mut m = SymmetricMatrix::zeros(n);
        for a in 0..n {
            m.set(a, a, (u[i + st[a]] + u[i - st[a]]) / (h[a] * h[a]));
            for b in a + 1..n {
                let v = u[i + st[a] + st[b]] - u[i + st[a] - st[b]] - u[i - st[a] + st[b]] + u[i - st[a] - st[b]];
                m.set(a, b, v / (4.0 * h[a] * h[b]));
            }
        }
        m
    }

    /// Largest `t ≤ 0` keeping node `i` admissible, never below the current value.
    fn update(&self, i: usize, u: &[f64]) -> f64 {
        let t = match self.scheme {
            Scheme::Monotone => match self.local.get(&i) {
                Some(cs) => cs.iter().map(|c| c.bound(i, u)).fold(0.0, f64::min),
                None => self.stencil.iter().map(|c| c.bound(i, u)).fold(0.0, f64::min),
            },
            Scheme::CentralDifference => self.central_update(i, u),
        };
        t.min(0.0).max(u[i])
    }

    fn central_update(&self, i: usize, u: &[f64]) -> f64 {
        let m = self.layout.degree;
        let h0 = self.base_hessian(i, u);
        let n = h0.n();
        let inv: Vec<f64> = self.spacing.iter().map(|s| 1.0 / (s * s)).collect();
        let shifted = |t: f64| {
            let mut x = h0.clone();
            for a in 0..n {
                x.set(a, a, h0.get(a, a) - 2.0 * t * inv[a]);
            }
            x
        };
        let isotropic = self.spacing.iter().all(|s| *s == self.spacing[0]);
        let root = if m == 1 {
            (0..n).map(|a| h0.get(a, a)).sum::<f64>() / (2.0 * inv.iter().sum::<f64>())
        } else if n == 2 && m == 2 && isotropic {
            let (a, b, c) = (h0.get(0, 0), h0.get(0, 1), h0.get(1, 1));
            let lmin = 0.5 * (a + c) - (0.25 * (a - c) * (a - c) + b * b).sqrt();
            0.5 * lmin / inv[0]
        } else {
            let ok = |t: f64| is_m_positive(&shifted(t), m, 0.0);
            if ok(0.0) {
                0.0
            } else {
                // Gershgorin: the shifted matrix is PSD once 2|t|/s² dominates every row sum
                let rows = h0.rows();
                let r = rows.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
                let smax = inv.iter().fold(f64::INFINITY, |acc: f64, x| acc.min(*x));
                let (mut lo, mut hi) = (-0.5 * r / smax - 1e-12, 0.0);
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    if ok(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        };
        root
    }

    pub fn run(&mut self, tol: f64, max_iter: usize, order: SweepOrder) -> (f64, usize, bool) {
        let mut residual = f64::INFINITY;
        for it in 1..=max_iter {
            residual = self.sweep(order);
            if residual < tol {
                return (residual, it, true);
            }
        }
        if self.free.is_empty() {
            return (0.0, 0, true);
        }
        (residual, max_iter, false)
    }

    pub fn into_extremal(self, residual: f64, iterations: usize, converged: bool) -> Result<ExtremalFunction> {
        Ok(ExtremalFunction { u: self.layout.grid.with_values(self.values)?, residual, iterations, converged })
    }
}

/// `max(−1, a(|x − c|² − R²))` on free nodes: a convex competitor equal to −1 on `K`,
/// so the iteration does not have to climb out of a flat start.
fn initial_competitor(layout: &Layout) -> Vec<f64> {
    let g = &layout.grid;
    let k: Vec<usize> = layout.obstacle().collect();
    let mut out: Vec<f64> = layout.kinds.iter().map(|k| if *k == NodeKind::Outside { 0.0 } else { -1.0 }).collect();
    if k.is_empty() {
        return out;
    }
    let n = g.n();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for &i in &k {
        for (a, x) in g.point(i).into_iter().enumerate() {
            lo[a] = lo[a].min(x);
            hi[a] = hi[a].max(x);
        }
    }
    let c: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let d2 = |i: usize| g.point(i).iter().zip(&c).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let rho2 = k.iter().map(|&i| d2(i)).fold(0.0, f64::max);
    // over every node, so the quadratic stays below the fixed zeros off D
    let r2 = (0..g.len()).map(d2).fold(0.0, f64::max);
    if r2 <= rho2 {
        return out;
    }
    for i in 0..g.len() {
        if layout.kinds[i] == NodeKind::Free {
            out[i] = ((d2(i) - r2) / (r2 - rho2)).max(-1.0);
        }
    }
    out
}

pub fn relative_extremal(prob: &CapacityProblem, tol: f64, max_iter: usize) -> Result<ExtremalFunction> {
    relative_extremal_with(prob, tol, max_iter, SweepOrder::Lexicographic, Scheme::default())
}

pub fn relative_extremal_with(
    prob: &CapacityProblem,
    tol: f64,
    max_iter: usize,
    order: SweepOrder,
    scheme: Scheme,
) -> Result<ExtremalFunction> {
    let mut solver = ExtremalSolver::with_scheme(prob.layout()?, scheme);
    // with K empty the start is already a fixed point away from the obstacle
    if solver.layout.obstacle().next().is_none() {
        solver.values.iter_mut().for_each(|v| *v = 0.0);
        return solver.into_extremal(0.0, 0, true);
    }
    let (r, it, ok) = solver.run(tol, max_iter, order);
    solver.into_extremal(r, it, ok)
}
