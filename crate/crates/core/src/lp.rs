//! Dense two-phase simplex over exact rationals, Bland's rule.
//!
//! The right-hand side may live in an ordered extension of the rationals
//! (`Eps`, i.e. `a + b·ε` with ε an infinitesimal), since pivoting only ever
//! scales right-hand sides by rational factors. That is what makes
//! "for all sufficiently small ε > 0" feasibility questions exact.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{Signed, Zero};

use crate::rational::Q;

pub trait Scalar: Clone + Ord + Debug {
    fn nil() -> Self;
    fn from_q(q: Q) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, k: &Q) -> Self;

    fn sign(&self) -> Ordering {
        self.cmp(&Self::nil())
    }
}

impl Scalar for Q {
    fn nil() -> Self {
        <Q as Zero>::zero()
    }
    fn from_q(q: Q) -> Self {
        q
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, k: &Q) -> Self {
        self * k
    }
}

/// `base + eps·ε` for an infinitesimal ε > 0, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Eps {
    pub base: Q,
    pub eps: Q,
}

impl Eps {
    pub fn new(base: Q, eps: Q) -> Self {
        Self { base, eps }
    }
    pub fn constant(base: Q) -> Self {
        Self { base, eps: <Q as Zero>::zero() }
    }
}

impl Scalar for Eps {
    fn nil() -> Self {
        Eps::constant(<Q as Zero>::zero())
    }
    fn from_q(q: Q) -> Self {
        Eps::constant(q)
    }
    fn add(&self, o: &Self) -> Self {
        Eps::new(&self.base + &o.base, &self.eps + &o.eps)
    }
    fn sub(&self, o: &Self) -> Self {
        Eps::new(&self.base - &o.base, &self.eps - &o.eps)
    }
    fn scale(&self, k: &Q) -> Self {
        Eps::new(&self.base * k, &self.eps * k)
    }
}

/// A row `coeffs · x (≤ | =) rhs`.
#[derive(Clone, Debug)]
pub struct Row<R> {
    pub coeffs: Vec<Q>,
    pub rhs: R,
}

impl<R> Row<R> {
    pub fn new(coeffs: Vec<Q>, rhs: R) -> Self {
        Self { coeffs, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult<R> {
    Infeasible,
    Unbounded,
    Optimal { value: R, point: Vec<R> },
}

impl<R> LpResult<R> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpResult::Infeasible)
    }
}

/// Maximizes `objective · x` over free `x ∈ R^n` subject to `ineqs` (≤) and `eqs` (=).
pub fn maximize<R: Scalar>(n: usize, objective: &[Q], ineqs: &[Row<R>], eqs: &[Row<R>]) -> LpResult<R> {
    Tableau::build(n, ineqs, eqs).solve(objective)
}

/// Any feasible point, or `None`.
pub fn feasible_point<R: Scalar>(n: usize, ineqs: &[Row<R>], eqs: &[Row<R>]) -> Option<Vec<R>> {
    let zero = vec![<Q as Zero>::zero(); n];
    match maximize(n, &zero, ineqs, eqs) {
        LpResult::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

struct Tableau<R> {
    n: usize,
    rows: Vec<Vec<Q>>,
    rhs: Vec<R>,
    basis: Vec<usize>,
    ncols: usize,
    first_artificial: usize,
}

impl<R: Scalar> Tableau<R> {
    fn build(n: usize, ineqs: &[Row<R>], eqs: &[Row<R>]) -> Self {
        let m_i = ineqs.len();
        let m = m_i + eqs.len();
        let first_artificial = 2 * n + m_i;
        let ncols = first_artificial + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let all = ineqs.iter().map(|r| (r, true)).chain(eqs.iter().map(|r| (r, false)));
        for (i, (row, is_ineq)) in all.enumerate() {
            assert_eq!(row.coeffs.len(), n, "constraint width");
            let mut t = vec![<Q as Zero>::zero(); ncols];
            for (k, a) in row.coeffs.iter().enumerate() {
                t[k] = a.clone();
                t[n + k] = -a;
            }
            if is_ineq {
                t[2 * n + i] = Q::from_integer(1.into());
            }
            let mut b = row.rhs.clone();
            let negative = b.sign() == Ordering::Less;
            if negative {
                for x in t.iter_mut() {
                    *x = -&*x;
                }
                b = b.scale(&Q::from_integer((-1).into()));
            }
            if is_ineq && !negative {
                basis.push(2 * n + i);
            } else {
                t[first_artificial + i] = Q::from_integer(1.into());
                basis.push(first_artificial + i);
            }
            rows.push(t);
            rhs.push(b);
        }
        Tableau { n, rows, rhs, basis, ncols, first_artificial }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        let inv = Q::from_integer(1.into()) / &p;
        for x in self.rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        self.rhs[r] = self.rhs[r].scale(&inv);
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &f * y;
                }
            }
            self.rhs[i] = self.rhs[i].sub(&pivot_rhs.scale(&f));
        }
        self.basis[r] = c;
    }

    /// Runs primal simplex for `cost` restricted to columns `< limit`. Returns false if unbounded.
    fn run(&mut self, cost: &[Q], limit: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        d -= &cost[b] * &self.rows[i][j];
                    }
                }
                if d.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, R)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].scale(&(Q::from_integer(1.into()) / a));
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => match ratio.cmp(&br) {
                        Ordering::Less => Some((i, ratio)),
                        Ordering::Equal if self.basis[i] < self.basis[bi] => Some((i, ratio)),
                        _ => Some((bi, br)),
                    },
                };
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn value(&self, cost: &[Q]) -> R {
        let mut v = R::nil();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() {
                v = v.add(&self.rhs[i].scale(&cost[b]));
            }
        }
        v
    }

    fn solve(mut self, objective: &[Q]) -> LpResult<R> {
        let minus_one = Q::from_integer((-1).into());
        if self.basis.iter().any(|&b| b >= self.first_artificial) {
            let mut cost = vec![<Q as Zero>::zero(); self.ncols];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = minus_one.clone();
            }
            self.run(&cost, self.ncols);
            if self.value(&cost).sign() == Ordering::Less {
                return LpResult::Infeasible;
            }
            // drive remaining artificials out of the basis, dropping redundant rows
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                        Some(j) => self.pivot(i, j),
                        None => {
                            self.rows.remove(i);
                            self.rhs.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let n = self.n;
        let mut cost = vec![<Q as Zero>::zero(); self.ncols];
        for k in 0..n {
            cost[k] = objective[k].clone();
            cost[n + k] = -&objective[k];
        }
        if !self.run(&cost, self.first_artificial) {
            return LpResult::Unbounded;
        }
        let mut vals = vec![R::nil(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            vals[b] = self.rhs[i].clone();
        }
        let point = (0..n).map(|k| vals[k].sub(&vals[n + k])).collect();
        LpResult::Optimal { value: self.value(&cost), point }
    }
}
