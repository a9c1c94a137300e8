//! Monotone discretization of the cone Γ_m by directional second differences.
//!
//! `H ∈ Γ_m` iff `⟨A, H⟩ ≥ 0` for all `A` in the dual cone, which is generated by
//! the gradients `∇σ_m` at boundary points of Γ_m. Taking `A = Σ μ_j ν_j ν_jᵀ` over
//! orthogonal frames `ν` of grid vectors turns each test into a nonnegative
//! combination of second differences, so the scheme is monotone.

use crate::hessian::GridFunction;
use crate::linalg::subsets;

#[derive(Clone, Debug)]
pub struct Term {
    /// Direction in index space.
    pub step: Vec<isize>,
    pub offset: isize,
    /// Coefficients of `u(x + ν)` and `u(x − ν)`; both `μ / |ν|²` for a full arm.
    pub plus: f64,
    pub minus: f64,
}

/// `Σ_j (p_j u(x + ν_j) + q_j u(x − ν_j)) − (Σ_j p_j + q_j) u(x) ≥ 0`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub total: f64,
}

impl Constraint {
    /// Largest centre value satisfying the constraint.
    pub fn bound(&self, i: usize, u: &[f64]) -> f64 {
        let s: f64 = self
            .terms
            .iter()
            .map(|t| t.plus * u[(i as isize + t.offset) as usize] + t.minus * u[(i as isize - t.offset) as usize])
            .sum();
        s / self.total
    }

    /// The same test with arm `j` cut to the fractions `arms[j] = (a⁺, a⁻)` of `ν_j`,
    /// where the cut ends carry the boundary value 0 (which the fixed neighbour
    /// beyond already holds). Uses the three-point second difference on unequal arms.
    pub fn shortened(&self, arms: &[(f64, f64)]) -> Constraint {
        let terms: Vec<Term> = self
            .terms
            .iter()
            .zip(arms)
            .map(|(t, &(a, b))| {
                let w = t.plus * 2.0 / (a + b);
                Term { plus: w / a, minus: w / b, ..t.clone() }
            })
            .collect();
        let total = terms.iter().map(|t| t.plus + t.minus).sum();
        Constraint { terms, total }
    }

    pub fn fits(&self, idx: &[usize], res: &[usize]) -> bool {
        self.terms.iter().all(|t| {
            idx.iter().zip(&t.step).zip(res).all(|((&i, &d), &r)| {
                let d = d.unsigned_abs();
                i >= d && i + d < r
            })
        })
    }

    /// Largest component of any step.
    pub fn reach(&self) -> usize {
        self.terms.iter().flat_map(|t| t.step.iter().map(|d| d.unsigned_abs())).max().unwrap_or(0)
    }
}

/// Orthogonal frames of integer vectors: the axes, and for every pair of axes with
/// equal spacing the rotations spanned by (1,1), (1,2) and (2,1).
fn frames(n: usize, spacing: &[f64], rotate: bool) -> Vec<Vec<Vec<isize>>> {
    let unit = |a: usize| (0..n).map(|j| (j == a) as isize).collect::<Vec<_>>();
    let mut out = vec![(0..n).map(unit).collect::<Vec<_>>()];
    if !rotate {
        return out;
    }
    for a in 0..n {
        for b in a + 1..n {
            if spacing[a] != spacing[b] {
                continue;
            }
            for (p, q) in [(1, 1), (1, 2), (2, 1)] {
                let mut f: Vec<Vec<isize>> = (0..n).filter(|&c| c != a && c != b).map(unit).collect();
                let mut v = vec![0; n];
                v[a] = p;
                v[b] = q;
                let mut w = vec![0; n];
                w[a] = q;
                w[b] = -p;
                f.push(v);
                f.push(w);
                out.push(f);
            }
        }
    }
    out
}

fn sigma(xs: &[f64], k: usize) -> f64 {
    // elementary symmetric polynomial by the usual recurrence
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &x in xs {
        for j in (1..=k).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e[k]
}

/// Generators of a polyhedral inner approximation of the dual eigenvalue cone:
/// indicators of `(n − m + 1)`-subsets and `∇σ_m` at the permutations of
/// `(1, …, 1, −(n − m)/m)`.
pub fn dual_weights(n: usize, m: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for s in subsets(n, n - m + 1) {
        out.push((0..n).map(|j| s.contains(&j) as u8 as f64).collect());
    }
    if m >= 2 && m < n {
        let c = (n - m) as f64 / m as f64;
        for neg in 0..n {
            let p: Vec<f64> = (0..n).map(|j| if j == neg { -c } else { 1.0 }).collect();
            let grad: Vec<f64> = (0..n)
                .map(|i| {
                    let rest: Vec<f64> = p.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect();
                    sigma(&rest, m - 1)
                })
                .collect();
            out.push(grad);
        }
    }
    out
}

/// The constraints at a node of `grid` for degree `m`. Degree 1 keeps to the axis
/// frame (the five-point Laplacian).
pub fn constraints(grid: &GridFunction, m: usize) -> Vec<Constraint> {
    let n = grid.n();
    let h = grid.spacing();
    let st = grid.strides();
    let mut out: Vec<Constraint> = Vec::new();
    let mut seen: Vec<Vec<(Vec<isize>, u64)>> = Vec::new();
    for frame in frames(n, &h, m > 1) {
        for mu in dual_weights(n, m) {
            let mut terms = Vec::new();
            let mut key = Vec::new();
            for (v, w) in frame.iter().zip(&mu) {
                if *w == 0.0 {
                    continue;
                }
                let len2: f64 = v.iter().zip(&h).map(|(d, s)| (*d as f64 * s).powi(2)).sum();
                let offset: isize = v.iter().zip(&st).map(|(d, s)| d * *s as isize).sum();
                // ν and −ν give the same second difference
                let canon = if v.iter().find(|d| **d != 0).is_some_and(|d| *d < 0) { v.iter().map(|d| -d).collect() } else { v.clone() };
                key.push((canon, w.to_bits()));
                terms.push(Term { step: v.clone(), offset, plus: w / len2, minus: w / len2 });
            }
            key.sort();
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let total = terms.iter().map(|t| t.plus + t.minus).sum();
            out.push(Constraint { terms, total });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn counts() {
        let g = GridFunction::sample_cube(2, q(-1), q(1), 9, |_| 0.0).unwrap();
        assert_eq!(constraints(&g, 1).len(), 1);
        // axes, diagonals and the four knight moves
        assert_eq!(constraints(&g, 2).len(), 8);
        let g = GridFunction::sample_cube(3, q(-1), q(1), 5, |_| 0.0).unwrap();
        assert_eq!(constraints(&g, 1).len(), 1);
        assert_eq!(constraints(&g, 3).len(), 3 + 3 * 6);
    }

    #[test]
    fn dual_weights_support_the_cone() {
        for n in 2..=4 {
            for m in 1..=n {
                let ws = dual_weights(n, m);
                assert!(ws.iter().all(|w| w.iter().all(|x| *x >= 0.0)));
                // every generator is nonnegative on sampled points of Γ_m
                for a in -4..=4 {
                    for b in -4..=4 {
                        let mut lam = vec![1.0; n];
                        lam[0] = a as f64 / 2.0;
                        lam[n - 1] = b as f64 / 2.0;
                        let in_cone = (1..=m).all(|k| sigma(&lam, k) >= 0.0);
                        if in_cone {
                            for w in &ws {
                                let d: f64 = w.iter().zip(&lam).map(|(x, y)| x * y).sum();
                                assert!(d >= -1e-12, "n={n} m={m} w={w:?} lam={lam:?}");
                            }
                        }
                    }
                }
            }
        }
    }
}
