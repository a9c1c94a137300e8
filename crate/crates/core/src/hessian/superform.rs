//! Brute-force expansion of wedge products of constant (1,1)-superforms.
//!
//! A matrix `A` stands for `Σ a_ij dx_i ∧ dξ_j`; `β` is the identity. The
//! coefficient of `dx_1∧…∧dx_n∧dξ_1∧…∧dξ_n` is multiplied by
//! `C_n = (−1)^{n(n−1)/2}`, so that `β^n / n!` integrates to one on a unit box.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

fn permutation_sign(word: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] > word[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Normalized top coefficient of `A_1 ∧ … ∧ A_k ∧ β^{beta_power}`.
pub fn superform_wedge_oracle(matrices: &[Vec<Vec<Q>>], beta_power: usize) -> Result<Q> {
    let n = match matrices.first() {
        Some(a) => a.len(),
        None => beta_power,
    };
    if matrices.len() + beta_power != n {
        return Err(Error::DimensionMismatch { expected: n, found: matrices.len() + beta_power });
    }
    let mut factors: Vec<Vec<Vec<Q>>> = matrices.to_vec();
    for a in &factors {
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: a.len() });
        }
    }
    for _ in 0..beta_power {
        factors.push((0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect());
    }
    let mut total = Q::zero();
    let mut xs = vec![0usize; n];
    let mut xis = vec![0usize; n];
    expand(&factors, 0, &mut xs, &mut xis, &mut vec![false; n], &mut vec![false; n], Q::one(), &mut total);
    let cn = if (n * n.saturating_sub(1) / 2) % 2 == 0 { Q::one() } else { -Q::one() };
    Ok(total * cn)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    factors: &[Vec<Vec<Q>>],
    r: usize,
    xs: &mut Vec<usize>,
    xis: &mut Vec<usize>,
    used_x: &mut Vec<bool>,
    used_xi: &mut Vec<bool>,
    coeff: Q,
    total: &mut Q,
) {
    let n = used_x.len();
    if r == factors.len() {
        // word dx_{x0} dξ_{ξ0} dx_{x1} dξ_{ξ1} … sorted into dx_1…dx_n dξ_1…dξ_n
        let word: Vec<usize> = (0..n).flat_map(|k| [xs[k], n + xis[k]]).collect();
        if permutation_sign(&word) > 0 {
            *total += coeff;
        } else {
            *total -= coeff;
        }
        return;
    }
    for i in 0..n {
        if used_x[i] {
            continue;
        }
        for j in 0..n {
            if used_xi[j] || factors[r][i][j].is_zero() {
                continue;
            }
            used_x[i] = true;
            used_xi[j] = true;
            xs[r] = i;
            xis[r] = j;
            expand(factors, r + 1, xs, xis, used_x, used_xi, &coeff * &factors[r][i][j], total);
            used_x[i] = false;
            used_xi[j] = false;
        }
    }
}

/// Floating-point version of the same expansion for `n` factors (no β padding).
pub fn wedge_f64(factors: &[Vec<Vec<f64>>]) -> f64 {
    let n = factors.len();
    let mut total = 0.0;
    let mut xs = vec![0usize; n];
    let mut xis = vec![0usize; n];
    fn rec(f: &[Vec<Vec<f64>>], r: usize, xs: &mut [usize], xis: &mut [usize], ux: u32, uxi: u32, c: f64, total: &mut f64) {
        let n = f.len();
        if r == n {
            let word: Vec<usize> = (0..n).flat_map(|k| [xs[k], n + xis[k]]).collect();
            *total += permutation_sign(&word) as f64 * c;
            return;
        }
        for i in (0..n).filter(|i| ux >> i & 1 == 0) {
            for j in (0..n).filter(|j| uxi >> j & 1 == 0) {
                if f[r][i][j] != 0.0 {
                    xs[r] = i;
                    xis[r] = j;
                    rec(f, r + 1, xs, xis, ux | 1 << i, uxi | 1 << j, c * f[r][i][j], total);
                }
            }
        }
    }
    rec(factors, 0, &mut xs, &mut xis, 0, 0, 1.0, &mut total);
    if (n * n.saturating_sub(1) / 2) % 2 == 0 {
        total
    } else {
        -total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};

    fn diag(d: &[i64]) -> Vec<Vec<Q>> {
        (0..d.len()).map(|i| (0..d.len()).map(|j| if i == j { q(d[i]) } else { q(0) }).collect()).collect()
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(superform_wedge_oracle(&[], 2).unwrap(), q(2));
        assert_eq!(superform_wedge_oracle(&[diag(&[1, 1, 1])], 2).unwrap(), q(6));
        assert_eq!(superform_wedge_oracle(&[diag(&[3, 5]), diag(&[3, 5])], 0).unwrap(), q(30));
        assert_eq!(superform_wedge_oracle(&[], 1).unwrap(), q(1));
        assert!(superform_wedge_oracle(&[diag(&[1, 1])], 2).is_err());
        // off-diagonal entries enter through the determinant
        let a = vec![qvec(&[1, 2]), qvec(&[2, 1])];
        assert_eq!(superform_wedge_oracle(&[a.clone(), a], 0).unwrap(), q(-6));
    }
}
