//! Exact dense linear algebra over `Q` and lattice helpers over `Z`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{primitive, Q};

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : rows · x = 0}` in `Q^n`.
pub fn nullspace(rows: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); n];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&m[r][f];
            }
            v
        })
        .collect()
}

/// Solves `a · x = b` (square or not); returns one solution if consistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = m[r][n].clone();
    }
    Some(x)
}

pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = Q::one() / &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

pub fn det_int(m: &[Vec<BigInt>]) -> BigInt {
    let q: Vec<Vec<Q>> = m.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect();
    det(&q).to_integer()
}

/// Lattice basis of `{v ∈ Z^n : rows · v = 0}` via unimodular column reduction.
pub fn integer_kernel(rows: &[Vec<Q>], n: usize) -> Vec<Vec<BigInt>> {
    let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| primitive(r)).collect();
    // columns of u, stored as vectors
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivot = 0;
    for row in &ints {
        if pivot == n {
            break;
        }
        let image = |col: &Vec<BigInt>| row.iter().zip(col).fold(BigInt::zero(), |s, (a, b)| s + a * b);
        loop {
            let vals: Vec<BigInt> = (pivot..n).map(|j| image(&u[j])).collect();
            let nonzero: Vec<usize> = (0..vals.len()).filter(|&k| !vals[k].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            // smallest |value| goes to position `pivot`
            let best = *nonzero.iter().min_by_key(|&&k| vals[k].abs()).unwrap();
            u.swap(pivot, pivot + best);
            let pv = image(&u[pivot]);
            let mut done = true;
            for j in pivot + 1..n {
                let v = image(&u[j]);
                if v.is_zero() {
                    continue;
                }
                let f = v.div_floor(&pv);
                let pcol = u[pivot].clone();
                for (x, y) in u[j].iter_mut().zip(&pcol) {
                    *x -= &f * y;
                }
                if !image(&u[j]).is_zero() {
                    done = false;
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }
    u.split_off(pivot)
}

/// All k-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// gcd of the maximal minors of a `p × n` integer matrix (p ≤ n); zero when rank < p.
pub fn gcd_of_maximal_minors(m: &[Vec<BigInt>]) -> BigInt {
    let p = m.len();
    let n = m.first().map_or(0, |r| r.len());
    let mut g = BigInt::zero();
    for cols in subsets(n, p) {
        let sub: Vec<Vec<BigInt>> = m.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
        g = g.gcd(&det_int(&sub));
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rank_det_solve() {
        let m = vec![qvec(&[1, 2]), qvec(&[3, 4])];
        assert_eq!(det(&m), q(-2));
        assert_eq!(rank(&[qvec(&[1, 2]), qvec(&[2, 4])]), 1);
        assert_eq!(solve(&m, &qvec(&[5, 6])).unwrap(), vec![q(-4), Q::new(9.into(), 2.into())]);
        assert!(solve(&[qvec(&[1, 1]), qvec(&[2, 2])], &qvec(&[1, 3])).is_none());
    }

    #[test]
    fn kernel_lattice_is_saturated() {
        // x + y + 2z = 0 : lattice basis must have index 1 in the kernel
        let k = integer_kernel(&[qvec(&[1, 1, 2])], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(&v[0] + &v[1] + BigInt::from(2) * &v[2], BigInt::zero());
        }
        // the 2x2 minors of the basis have gcd 1 exactly when the lattice is saturated
        assert_eq!(gcd_of_maximal_minors(&k), BigInt::one());
        // 2x - 2y = 0 in Z^2 has kernel generated by (1,1)
        let k = integer_kernel(&[qvec(&[2, -2])], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), ints(&[1, 1]));
    }

    #[test]
    fn minors_gcd() {
        assert_eq!(gcd_of_maximal_minors(&[ints(&[1, 1, 0]), ints(&[1, -1, 0])]), BigInt::from(2));
        assert_eq!(gcd_of_maximal_minors(&[ints(&[1, 1]), ints(&[0, -1])]), BigInt::one());
        assert_eq!(subsets(4, 2).len(), 6);
    }
}
