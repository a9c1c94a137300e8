//! Symmetric matrices, elementary symmetric functions of eigenvalues and the Γ_m cones.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;

/// A symmetric matrix stored as its upper triangle, row by row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    n: usize,
    upper: Vec<f64>,
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, upper: vec![0.0; n * (n + 1) / 2] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, *x);
        }
        m
    }

    /// From a full matrix; rejects asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            for j in i..n {
                if rows[j][i] != r[j] {
                    return Err(Error::Format(format!("matrix is not symmetric at ({i},{j})")));
                }
                m.set(i, j, r[j]);
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[tri_index(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = tri_index(self.n, i, j);
        self.upper[k] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let upper = self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect();
        Self { n: self.n, upper }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, upper: self.upper.iter().map(|a| a * s).collect() }
    }

    /// `Bᵀ M B` for an `n × d` matrix `B` given by its columns.
    pub fn congruence(&self, columns: &[Vec<f64>]) -> Self {
        let d = columns.len();
        let mut out = Self::zeros(d);
        for a in 0..d {
            for b in a..d {
                let mut s = 0.0;
                for i in 0..self.n {
                    for j in 0..self.n {
                        s += columns[a][i] * self.get(i, j) * columns[b][j];
                    }
                }
                out.set(a, b, s);
            }
        }
        out
    }

    /// `σ_1, …, σ_n` of the eigenvalues.
    pub fn sigmas(&self) -> Vec<f64> {
        let rows = self.rows();
        char_coefficients(&rows, 0.0, 1.0)
    }

    pub fn sigma_k(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.n {
            return Err(Error::OutOfRange(format!("sigma_{k} of a {}x{} matrix", self.n, self.n)));
        }
        Ok(self.sigmas()[k - 1])
    }
}

/// `σ_1..σ_n` of an exact rational matrix.
pub fn sigmas_exact(rows: &[Vec<Q>]) -> Vec<Q> {
    char_coefficients(rows, Q::zero(), Q::one())
}

/// Faddeev–LeVerrier: returns `σ_k = (−1)^k c_k` where `det(λI − A) = Σ c_k λ^{n−k}`.
fn char_coefficients<T>(a: &[Vec<T>], zero: T, one: T) -> Vec<T>
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + std::ops::Div<Output = T> + std::ops::Neg<Output = T>,
{
    let n = a.len();
    let mut m: Vec<Vec<T>> = vec![vec![zero.clone(); n]; n];
    let mut c_prev = one.clone();
    let mut out = Vec::with_capacity(n);
    let mut kq = zero.clone();
    for k in 1..=n {
        kq = kq + one.clone();
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = vec![vec![zero.clone(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = if i == j { c_prev.clone() } else { zero.clone() };
                for l in 0..n {
                    s = s + a[i][l].clone() * m[l][j].clone();
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = zero.clone();
        for i in 0..n {
            for l in 0..n {
                tr = tr + a[i][l].clone() * m[l][i].clone();
            }
        }
        let c = -(tr / kq.clone());
        out.push(if k % 2 == 0 { c.clone() } else { -c.clone() });
        c_prev = c;
    }
    out
}

/// Default per-node tolerance scale: `1e-8 (1 + |σ_1|)`.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Γ_m membership: `σ_j(M) ≥ −tol (1 + |σ_1|)` for `j = 1..m`.
pub fn is_m_positive(mat: &SymmetricMatrix, m: usize, tol: f64) -> bool {
    let s = mat.sigmas();
    let bound = -tol * (1.0 + s[0].abs());
    s.iter().take(m).all(|&x| x >= bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};

    #[test]
    fn sigma_examples() {
        assert_eq!(SymmetricMatrix::diag(&[1.0, 1.0, -1.0]).sigma_k(2).unwrap(), -1.0);
        assert_eq!(SymmetricMatrix::diag(&[2.0, 2.0, -2.0]).sigma_k(1).unwrap(), 2.0);
        assert_eq!(SymmetricMatrix::diag(&[1.0, 2.0, 3.0]).sigma_k(3).unwrap(), 6.0);
        assert!(SymmetricMatrix::identity(2).sigma_k(3).is_err());
        let s = sigmas_exact(&[qvec(&[2, 1]), qvec(&[1, 2])]);
        assert_eq!(s, vec![q(4), q(3)]);
    }

    #[test]
    fn cone_examples() {
        let m = SymmetricMatrix::diag(&[2.0, 2.0, -2.0]);
        assert!(is_m_positive(&m, 1, DEFAULT_TOL));
        assert!(!is_m_positive(&m, 2, DEFAULT_TOL));
        assert!(is_m_positive(&SymmetricMatrix::identity(4), 4, DEFAULT_TOL));
        assert!(SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).is_err());
    }
}
