//! Tropical polynomials `f(x) = max_α (−υ(α) + α·x)`, their hypersurfaces and
//! stable intersections.

pub mod balancing;
pub mod hypersurface;
pub mod intersection;
pub mod parse;
pub mod subdivision;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::rational::{from_json, to_json, Q};

pub use balancing::{check_balancing, BalancingReport};
pub use hypersurface::{hypersurface, TropicalHypersurface};
pub use intersection::{intersection_mass, stable_intersection, stable_intersection_seeded, TropicalCycle};
pub use parse::parse_tropical;
pub use subdivision::{dual_subdivision, DualSubdivision};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub alpha: Vec<i64>,
    pub upsilon: Q,
}

impl Term {
    pub fn new(alpha: Vec<i64>, upsilon: Q) -> Self {
        Self { alpha, upsilon }
    }

    pub fn alpha_q(&self) -> Vec<Q> {
        self.alpha.iter().map(|&a| Q::from_integer(a.into())).collect()
    }

    /// `−υ + α·x`
    pub fn value(&self, x: &[Q]) -> Q {
        let mut v = -self.upsilon.clone();
        for (a, xi) in self.alpha.iter().zip(x) {
            if *a != 0 {
                v += xi * Q::from_integer(BigInt::from(*a));
            }
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropicalPolynomial {
    n: usize,
    terms: Vec<Term>,
}

impl TropicalPolynomial {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Empty("support"));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.alpha.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.alpha.len() });
            }
            if terms[..i].iter().any(|s| s.alpha == t.alpha) {
                return Err(Error::DuplicateSupport(t.alpha.clone()));
            }
        }
        Ok(Self { n, terms })
    }

    /// Convenience constructor from `(α, υ)` pairs with integer υ.
    pub fn from_pairs(n: usize, pairs: &[(&[i64], i64)]) -> Result<Self> {
        Self::new(n, pairs.iter().map(|(a, u)| Term::new(a.to_vec(), Q::from_integer((*u).into()))).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.iter().map(|t| t.alpha.clone()).collect()
    }

    pub fn upsilon(&self, alpha: &[i64]) -> Option<&Q> {
        self.terms.iter().find(|t| t.alpha == alpha).map(|t| &t.upsilon)
    }

    pub fn evaluate(&self, x: &[Q]) -> Result<Q> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok(self.terms.iter().map(|t| t.value(x)).max().expect("nonempty support"))
    }

    /// Indices of the terms attaining the maximum at `x`.
    pub fn active_terms(&self, x: &[Q]) -> Vec<usize> {
        let vals: Vec<Q> = self.terms.iter().map(|t| t.value(x)).collect();
        let best = vals.iter().max().expect("nonempty support");
        (0..vals.len()).filter(|&i| &vals[i] == best).collect()
    }

    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| -crate::rational::to_f64(&t.upsilon) + t.alpha.iter().zip(x).map(|(&a, xi)| a as f64 * xi).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn newton_polytope(&self) -> Polytope {
        Polytope::from_integer_points(&self.support()).expect("support has a common dimension")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "terms": self.terms.iter().map(|t| json!({"alpha": t.alpha, "upsilon": to_json(&t.upsilon)})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Format("polynomial needs \"n\"".into()))?;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("polynomial needs a \"terms\" array".into()))?
            .iter()
            .map(|t| {
                let alpha: Vec<i64> = t
                    .get("alpha")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Format("term needs \"alpha\"".into()))?
                    .iter()
                    .map(|a| a.as_i64().ok_or_else(|| Error::Format("exponents must be integers".into())))
                    .collect::<Result<_>>()?;
                let upsilon = from_json(t.get("upsilon").ok_or_else(|| Error::Format("term needs \"upsilon\"".into()))?)?;
                Ok(Term::new(alpha, upsilon))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n as usize, terms)
    }

    /// The human-readable `max(...)` form accepted by [`parse_tropical`].
    pub fn to_expr(&self) -> String {
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut s = crate::rational::to_string(&-t.upsilon.clone());
                for (i, &a) in t.alpha.iter().enumerate() {
                    if a != 0 {
                        s.push_str(&format!(" + {a}*x{}", i + 1));
                    }
                }
                s
            })
            .collect();
        format!("max({})", terms.join(", "))
    }
}

/// FNV-1a, used to derive reproducible seeds from canonical input text.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};

    #[test]
    fn evaluation() {
        let line = parse_tropical("max(0, x1, x2)", 2).unwrap();
        assert_eq!(line.evaluate(&qvec(&[1, 0])).unwrap(), q(1));
        assert_eq!(line.evaluate(&qvec(&[-5, -7])).unwrap(), q(0));
        let f = parse_tropical("max(-3 + 2*x1, 1 + x2)", 2).unwrap();
        assert_eq!(f.evaluate(&qvec(&[2, 2])).unwrap(), q(3));
        assert!(f.evaluate(&qvec(&[2])).is_err());
        assert_eq!(f.active_terms(&qvec(&[2, 2])), vec![1]);
    }

    #[test]
    fn newton_polytopes() {
        let sq = parse_tropical("max(0, x1, x2, x1 + x2)", 2).unwrap().newton_polytope();
        assert_eq!(sq.volume(), q(1));
        assert_eq!(parse_tropical("max(3 + x1)", 2).unwrap().newton_polytope().vertices().len(), 1);
    }

    #[test]
    fn json_and_expr_round_trip() {
        let f = parse_tropical("max(-3/2 + 2*x1, 1 + x2, 0)", 2).unwrap();
        assert_eq!(TropicalPolynomial::from_json(&f.to_json()).unwrap(), f);
        assert_eq!(parse_tropical(&f.to_expr(), 2).unwrap(), f);
        assert_eq!(f.to_json()["terms"][0]["upsilon"], json!([3, 2]));
    }
}
