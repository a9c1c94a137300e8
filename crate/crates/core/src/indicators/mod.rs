//! Indicators of Lelong-class functions: recession functions, their Θ-polytopes,
//! residual masses and Newton numbers.

mod numerical;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{Measure, Polytope};
use crate::hessian::{pl_monge_ampere, GridFunction};
use crate::rational::{to_f64, to_json, vec_from_json, vec_to_json, Q};
use crate::tropical::{Term, TropicalPolynomial};

pub use numerical::{grid_indicator, sup_formula_profile, GridFit, LimitOptions, SupSample};

/// A function of linear growth: an exact PL representative, or samples with a
/// declared bound `f(x) ≤ C|x| + D`.
#[derive(Clone, Debug)]
pub enum LelongFunction {
    Pl(TropicalPolynomial),
    Grid { u: GridFunction, c: f64, d: f64 },
}

impl LelongFunction {
    /// Checks the growth bound at every node.
    pub fn grid(u: GridFunction, c: f64, d: f64) -> Result<Self> {
        for i in 0..u.len() {
            let x = u.point(i);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if u.values()[i] > c * norm + d + 1e-9 * (1.0 + norm) {
                return Err(Error::GrowthBound(x));
            }
        }
        Ok(LelongFunction::Grid { u, c, d })
    }

    pub fn n(&self) -> usize {
        match self {
            LelongFunction::Pl(f) => f.n(),
            LelongFunction::Grid { u, .. } => u.n(),
        }
    }
}

/// `Ψ(y) = max_a a·y` over a finite set of rational gradients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Indicator {
    n: usize,
    gradients: Vec<Vec<Q>>,
}

impl Indicator {
    pub fn new(n: usize, mut gradients: Vec<Vec<Q>>) -> Result<Self> {
        if gradients.is_empty() {
            return Err(Error::Empty("gradients"));
        }
        if let Some(g) = gradients.iter().find(|g| g.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: g.len() });
        }
        gradients.sort();
        gradients.dedup();
        Ok(Self { n, gradients })
    }

    pub fn linear(a: Vec<Q>) -> Self {
        Self { n: a.len(), gradients: vec![a] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gradients(&self) -> &[Vec<Q>] {
        &self.gradients
    }

    pub fn eval(&self, y: &[Q]) -> Q {
        self.gradients.iter().map(|a| dot(a, y)).max().expect("nonempty")
    }

    /// `Ψ⁺ = max(Ψ, 0)`.
    pub fn plus(&self, y: &[Q]) -> Q {
        self.eval(y).max(Q::zero())
    }

    pub fn eval_f64(&self, y: &[f64]) -> f64 {
        self.gradients
            .iter()
            .map(|a| a.iter().zip(y).map(|(p, q)| to_f64(p) * q).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scale(&self, lambda: &Q) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::OutOfRange(format!("scale {lambda} must be positive")));
        }
        Self::new(self.n, self.gradients.iter().map(|a| a.iter().map(|x| x * lambda).collect()).collect())
    }

    /// Smallest `C` with `Ψ(y) ≤ C|y|`.
    pub fn growth(&self) -> f64 {
        self.gradients.iter().map(|a| a.iter().map(|x| to_f64(x).powi(2)).sum::<f64>().sqrt()).fold(0.0, f64::max)
    }

    /// `L·Ψ⁺` with integer slopes, and `L`.
    fn integral_plus(&self) -> (TropicalPolynomial, BigInt) {
        let l = self.gradients.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let scale = Q::from_integer(l.clone());
        let mut terms: Vec<Term> = Vec::new();
        let mut alphas: Vec<Vec<i64>> = vec![vec![0; self.n]];
        for a in &self.gradients {
            let alpha: Vec<i64> = a
                .iter()
                .map(|x| i64::try_from((x * &scale).to_integer()).expect("scaled gradient fits in i64"))
                .collect();
            if !alphas.contains(&alpha) {
                alphas.push(alpha);
            }
        }
        for alpha in alphas {
            terms.push(Term::new(alpha, Q::zero()));
        }
        (TropicalPolynomial::new(self.n, terms).expect("distinct nonempty support"), l)
    }

    pub fn to_json(&self) -> Value {
        json!({ "gradients": self.gradients.iter().map(|a| vec_to_json(a)).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let gs = v
            .get("gradients")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("indicator needs a \"gradients\" array".into()))?;
        let gradients = gs.iter().map(vec_from_json).collect::<Result<Vec<_>>>()?;
        let n = gradients.first().map_or(0, |g| g.len());
        Self::new(n, gradients)
    }
}

fn dot(a: &[Q], y: &[Q]) -> Q {
    a.iter().zip(y).map(|(p, q)| p * q).sum()
}

/// The slopes of the terms; the constants drop out of `f(x + ty)/t` as `t → ∞`,
/// so the result does not depend on `x`.
pub fn pl_indicator(f: &TropicalPolynomial) -> Indicator {
    Indicator::new(f.n(), f.terms().iter().map(Term::alpha_q).collect()).expect("a tropical polynomial has terms")
}

/// `Ψ_{f,x}(y) = lim_{t→∞} f(x + ty)/t`: exact for PL input, fitted for samples.
pub fn recession_indicator(f: &LelongFunction, x: &[Q]) -> Result<Indicator> {
    if x.len() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), found: x.len() });
    }
    match f {
        LelongFunction::Pl(p) => Ok(pl_indicator(p)),
        LelongFunction::Grid { u, .. } => {
            let xf: Vec<f64> = x.iter().map(to_f64).collect();
            Ok(grid_indicator(u, &xf, &LimitOptions::default())?.indicator)
        }
    }
}

/// `Θ = conv(gradients ∪ {0})`, the polytope with support function `Ψ⁺`.
pub fn theta_polytope(psi: &Indicator) -> Polytope {
    let mut pts = psi.gradients.clone();
    pts.push(vec![Q::zero(); psi.n]);
    Polytope::convex_hull(&pts).expect("nonempty point set")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualMode {
    /// `m = n`: the atom of the Monge-Ampère measure of `Ψ⁺` at 0.
    Atom,
    /// `m < n`: `(dd#Ψ)^m ∧ β^{n−m}` lives on the `(n−m)`-dimensional cones of the
    /// fan, with a density and no atom at 0.
    FanDensity,
}

impl ResidualMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ResidualMode::Atom => "atom",
            ResidualMode::FanDensity => "fan-density",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualMass {
    pub value: Q,
    pub mode: ResidualMode,
}

/// Atomic part at 0 of `(dd#Ψ⁺)^m ∧ β^{n−m}`.
pub fn residual_mass(psi: &Indicator, m: usize) -> Result<ResidualMass> {
    let n = psi.n;
    if m == 0 || m > n {
        return Err(Error::OutOfRange(format!("m = {m} must lie in 1..={n}")));
    }
    if m < n {
        return Ok(ResidualMass { value: Q::zero(), mode: ResidualMode::FanDensity });
    }
    let (f, l) = psi.integral_plus();
    let origin = vec![Q::zero(); n];
    let atom: Q = pl_monge_ampere(&f).atoms.into_iter().filter(|a| a.point == origin).map(|a| a.mass).sum();
    let value = atom / Q::from_integer(num_traits::pow(l, n));
    Ok(ResidualMass { value, mode: ResidualMode::Atom })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewtonMode {
    Residual,
    Literal,
}

impl FromStr for NewtonMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "residual" => Ok(NewtonMode::Residual),
            "literal" => Ok(NewtonMode::Literal),
            other => Err(Error::Format(format!("unknown mode {other:?}; use residual or literal"))),
        }
    }
}

impl fmt::Display for NewtonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NewtonMode::Residual => "residual",
            NewtonMode::Literal => "literal",
        })
    }
}

/// Both readings of the Newton number, whichever was asked for.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonNumber {
    pub m: usize,
    pub mode: NewtonMode,
    pub residual: ResidualMass,
    /// `C(n, m)^{-1} H^{n−m}(Θ)`.
    pub literal: Measure,
    pub agree: bool,
    pub theta: Polytope,
}

impl NewtonNumber {
    pub fn value(&self) -> Measure {
        match self.mode {
            NewtonMode::Residual => Measure::exact(self.residual.value.clone()),
            NewtonMode::Literal => self.literal.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        let measure = |m: &Measure| match m {
            Measure::Divergent => json!("divergent"),
            Measure::Finite { exact: Some(q), .. } => json!(crate::rational::to_string(q)),
            Measure::Finite { value, .. } => json!(value),
        };
        json!({
            "m": self.m,
            "mode": self.mode.to_string(),
            "value": measure(&self.value()),
            "residual": crate::rational::to_string(&self.residual.value),
            "residual_mode": self.residual.mode.as_str(),
            "literal": measure(&self.literal),
            "agree": self.agree,
            "theta_dim": self.theta.dim(),
            "theta": self.theta.to_json(),
        })
    }
}

pub fn newton_number(f: &LelongFunction, x: &[Q], m: usize, mode: NewtonMode) -> Result<NewtonNumber> {
    let psi = recession_indicator(f, x)?;
    newton_number_of(&psi, m, mode)
}

pub fn newton_number_of(psi: &Indicator, m: usize, mode: NewtonMode) -> Result<NewtonNumber> {
    let n = psi.n;
    let residual = residual_mass(psi, m)?;
    let theta = theta_polytope(psi);
    let d = n - m;
    let binom = Q::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(m)));
    let literal = match theta.dim().cmp(&d) {
        std::cmp::Ordering::Greater => Measure::Divergent,
        std::cmp::Ordering::Less => Measure::zero(),
        std::cmp::Ordering::Equal => match theta.hull().intrinsic_measure() {
            (_, Some(q)) => Measure::exact(q / &binom),
            (v, None) => Measure::Finite { value: v / to_f64(&binom), exact: None },
        },
    };
    let agree = match &literal {
        Measure::Divergent => false,
        Measure::Finite { exact: Some(q), .. } => *q == residual.value,
        Measure::Finite { value, .. } => {
            let r = to_f64(&residual.value);
            (value - r).abs() <= 1e-9 * (1.0 + r.abs())
        }
    };
    Ok(NewtonNumber { m, mode, residual, literal, agree, theta })
}

pub fn residual_to_json(r: &ResidualMass) -> Value {
    json!({ "value": to_json(&r.value), "mode": r.mode.as_str() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf, qvec};
    use crate::tropical::parse_tropical;

    fn psi(gs: &[&[i64]]) -> Indicator {
        Indicator::new(gs[0].len(), gs.iter().map(|g| qvec(g)).collect()).unwrap()
    }

    #[test]
    fn constants_vanish() {
        let f = parse_tropical("max(-3 + 2*x1, 1 + x2)", 2).unwrap();
        assert_eq!(pl_indicator(&f), psi(&[&[2, 0], &[0, 1]]));
        let f = parse_tropical("max(0, x1, x2)", 2).unwrap();
        assert_eq!(pl_indicator(&f), psi(&[&[0, 0], &[1, 0], &[0, 1]]));
    }

    #[test]
    fn theta_examples() {
        let t = theta_polytope(&psi(&[&[2, 0], &[0, 1]]));
        assert_eq!(t.volume(), q(1));
        assert_eq!(t.vertices().len(), 3);
        let t = theta_polytope(&Indicator::linear(qvec(&[3, 4])));
        assert_eq!(t.dim(), 1);
    }

    #[test]
    fn residual_examples() {
        assert_eq!(residual_mass(&psi(&[&[0, 0], &[1, 0], &[0, 1]]), 2).unwrap().value, q(1));
        let l1 = psi(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        assert_eq!(residual_mass(&l1, 2).unwrap().value, q(8));
        assert_eq!(residual_mass(&Indicator::linear(qvec(&[1, 2])), 2).unwrap().value, q(0));
        assert_eq!(residual_mass(&l1, 1).unwrap().mode, ResidualMode::FanDensity);
        // rational slopes
        let half = Indicator::new(2, vec![vec![qf(1, 2), q(0)], vec![q(0), qf(1, 3)]]).unwrap();
        assert_eq!(residual_mass(&half, 2).unwrap().value, qf(1, 6));
    }

    #[test]
    fn newton_examples() {
        let f = LelongFunction::Pl(parse_tropical("max(0, x1, x2)", 2).unwrap());
        let origin = qvec(&[0, 0]);
        let r = newton_number(&f, &origin, 2, NewtonMode::Residual).unwrap();
        assert_eq!(r.value(), Measure::exact(q(1)));
        assert!(!r.agree);
        let seg = LelongFunction::Pl(parse_tropical("max(0, 2*x1)", 2).unwrap());
        let r = newton_number(&seg, &origin, 1, NewtonMode::Literal).unwrap();
        assert_eq!(r.value(), Measure::exact(q(1)));
        let r = newton_number(&f, &origin, 1, NewtonMode::Literal).unwrap();
        assert_eq!(r.value(), Measure::Divergent);
        assert!(!r.agree);
    }

    #[test]
    fn json_round_trip() {
        let p = Indicator::new(2, vec![vec![qf(1, 2), q(-3)], vec![q(0), q(1)]]).unwrap();
        assert_eq!(Indicator::from_json(&p.to_json()).unwrap(), p);
    }
}
