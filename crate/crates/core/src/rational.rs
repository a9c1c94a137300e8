//! Exact rational scalars and their JSON encoding.
//!
//! Rationals serialize as `[numerator, denominator]` integer pairs with a
//! positive denominator in lowest terms. Integers that do not fit in an `i64`
//! are written as decimal strings; both forms are accepted on input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(xs: &[i64]) -> Vec<Q> {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator/denominator overflow f64 individually
        let n = x.numer().to_string().len() as i32;
        let d = x.denom().to_string().len() as i32;
        let shift = n.max(d) - 300;
        let scale = BigInt::from(10).pow(shift.max(0) as u32);
        let num = (x.numer() / &scale).to_f64().unwrap_or(0.0);
        let den = (x.denom() / &scale).to_f64().unwrap_or(1.0);
        num / den
    })
}

/// Closest rational to `x` with denominator at most `max_den` (continued fractions).
pub fn from_f64_approx(x: f64, max_den: i64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut r = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = r - a as f64;
        if frac < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return Q::zero();
    }
    Q::new(BigInt::from(sign * p1), BigInt::from(q1))
}

/// `p/q` display, or just `p` for integers.
pub fn to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q`, or a finite decimal such as `-1.25` exactly.
pub fn parse(text: &str) -> Option<Q> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            s => s.parse().ok()?,
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().ok()?;
        let mag = Q::new(int_part * &scale + frac_part, scale);
        return Some(if negative { -mag } else { mag });
    }
    t.parse::<BigInt>().ok().map(Q::from_integer)
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Scales a rational vector to the unique primitive integer vector on the same ray.
pub fn primitive(v: &[Q]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = gcd_all(ints.iter());
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(x.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Format(format!("expected an integer, found {n}"))),
        Value::String(s) => s.parse().map_err(|_| Error::Format(format!("expected an integer, found {s:?}"))),
        other => Err(Error::Format(format!("expected an integer, found {other}"))),
    }
}

pub fn to_json(x: &Q) -> Value {
    Value::Array(vec![int_to_json(x.numer()), int_to_json(x.denom())])
}

pub fn from_json(v: &Value) -> Result<Q> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let n = int_from_json(&pair[0])?;
            let d = int_from_json(&pair[1])?;
            if !d.is_positive() {
                return Err(Error::Format("rational denominator must be positive".into()));
            }
            Ok(Q::new(n, d))
        }
        Value::Number(_) => Ok(Q::from_integer(int_from_json(v)?)),
        Value::String(s) => parse(s).ok_or_else(|| Error::Format(format!("bad rational {s:?}"))),
        other => Err(Error::Format(format!("expected [num, den], found {other}"))),
    }
}

pub fn vec_to_json(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(to_json).collect())
}

pub fn vec_from_json(v: &Value) -> Result<Vec<Q>> {
    v.as_array()
        .ok_or_else(|| Error::Format(format!("expected an array of rationals, found {v}")))?
        .iter()
        .map(from_json)
        .collect()
}

/// Serde adapter: `#[serde(with = "crate::rational::serde_q")]`.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_json(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = Value::deserialize(d)?;
        from_json(&v).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Q>`.
pub mod serde_qvec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        vec_to_json(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Value::deserialize(d)?;
        vec_from_json(&v).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Vec<Q>>`.
pub mod serde_qmat {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
        Value::Array(x.iter().map(|r| vec_to_json(r)).collect()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Q>>, D::Error> {
        let v = Value::deserialize(d)?;
        v.as_array()
            .ok_or_else(|| D::Error::custom("expected an array of rational vectors"))?
            .iter()
            .map(|r| vec_from_json(r).map_err(D::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Q>` (`null` when absent).
pub mod serde_opt_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        x.as_ref().map(to_json).unwrap_or(Value::Null).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        let v = Value::deserialize(d)?;
        if v.is_null() {
            return Ok(None);
        }
        from_json(&v).map(Some).map_err(D::Error::custom)
    }
}

/// Exact square root of a nonnegative rational, when it is a perfect square.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}
