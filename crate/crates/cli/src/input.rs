//! Reading input documents and option values.

use std::path::{Path, PathBuf};

use serde_json::Value;
use supertrop::capacity::{CapacityProblem, MaskSpec};
use supertrop::geometry::Polytope;
use supertrop::rational::{from_json as q_from, parse};
use supertrop::tropical::{parse_tropical, TropicalPolynomial};
use supertrop::{Error, Q};

pub enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numerical(m) => m,
        }
    }

    pub fn status(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged { .. } | Error::NonGeneric(_) | Error::NonConvergentLimits(_) | Error::IndicatorFit(_) => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn located(path: &Path, e: Error) -> Failure {
    match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        f => f,
    }
}

pub fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{}:{}:{}: malformed JSON: {e}", path.display(), e.line(), e.column())))
}

/// `{"n", "terms"}` or `{"n", "expr": "max(...)"}`.
pub fn polynomial_from(v: &Value) -> supertrop::Result<TropicalPolynomial> {
    match v.get("expr").and_then(Value::as_str) {
        Some(expr) => {
            let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Format("polynomial needs \"n\"".into()))?;
            parse_tropical(expr, n as usize)
        }
        None => TropicalPolynomial::from_json(v),
    }
}

pub fn read_polynomial(path: &Path) -> Result<TropicalPolynomial, Failure> {
    polynomial_from(&read_json(path)?).map_err(|e| located(path, e))
}

/// A document holding one item, a list of them, or `{key: [...]}`.
fn items<'a>(v: &'a Value, key: &str) -> Vec<&'a Value> {
    match v {
        Value::Array(a) => a.iter().collect(),
        Value::Object(o) if o.get(key).is_some_and(Value::is_array) => o[key].as_array().unwrap().iter().collect(),
        other => vec![other],
    }
}

pub fn read_polynomials(paths: &[PathBuf]) -> Result<Vec<TropicalPolynomial>, Failure> {
    let mut out = Vec::new();
    for path in paths {
        let doc = read_json(path)?;
        for item in items(&doc, "polynomials") {
            out.push(polynomial_from(item).map_err(|e| located(path, e))?);
        }
    }
    Ok(out)
}

/// Polytopes given directly or as Newton polytopes of polynomials.
pub fn read_polytopes(paths: &[PathBuf]) -> Result<Vec<Polytope>, Failure> {
    let mut out = Vec::new();
    for path in paths {
        let doc = read_json(path)?;
        let list = if doc.get("polytopes").is_some() { items(&doc, "polytopes") } else { items(&doc, "polynomials") };
        for item in list {
            let p = if item.get("vertices").is_some() {
                Polytope::from_json(item)
            } else {
                polynomial_from(item).map(|f| f.newton_polytope())
            };
            out.push(p.map_err(|e| located(path, e))?);
        }
    }
    Ok(out)
}

pub fn read_problem(path: &Path) -> Result<CapacityProblem, Failure> {
    CapacityProblem::from_json(&read_json(path)?).map_err(|e| located(path, e))
}

/// Inline JSON, or `@path`.
pub fn read_mask(spec: &str) -> Result<MaskSpec, Failure> {
    let doc = match spec.strip_prefix('@') {
        Some(p) => read_json(Path::new(p))?,
        None => serde_json::from_str(spec)
            .map_err(|e| Failure::Input(format!("--mask:{}: malformed JSON: {e}", e.column())))?,
    };
    Ok(MaskSpec::from_json(&doc)?)
}

/// `{"matrices": [A_1, …], "beta_power": k}` with rational entries.
pub fn read_wedge(path: &Path) -> Result<(Vec<Vec<Vec<Q>>>, usize), Failure> {
    let doc = read_json(path)?;
    let bad = |what: &str| Failure::Input(format!("{}: {what}", path.display()));
    let matrices = doc
        .get("matrices")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("needs a \"matrices\" array"))?
        .iter()
        .map(|a| {
            a.as_array()
                .ok_or_else(|| bad("a matrix must be a list of rows"))?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| bad("a row must be a list"))?
                        .iter()
                        .map(|x| q_from(x).map_err(|e| located(path, e)))
                        .collect()
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<Vec<Q>>>, Failure>>()?;
    let beta = doc.get("beta_power").and_then(Value::as_u64).ok_or_else(|| bad("needs an integer \"beta_power\""))?;
    Ok((matrices, beta as usize))
}

pub fn parse_point(s: &str) -> Result<Vec<Q>, Failure> {
    s.split(',').map(|t| parse(t).ok_or_else(|| Failure::Input(format!("bad coordinate {:?}", t.trim())))).collect()
}

pub fn parse_floats(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',').map(|t| t.trim().parse().map_err(|_| Failure::Input(format!("bad number {:?}", t.trim())))).collect()
}
