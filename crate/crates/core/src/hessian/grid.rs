//! Sampled functions on uniform box grids.
//!
//! Values are stored row-major with the last axis varying fastest.

use serde_json::{json, Value};

use super::matrix::{is_m_positive, SymmetricMatrix, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::rational::{from_json, to_f64, to_json, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    bounds: Vec<(Q, Q)>,
    resolution: Vec<usize>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(bounds: Vec<(Q, Q)>, resolution: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if bounds.is_empty() || bounds.len() != resolution.len() {
            return Err(Error::Grid("box and resolution must have the same positive length".into()));
        }
        if let Some(r) = resolution.iter().find(|&&r| r < 3) {
            return Err(Error::Grid(format!("resolution {r} is below the minimum of 3 nodes per axis")));
        }
        if bounds.iter().any(|(a, b)| a >= b) {
            return Err(Error::Grid("box sides must have positive length".into()));
        }
        let count: usize = resolution.iter().product();
        if values.len() != count {
            return Err(Error::Grid(format!("expected {count} values, found {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("values must be finite".into()));
        }
        Ok(Self { bounds, resolution, values })
    }

    pub fn sample(bounds: Vec<(Q, Q)>, resolution: Vec<usize>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let shell = Self { bounds, resolution, values: Vec::new() };
        let values = (0..shell.len()).map(|k| f(&shell.point(k))).collect();
        Self::new(shell.bounds, shell.resolution, values)
    }

    /// A cube `[lo, hi]^n` with `res` nodes per axis.
    pub fn sample_cube(n: usize, lo: Q, hi: Q, res: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::sample(vec![(lo, hi); n], vec![res; n], f)
    }

    /// Cube centred at `center` with a node at the centre, spacing close to `spacing`
    /// (rounded to a rational) and half-width at least `half_width`.
    pub fn sample_around(center: &[f64], half_width: f64, spacing: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let s = crate::rational::from_f64_approx(spacing, 1 << 20);
        let k = (half_width / to_f64(&s)).ceil().max(1.0) as i64;
        let reach = &s * Q::from_integer(k.into());
        let bounds = center
            .iter()
            .map(|c| {
                let c = crate::rational::from_f64_approx(*c, 1 << 20);
                (&c - &reach, &c + &reach)
            })
            .collect();
        Self::sample(bounds, vec![2 * k as usize + 1; center.len()], f)
    }

    pub fn n(&self) -> usize {
        self.resolution.len()
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bounds(&self) -> &[(Q, Q)] {
        &self.bounds
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.bounds.clone(), self.resolution.clone(), values)
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.bounds
            .iter()
            .zip(&self.resolution)
            .map(|((a, b), &r)| to_f64(&((b - a) / Q::from_integer((r as i64 - 1).into()))))
            .collect()
    }

    pub fn lo(&self) -> Vec<f64> {
        self.bounds.iter().map(|(a, _)| to_f64(a)).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let n = self.n();
        let mut s = vec![1; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.resolution[k + 1];
        }
        s
    }

    pub fn index_of(&self, multi: &[usize]) -> usize {
        multi.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for (axis, s) in self.strides().iter().enumerate() {
            out[axis] = k / s;
            k %= s;
        }
        out
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        let idx = self.multi_index(k);
        let h = self.spacing();
        let lo = self.lo();
        (0..self.n()).map(|a| lo[a] + idx[a] as f64 * h[a]).collect()
    }

    pub fn is_interior(&self, k: usize) -> bool {
        self.multi_index(k).iter().zip(&self.resolution).all(|(&i, &r)| i > 0 && i + 1 < r)
    }

    /// Central-difference Hessian at an interior node.
    pub fn hessian_at(&self, k: usize) -> SymmetricMatrix {
        let n = self.n();
        let h = self.spacing();
        let st = self.strides();
        let u = &self.values;
        let mut m = SymmetricMatrix::zeros(n);
        for a in 0..n {
            m.set(a, a, (u[k + st[a]] - 2.0 * u[k] + u[k - st[a]]) / (h[a] * h[a]));
            for b in a + 1..n {
                let v = u[k + st[a] + st[b]] - u[k + st[a] - st[b]] - u[k - st[a] + st[b]] + u[k - st[a] - st[b]];
                m.set(a, b, v / (4.0 * h[a] * h[b]));
            }
        }
        m
    }

    /// Hessian at any node, using the nearest interior node for boundary nodes.
    pub fn hessian_clamped(&self, k: usize) -> SymmetricMatrix {
        let idx: Vec<usize> =
            self.multi_index(k).iter().zip(&self.resolution).map(|(&i, &r)| i.clamp(1, r - 2)).collect();
        self.hessian_at(self.index_of(&idx))
    }

    /// Trapezoid weight of node `k` (product of 1/2 factors on boundary faces).
    pub fn quadrature_weight(&self, k: usize) -> f64 {
        let idx = self.multi_index(k);
        let mut w = self.cell_volume();
        for (i, r) in idx.iter().zip(&self.resolution) {
            if *i == 0 || i + 1 == *r {
                w *= 0.5;
            }
        }
        w
    }

    /// Multilinear interpolation; `None` outside the box.
    pub fn interpolate(&self, x: &[f64]) -> Option<f64> {
        self.interpolate_with(x, |k| self.values[k])
    }

    pub fn interpolate_with(&self, x: &[f64], value: impl Fn(usize) -> f64) -> Option<f64> {
        let n = self.n();
        let h = self.spacing();
        let lo = self.lo();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for a in 0..n {
            let t = (x[a] - lo[a]) / h[a];
            let max = (self.resolution[a] - 1) as f64;
            if !(-1e-9..=max + 1e-9).contains(&t) {
                return None;
            }
            let t = t.clamp(0.0, max);
            let i = (t.floor() as usize).min(self.resolution[a] - 2);
            base[a] = i;
            frac[a] = t - i as f64;
        }
        let mut total = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = base.clone();
            for a in 0..n {
                if corner >> a & 1 == 1 {
                    idx[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                total += w * value(self.index_of(&idx));
            }
        }
        Some(total)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "version": 1,
            "box": self.bounds.iter().map(|(a, b)| json!([to_json(a), to_json(b)])).collect::<Vec<_>>(),
            "resolution": self.resolution,
            "values": self.values,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Format(format!("grid function needs \"{k}\"")));
        let bounds = field("box")?
            .as_array()
            .ok_or_else(|| Error::Format("\"box\" must be an array of [lo, hi] pairs".into()))?
            .iter()
            .map(|side| match side.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok((from_json(a)?, from_json(b)?)),
                _ => Err(Error::Format("\"box\" entries must be [lo, hi] pairs".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        let resolution = field("resolution")?
            .as_array()
            .ok_or_else(|| Error::Format("\"resolution\" must be an array".into()))?
            .iter()
            .map(|r| r.as_u64().map(|r| r as usize).ok_or_else(|| Error::Format("resolutions must be integers".into())))
            .collect::<Result<Vec<_>>>()?;
        let values = field("values")?
            .as_array()
            .ok_or_else(|| Error::Format("\"values\" must be an array".into()))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| Error::Format("values must be numbers".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(bounds, resolution, values)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub index: Vec<usize>,
    pub point: Vec<f64>,
    pub sigmas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubharmonicReport {
    pub ok: bool,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl SubharmonicReport {
    pub fn to_json(&self) -> Value {
        json!({
            "ok": self.ok,
            "checked": self.checked,
            "violations": self.violations.iter().map(|v| json!({"index": v.index, "point": v.point, "sigmas": v.sigmas})).collect::<Vec<_>>(),
        })
    }
}

/// Γ_m test of the central-difference Hessian at every interior node.
pub fn is_m_subharmonic(u: &GridFunction, m: usize, tol: Option<f64>) -> SubharmonicReport {
    let tol = tol.unwrap_or(DEFAULT_TOL);
    let mut violations = Vec::new();
    let mut checked = 0;
    for k in 0..u.len() {
        if !u.is_interior(k) {
            continue;
        }
        checked += 1;
        let hess = u.hessian_at(k);
        if !is_m_positive(&hess, m, tol) {
            violations.push(Violation { index: u.multi_index(k), point: u.point(k), sigmas: hess.sigmas() });
        }
    }
    SubharmonicReport { ok: violations.is_empty(), checked, violations }
}

/// Discrete convolution with the normalized bump `(1 − |z/h|²)³`, restricted to
/// nodes whose full stencil lies in the box.
pub fn mollify(u: &GridFunction, h: f64) -> Result<GridFunction> {
    let n = u.n();
    let s = u.spacing();
    if s.iter().any(|&si| h < si * (1.0 - 1e-12)) {
        return Err(Error::Mollifier { h, reason: "radius below the grid spacing".into() });
    }
    let reach: Vec<usize> = s.iter().map(|si| (h / si + 1e-9).floor() as usize).collect();
    let out_res: Vec<usize> = u.resolution.iter().zip(&reach).map(|(r, k)| r.saturating_sub(2 * k)).collect();
    if out_res.iter().any(|&r| r < 3) {
        return Err(Error::Mollifier { h, reason: "radius too large for the box".into() });
    }
    // kernel offsets
    let mut offsets: Vec<(isize, f64)> = Vec::new();
    let st = u.strides();
    let span: Vec<usize> = reach.iter().map(|k| 2 * k + 1).collect();
    let total: usize = span.iter().product();
    for code in 0..total {
        let mut c = code;
        let mut r2 = 0.0;
        let mut off = 0isize;
        for a in (0..n).rev() {
            let d = (c % span[a]) as isize - reach[a] as isize;
            c /= span[a];
            r2 += (d as f64 * s[a] / h).powi(2);
            off += d * st[a] as isize;
        }
        if r2 < 1.0 {
            offsets.push((off, (1.0 - r2).powi(3)));
        }
    }
    let norm: f64 = offsets.iter().map(|(_, w)| w).sum();
    offsets.iter_mut().for_each(|(_, w)| *w /= norm);
    let bounds: Vec<(Q, Q)> = u
        .bounds
        .iter()
        .zip(&reach)
        .zip(&u.resolution)
        .map(|(((a, b), &k), &r)| {
            let step = (b - a) / Q::from_integer((r as i64 - 1).into());
            let shift = step * Q::from_integer((k as i64).into());
            (a + &shift, b - &shift)
        })
        .collect();
    let mut out = GridFunction { bounds, resolution: out_res, values: Vec::new() };
    let values = (0..out.len())
        .map(|k| {
            let idx: Vec<usize> = out.multi_index(k).iter().zip(&reach).map(|(i, r)| i + r).collect();
            let center = u.index_of(&idx) as isize;
            offsets.iter().map(|(off, w)| w * u.values[(center + off) as usize]).sum()
        })
        .collect();
    out.values = values;
    Ok(out)
}

/// Nodewise maximum of two functions on the same grid.
pub fn pointwise_max(u: &GridFunction, v: &GridFunction) -> Result<GridFunction> {
    if u.bounds != v.bounds || u.resolution != v.resolution {
        return Err(Error::Grid("grids differ".into()));
    }
    u.with_values(u.values.iter().zip(&v.values).map(|(a, b)| a.max(*b)).collect())
}
