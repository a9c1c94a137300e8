//! Masses of `hessian_measure_smooth(mollify(u, h), m)` along a decreasing sequence of radii.

use serde_json::{json, Value};

use super::grid::{mollify, GridFunction};
use super::measure::hessian_measure_smooth;
use crate::error::{Error, Result};

/// Smooth compactly supported weight `(1 − |x − c|²/r²)³₊`.
pub fn bump(center: &[f64], radius: f64) -> impl Fn(&[f64]) -> f64 + '_ {
    move |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (radius * radius);
        if r2 < 1.0 {
            (1.0 - r2).powi(3)
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub total: f64,
    /// Mass of the closed ball of the experiment.
    pub ball: f64,
    /// Masses against the two fixed bump weights.
    pub tests: [f64; 2],
    /// `|ball − target|` when a target is given.
    pub deviation: Option<f64>,
    /// Change of the ball mass from the previous row.
    pub change: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceSetup {
    pub center: Vec<f64>,
    pub radius: f64,
    pub target: Option<f64>,
    pub tol: Option<f64>,
}

impl ConvergenceSetup {
    pub fn ball(n: usize, radius: f64, target: Option<f64>) -> Self {
        Self { center: vec![0.0; n], radius, target, tol: None }
    }
}

/// Test weights: a bump on the experiment ball and a smaller off-center bump.
fn test_weights(setup: &ConvergenceSetup) -> [(Vec<f64>, f64); 2] {
    let mut off = setup.center.clone();
    off[0] += setup.radius / 5.0;
    if off.len() > 1 {
        off[1] -= setup.radius / 10.0;
    }
    [(setup.center.clone(), setup.radius), (off, 0.6 * setup.radius)]
}

/// Runs the experiment with a fresh sample of `u` for each radius, built by `sample(h)`.
pub fn convergence_experiment_with(
    sample: impl Fn(f64) -> Result<GridFunction>,
    m: usize,
    hs: &[f64],
    setup: &ConvergenceSetup,
) -> Result<Vec<ConvergenceRow>> {
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::OutOfRange("radii must be strictly decreasing".into()));
    }
    let weights = test_weights(setup);
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &h in hs {
        let u = sample(h)?;
        let mu = hessian_measure_smooth(&mollify(&u, h)?, m, setup.tol)?;
        let r2 = setup.radius * setup.radius;
        let ball = mu.integrate(|x| {
            let d: f64 = x.iter().zip(&setup.center).map(|(a, b)| (a - b) * (a - b)).sum();
            if d <= r2 {
                1.0
            } else {
                0.0
            }
        });
        let tests = [mu.integrate(bump(&weights[0].0, weights[0].1)), mu.integrate(bump(&weights[1].0, weights[1].1))];
        let change = rows.last().map(|r| (ball - r.ball).abs());
        rows.push(ConvergenceRow {
            h,
            total: mu.total(),
            ball,
            tests,
            deviation: setup.target.map(|t| (ball - t).abs()),
            change,
        });
    }
    Ok(rows)
}

/// Grid spacing used when a piecewise-linear input is resampled for radius `h`.
///
/// Central differences of a mollified kink carry an error of relative size
/// `(s/h)²` spread over a layer of width `h` along every ridge, so the mass
/// error behaves like `s²/h³`; `s = h²/2` makes it shrink linearly in `h`.
pub fn refined_spacing(h: f64) -> f64 {
    h * h / 2.0
}

/// Runs the experiment on `f`, resampled around the ball for each radius.
pub fn convergence_experiment_resampled(
    f: impl Fn(&[f64]) -> f64,
    m: usize,
    hs: &[f64],
    setup: &ConvergenceSetup,
) -> Result<Vec<ConvergenceRow>> {
    convergence_experiment_with(
        |h| {
            let s = refined_spacing(h);
            GridFunction::sample_around(&setup.center, setup.radius + h + 2.0 * s, s, &f)
        },
        m,
        hs,
        setup,
    )
}

/// Runs the experiment on a fixed sampled function.
pub fn convergence_experiment(u: &GridFunction, m: usize, hs: &[f64], setup: &ConvergenceSetup) -> Result<Vec<ConvergenceRow>> {
    convergence_experiment_with(|_| Ok(u.clone()), m, hs, setup)
}

pub fn rows_to_json(rows: &[ConvergenceRow]) -> Value {
    json!(rows
        .iter()
        .map(|r| json!({
            "h": r.h,
            "total": r.total,
            "ball": r.ball,
            "tests": r.tests,
            "deviation": r.deviation,
            "change": r.change,
        }))
        .collect::<Vec<_>>())
}
