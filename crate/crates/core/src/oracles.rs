//! Brute-force reference computations, kept independent of the production algorithms.

use num_traits::{One, Zero};

use crate::capacity::{capacity_with, CapacityProblem, NodeKind, SolveOptions};
use crate::error::{Error, Result};
use crate::hessian::superform_constant;
use crate::geometry::Polytope;
use crate::linalg::{rank, solve, subsets};
use crate::rational::Q;
use crate::tropical::TropicalPolynomial;

fn monomials(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    if vars == 1 {
        return vec![vec![degree]];
    }
    (0..=degree)
        .rev()
        .flat_map(|d| monomials(vars - 1, degree - d).into_iter().map(move |mut rest| {
            rest.insert(0, d);
            rest
        }))
        .collect()
}

/// Normalized mixed volume read off as the `t_1⋯t_n` coefficient of the
/// polynomial `t ↦ Vol(t_1 P_1 + ⋯ + t_n P_n)`, fitted from exact samples.
pub fn mixed_volume_by_expansion(bodies: &[Polytope]) -> Result<Q> {
    let n = bodies.first().ok_or(Error::WrongBodyCount { expected: 1, found: 0 })?.n();
    if bodies.len() != n {
        return Err(Error::WrongBodyCount { expected: n, found: bodies.len() });
    }
    let monos = monomials(n, n);
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut vals: Vec<Q> = Vec::new();
    let mut code = 0usize;
    let base = n + 2;
    while rows.len() < monos.len() {
        let mut t = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            t.push(Q::from_integer(((c % base) as i64 + 1).into()));
            c /= base;
        }
        code += 1;
        let row: Vec<Q> = monos
            .iter()
            .map(|e| e.iter().zip(&t).fold(Q::one(), |acc, (&k, ti)| acc * num_traits::pow(ti.clone(), k)))
            .collect();
        let mut trial = rows.clone();
        trial.push(row.clone());
        if rank(&trial) == trial.len() {
            let mut sum = bodies[0].scale(&t[0]);
            for (b, ti) in bodies.iter().zip(&t).skip(1) {
                sum = sum.minkowski_sum(&b.scale(ti))?;
            }
            rows.push(row);
            vals.push(sum.volume());
        }
    }
    let coeffs = solve(&rows, &vals).expect("sample matrix is invertible");
    let target = vec![1usize; n];
    Ok(coeffs[monos.iter().position(|e| *e == target).expect("square-free monomial")].clone())
}

/// Atoms of `(dd#f)^n` from gradient images: at every point where the active
/// gradients span a full-dimensional polytope `∂f(x)`, mass `n!·Vol(∂f(x))`.
pub fn gradient_image_atoms(f: &TropicalPolynomial) -> Vec<(Vec<Q>, Q)> {
    let n = f.n();
    let fact = Q::from_integer((1..=n as i64).product::<i64>().into());
    let mut found: Vec<(Vec<Q>, Q)> = Vec::new();
    for pick in subsets(f.terms().len(), n + 1) {
        let t0 = &f.terms()[pick[0]];
        let a: Vec<Vec<Q>> =
            pick[1..].iter().map(|&i| f.terms()[i].alpha_q().iter().zip(t0.alpha_q()).map(|(x, y)| x - y).collect()).collect();
        if rank(&a) < n {
            continue;
        }
        let b: Vec<Q> = pick[1..].iter().map(|&i| &f.terms()[i].upsilon - &t0.upsilon).collect();
        let x = solve(&a, &b).expect("independent rows");
        if found.iter().any(|(p, _)| *p == x) {
            continue;
        }
        let active = f.active_terms(&x);
        if !pick.iter().all(|i| active.contains(i)) {
            continue;
        }
        let grads: Vec<Vec<i64>> = active.iter().map(|&i| f.terms()[i].alpha.clone()).collect();
        let vol = Polytope::from_integer_points(&grads).expect("lattice points").volume();
        if !vol.is_zero() {
            found.push((x, vol * &fact));
        }
    }
    found.sort();
    found
}

/// Capacity on a grid `factor` times finer. For `m − p = 1` the discrete problem is
/// linear and is solved here by plain SOR, independently of the Perron iteration;
/// for higher degrees the refined problem goes through the production solver.
pub fn fine_grid_capacity(prob: &CapacityProblem, factor: usize) -> Result<f64> {
    if !prob.k.is_geometric() {
        return Err(Error::Problem("the fine-grid oracle needs K given by shapes".into()));
    }
    let mut fine = prob.clone();
    fine.resolution = prob.resolution.iter().map(|r| factor * (r - 1) + 1).collect();
    let layout = fine.layout()?;
    if layout.degree > 1 {
        let opts = SolveOptions { tol: 1e-9, ..SolveOptions::default() };
        return Ok(capacity_with(&fine, opts)?.value);
    }
    let g = &layout.grid;
    let n = g.n();
    let inv: Vec<f64> = g.spacing().iter().map(|s| 1.0 / (s * s)).collect();
    let diag: f64 = 2.0 * inv.iter().sum::<f64>();
    let st = g.strides();
    let mut u: Vec<f64> = layout.kinds.iter().map(|k| if *k == NodeKind::Obstacle { -1.0 } else { 0.0 }).collect();
    let free: Vec<usize> = (0..g.len()).filter(|&i| layout.kinds[i] == NodeKind::Free).collect();
    let longest = g.resolution().iter().copied().max().unwrap_or(3) as f64;
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / longest).sin());
    for _ in 0..1_000_000 {
        let mut change: f64 = 0.0;
        for &i in &free {
            let mut s = 0.0;
            for a in 0..n {
                s += (u[i + st[a]] + u[i - st[a]]) * inv[a];
            }
            let gs = s / diag;
            let next = u[i] + omega * (gs - u[i]);
            change = change.max((next - u[i]).abs());
            u[i] = next;
        }
        if change < 1e-13 {
            break;
        }
    }
    let lap = |i: usize| (0..n).map(|a| (u[i + st[a]] + u[i - st[a]] - 2.0 * u[i]) * inv[a]).sum::<f64>();
    let c = superform_constant(1, n) as f64;
    Ok(layout.obstacle().map(lap).sum::<f64>() * c * g.cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};
    use crate::tropical::parse_tropical;

    #[test]
    fn expansion_examples() {
        let tri = Polytope::from_integer_points(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let sq = Polytope::from_integer_points(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(mixed_volume_by_expansion(&[tri.clone(), tri.clone()]).unwrap(), q(1));
        assert_eq!(mixed_volume_by_expansion(&[sq.clone(), sq]).unwrap(), q(2));
        assert_eq!(monomials(3, 3).len(), 10);
    }

    #[test]
    fn gradient_images() {
        let atoms = gradient_image_atoms(&parse_tropical("max(0, x1, x2)", 2).unwrap());
        assert_eq!(atoms, vec![(qvec(&[0, 0]), q(1))]);
        let atoms = gradient_image_atoms(&parse_tropical("max(0, 2*x1)", 1).unwrap());
        assert_eq!(atoms, vec![(qvec(&[0]), q(2))]);
    }
}
