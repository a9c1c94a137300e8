use proptest::prelude::*;
use supertrop::geometry::AffineSubspace;
use supertrop::hessian::convergence::{convergence_experiment, convergence_experiment_resampled, ConvergenceSetup};
use supertrop::hessian::{
    hessian_measure_smooth, is_m_positive, is_m_subharmonic, mollify, pl_monge_ampere, pointwise_max, restrict_to_variety,
    sigmas_exact, superform_constant, superform_wedge_oracle, GridFunction, SymmetricMatrix, DEFAULT_TOL,
};
use supertrop::linalg::{det, subsets};
use supertrop::oracles::gradient_image_atoms;
use supertrop::rational::{q, qf, qvec};
use supertrop::tropical::{parse_tropical, Term, TropicalPolynomial};
use supertrop::Q;

fn identity(n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|i| (0..n).map(|j| q((i == j) as i64)).collect()).collect()
}

/// σ_k as the sum of principal k-minors.
fn sigma_by_minors(a: &[Vec<Q>], k: usize) -> Q {
    subsets(a.len(), k)
        .iter()
        .map(|idx| det(&idx.iter().map(|&i| idx.iter().map(|&j| a[i][j].clone()).collect()).collect::<Vec<_>>()))
        .sum()
}

fn binom(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[test]
fn constant_consistency() {
    for n in 1..=4 {
        for m in 0..=n {
            let fact: u64 = (1..=n as u64).product();
            let lhs = superform_wedge_oracle(&vec![identity(n); m], n - m).unwrap();
            assert_eq!(lhs, q(fact as i64));
            assert_eq!(superform_constant(m, n) * binom(n, m), fact);
        }
    }
}

#[test]
fn hessian_of_saddle_is_in_gamma_1_only() {
    let m = SymmetricMatrix::diag(&[2.0, 2.0, -2.0]);
    assert!(is_m_positive(&m, 1, DEFAULT_TOL));
    assert!(!is_m_positive(&m, 2, DEFAULT_TOL));
    let u = GridFunction::sample_cube(3, q(-1), q(1), 9, |x| x[0] * x[0] + x[1] * x[1] - x[2] * x[2]).unwrap();
    assert!(!is_m_subharmonic(&u, 2, None).ok);
    assert!(is_m_subharmonic(&u, 1, None).ok);
}

#[test]
fn pl_atoms_match_gradient_images() {
    for s in ["max(0, x1, x2)", "max(0, x1, x2, -1 + x1 + x2)", "max(1, x1 + 2, 2*x2 - 1, 3*x1 + x2, -x1 - x2 + 2)"] {
        let f = parse_tropical(s, 2).unwrap();
        let mu = pl_monge_ampere(&f);
        let oracle = gradient_image_atoms(&f);
        let got: Vec<(Vec<Q>, Q)> = mu.atoms.iter().map(|a| (a.point.clone(), a.mass.clone())).collect();
        assert_eq!(got, oracle, "{s}");
        assert_eq!(mu.atom_mass(), q(2) * f.newton_polytope().volume());
    }
}

#[test]
fn smooth_masses() {
    let u = GridFunction::sample_cube(2, q(0), q(1), 21, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
    for m in 1..=2 {
        let mu = hessian_measure_smooth(&u, m, None).unwrap();
        assert!((mu.total() - 2.0).abs() < 1e-9);
        assert!(mu.min_density() >= 0.0);
    }
}

#[test]
fn max_of_subharmonic_functions_after_mollification() {
    let a = GridFunction::sample_cube(2, q(-1), q(1), 61, |x| x[0] * x[0] - 0.5 * x[1] * x[1]).unwrap();
    let b = GridFunction::sample_cube(2, q(-1), q(1), 61, |x| 0.3 * x[1] * x[1] + x[0]).unwrap();
    assert!(is_m_subharmonic(&a, 1, None).ok && is_m_subharmonic(&b, 1, None).ok);
    let mx = pointwise_max(&a, &b).unwrap();
    let smooth = mollify(&mx, 0.2).unwrap();
    let report = is_m_subharmonic(&smooth, 1, Some(1e-6));
    assert!(report.ok, "{} violations", report.violations.len());
}

#[test]
fn quadratic_masses_are_stable_under_mollification() {
    let u = GridFunction::sample_cube(2, q(-1), q(1), 81, |x| 0.5 * (x[0] * x[0] + 2.0 * x[1] * x[1])).unwrap();
    let rows = convergence_experiment(&u, 2, &[0.3, 0.2, 0.1], &ConvergenceSetup::ball(2, 0.5, None)).unwrap();
    for r in &rows[1..] {
        assert!(r.change.unwrap() < 1e-2, "{rows:?}");
    }
    let aff = GridFunction::sample_cube(2, q(-1), q(1), 41, |x| x[0] - x[1]).unwrap();
    let rows = convergence_experiment(&aff, 2, &[0.3, 0.2], &ConvergenceSetup::ball(2, 0.5, Some(0.0))).unwrap();
    assert!(rows.iter().all(|r| r.total.abs() < 1e-9));
}

#[test]
fn pl_mass_converges() {
    let mut setup = ConvergenceSetup::ball(2, 0.5, Some(1.0));
    setup.tol = Some(0.05);
    let rows = convergence_experiment_resampled(|x| 0f64.max(x[0]).max(x[1]), 2, &[0.4, 0.2, 0.1], &setup).unwrap();
    let devs: Vec<f64> = rows.iter().map(|r| r.deviation.unwrap()).collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    assert!(devs[2] < 0.02);
}

#[test]
fn restriction_to_a_coordinate_plane() {
    let u = GridFunction::sample_cube(3, qf(-1, 2), qf(1, 2), 17, |x| 0.5 * x.iter().map(|a| a * a).sum::<f64>()).unwrap();
    let r = restrict_to_variety(&u, &AffineSubspace::coordinate_hyperplane(3, 2, q(0)), 2, None).unwrap();
    assert!((r.lhs - 2.0).abs() < 0.02 && (r.rhs - 2.0).abs() < 0.02, "{r:?}");
}

fn sym_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| {
        (0..n).map(|i| (0..n).map(|j| if i <= j { v[i * n + j] } else { v[j * n + i] }).collect()).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_matches_minors_and_oracle(a in (1usize..=4).prop_flat_map(sym_matrix)) {
        let n = a.len();
        let aq: Vec<Vec<Q>> = a.iter().map(|r| qvec(r)).collect();
        let s = sigmas_exact(&aq);
        let fl = SymmetricMatrix::from_rows(&a.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect::<Vec<_>>()).unwrap();
        for m in 1..=n {
            prop_assert_eq!(&s[m - 1], &sigma_by_minors(&aq, m));
            let wedge = superform_wedge_oracle(&vec![aq.clone(); m], n - m).unwrap();
            prop_assert_eq!(wedge, q(superform_constant(m, n) as i64) * s[m - 1].clone());
            prop_assert!((fl.sigma_k(m).unwrap() - supertrop::rational::to_f64(&s[m - 1])).abs() < 1e-9);
        }
    }

    #[test]
    fn gamma_cones_nest_and_add(a in sym_matrix(3), b in sym_matrix(3), m in 1usize..=3) {
        let to = |a: &Vec<Vec<i64>>| SymmetricMatrix::from_rows(&a.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect::<Vec<_>>()).unwrap();
        let (ma, mb) = (to(&a), to(&b));
        if is_m_positive(&ma, m, 0.0) {
            for j in 1..m {
                prop_assert!(is_m_positive(&ma, j, 0.0));
            }
            if is_m_positive(&mb, m, 0.0) {
                prop_assert!(is_m_positive(&ma.add(&mb), m, DEFAULT_TOL));
            }
        }
    }

    #[test]
    fn restriction_sides_agree(c in prop::collection::vec(1i64..=3, 3), dir in prop::collection::vec(-2i64..=2, 3), off in -2i64..=2) {
        prop_assume!(dir.iter().any(|&d| d != 0));
        // u quadratic with diagonal Hessian c, V = plane through (0,0,off/8) spanned by e_1 and a random direction
        let u = GridFunction::sample_cube(3, qf(-1, 2), qf(1, 2), 9, |x| (0..3).map(|i| 0.5 * c[i] as f64 * x[i] * x[i]).sum()).unwrap();
        prop_assume!(dir[1] != 0 || dir[2] != 0);
        let v = AffineSubspace::new(vec![qvec(&[1, 0, 0]), qvec(&dir)], vec![q(0), q(0), qf(off, 8)]).unwrap();
        let g = [(-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5)];
        let r = restrict_to_variety(&u, &v, 2, Some(&g)).unwrap();
        // both sides integrate the same density; their quadratures differ at O(spacing)
        prop_assert!((r.lhs - r.rhs).abs() <= 0.15 * r.rhs.abs().max(1.0), "{:?}", r);
    }

    #[test]
    fn pl_atoms_scale(terms in prop::collection::btree_map(prop::collection::vec(0i64..=3, 2), -3i64..=3, 3..=6)) {
        let f = TropicalPolynomial::new(2, terms.into_iter().map(|(a, u)| Term::new(a, q(u))).collect()).unwrap();
        let mu = pl_monge_ampere(&f);
        prop_assert!(mu.atoms.iter().all(|a| a.mass > q(0)));
        prop_assert_eq!(mu.atom_mass(), q(2) * f.newton_polytope().volume());
    }
}
