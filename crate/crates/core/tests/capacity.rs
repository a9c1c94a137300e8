use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supertrop::capacity::*;
use supertrop::geometry::AffineSubspace;
use supertrop::hessian::GridFunction;
use supertrop::oracles::fine_grid_capacity;
use supertrop::rational::q;

const TOL: f64 = 1e-4;

fn precise() -> SolveOptions {
    SolveOptions { tol: 1e-12, max_iter: 1_000_000, ..Default::default() }
}

fn ball(center: Vec<f64>, radius: f64) -> Shape {
    Shape::Ball { center, radius }
}

fn shapes(v: Vec<Shape>) -> MaskSpec {
    MaskSpec::Shapes(v)
}

fn disk(r: f64) -> MaskSpec {
    shapes(vec![ball(vec![0.0, 0.0], r)])
}

fn random_shape(rng: &mut ChaCha8Rng) -> Shape {
    let c: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.3..0.3)).collect();
    if rng.gen_bool(0.5) {
        ball(c, rng.gen_range(0.05..0.25))
    } else {
        let w: Vec<f64> = (0..2).map(|_| rng.gen_range(0.05..0.25)).collect();
        Shape::Box { lo: c.iter().zip(&w).map(|(a, b)| a - b).collect(), hi: c.iter().zip(&w).map(|(a, b)| a + b).collect() }
    }
}

fn grown(s: &Shape, f: f64) -> Shape {
    match s {
        Shape::Ball { center, radius } => ball(center.clone(), radius * f),
        Shape::Box { lo, hi } => {
            let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
            Shape::Box {
                lo: lo.iter().zip(&mid).map(|(a, c)| c + (a - c) * f).collect(),
                hi: hi.iter().zip(&mid).map(|(b, c)| c + (b - c) * f).collect(),
            }
        }
    }
}

fn cap(p: &CapacityProblem, k: MaskSpec) -> f64 {
    let r = capacity_with(&p.with_k(k), precise()).unwrap();
    assert!(r.extremal.converged);
    assert!(r.lower_bound <= r.value + TOL, "lower bound {} above {}", r.lower_bound, r.value);
    r.value
}

#[test]
fn properties_on_random_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for family in 0..10 {
        let mut base = CapacityProblem::unit_box(2, 65, MaskSpec::empty(), 1);
        if family % 2 == 1 {
            base = base.with_domain(disk(0.95));
        }
        let a = random_shape(&mut rng);
        let b = random_shape(&mut rng);
        let ca = cap(&base, shapes(vec![a.clone()]));
        let cb = cap(&base, shapes(vec![b.clone()]));
        let cab = cap(&base, shapes(vec![a.clone(), b.clone()]));
        assert!(ca <= cab + TOL && cb <= cab + TOL, "family {family}: monotonicity {ca} {cb} {cab}");
        assert!(cab <= ca + cb + TOL, "family {family}: subadditivity {ca} + {cb} < {cab}");
        // K_j grows to the interior of `a`; only distinct node sets are solved
        let grid = base.box_grid().unwrap();
        let (mut prev, mut last, mut union) = (0.0, Vec::new(), vec![false; grid.len()]);
        for j in 1..=40 {
            let kj = shapes(vec![grown(&a, 1.0 - 0.5f64.powi(j))]);
            let nodes = kj.rasterize(&grid).unwrap();
            union.iter_mut().zip(&nodes).for_each(|(u, n)| *u |= *n);
            if nodes == last {
                continue;
            }
            let c = cap(&base, kj);
            assert!(c >= prev - TOL, "family {family}: exhaustion step {j} decreased");
            (prev, last) = (c, nodes);
        }
        let all = MaskSpec::Nodes((0..grid.len()).filter(|&i| union[i]).collect());
        let limit = cap(&base, all);
        assert!((prev - limit).abs() <= TOL, "family {family}: exhaustion limit {prev} vs {limit}");
        assert!(limit <= ca + TOL);
    }
}

#[test]
fn empty_set_has_zero_capacity() {
    for m in 1..=2 {
        let r = capacity(&CapacityProblem::unit_box(2, 17, MaskSpec::empty(), m)).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.extremal.u.values().iter().all(|v| *v == 0.0));
    }
}

#[test]
fn concentric_balls_match_the_fine_grid_oracle() {
    let p = CapacityProblem::unit_box(2, 65, disk(0.5), 1).with_domain(disk(1.0));
    let coarse = capacity_with(&p, precise()).unwrap().value;
    let fine = fine_grid_capacity(&p, 4).unwrap();
    assert!((coarse - fine).abs() <= 0.05 * fine, "{coarse} vs {fine}");
    // the continuum value is 2π / ln 2
    let exact = 2.0 * std::f64::consts::PI / 2f64.ln();
    assert!((fine - exact).abs() <= 0.02 * exact, "{fine} vs {exact}");
}

#[test]
fn monge_ampere_capacity_is_stable_under_refinement() {
    let at = |res: usize| {
        let p = CapacityProblem::unit_box(2, res, disk(0.5), 2).with_domain(disk(1.0));
        capacity_with(&p, SolveOptions { tol: 1e-9, ..Default::default() }).unwrap().value
    };
    let (a, b) = (at(65), at(129));
    assert!((a - b).abs() <= 0.05 * b, "{a} vs {b}");
    // cone of slope 2 over the unit disk: 2 · π · 2²
    let exact = 8.0 * std::f64::consts::PI;
    assert!((b - exact).abs() <= 0.03 * exact, "{b} vs {exact}");
}

#[test]
fn square_obstacle_reproduces_the_pyramid() {
    // K = [-1/2, 1/2]², D = (-1, 1)²: the extremal function is the pyramid and
    // the Monge-Ampère mass is 2 · 2² · 2
    let k = shapes(vec![Shape::Box { lo: vec![-0.5, -0.5], hi: vec![0.5, 0.5] }]);
    let p = CapacityProblem::unit_box(2, 65, k, 2);
    let r = capacity_with(&p, SolveOptions { tol: 1e-9, ..Default::default() }).unwrap();
    let g = &r.extremal.u;
    for i in 0..g.len() {
        let x = g.point(i);
        let pyramid = (2.0 * (x[0].abs().max(x[1].abs()) - 1.0)).clamp(-1.0, 0.0);
        assert!((g.values()[i] - pyramid).abs() < 1e-6, "at {x:?}");
    }
    assert!((r.value - 16.0).abs() < 0.02 * 16.0, "{}", r.value);
}

#[test]
fn sweeps_are_nondecreasing_and_orders_agree() {
    let p = CapacityProblem::unit_box(2, 33, disk(0.4), 2).with_domain(disk(0.9));
    let mut s = ExtremalSolver::new(p.layout().unwrap());
    let mut prev = s.values().to_vec();
    for _ in 0..50 {
        s.sweep(SweepOrder::Lexicographic);
        assert!(s.values().iter().zip(&prev).all(|(a, b)| a >= b));
        prev = s.values().to_vec();
    }
    let lex = relative_extremal_with(&p, 1e-12, 1_000_000, SweepOrder::Lexicographic, Scheme::Monotone).unwrap();
    let col = relative_extremal_with(&p, 1e-12, 1_000_000, SweepOrder::Colored, Scheme::Monotone).unwrap();
    let gap = lex.u.values().iter().zip(col.u.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap < 1e-8, "{gap}");
}

#[test]
fn extremal_function_is_admissible() {
    for m in 1..=2 {
        let p = CapacityProblem::unit_box(2, 33, disk(0.4), m).with_domain(disk(0.9));
        let layout = p.layout().unwrap();
        let e = relative_extremal(&p, 1e-12, 1_000_000).unwrap();
        for (i, kind) in layout.kinds.iter().enumerate() {
            let v = e.u.values()[i];
            assert!((-1.0..=0.0).contains(&v));
            match kind {
                NodeKind::Obstacle => assert_eq!(v, -1.0),
                NodeKind::Outside => assert_eq!(v, 0.0),
                NodeKind::Free => {}
            }
        }
    }
}

#[test]
fn restriction_to_a_plane_matches_the_planar_problem() {
    let b3 = shapes(vec![ball(vec![0.0; 3], 0.5)]);
    let d3 = shapes(vec![ball(vec![0.0; 3], 1.0)]);
    let v = AffineSubspace::coordinate_hyperplane(3, 2, q(0));
    let restricted = CapacityProblem::unit_box(3, 33, b3, 2).with_domain(d3).with_variety(v);
    let planar = CapacityProblem::unit_box(2, 33, disk(0.5), 1).with_domain(disk(1.0));
    let a = capacity_with(&restricted, precise()).unwrap().value;
    let b = capacity_with(&planar, precise()).unwrap().value;
    assert!((a - b).abs() < 1e-8, "{a} vs {b}");
}

#[test]
fn invalid_problems_are_rejected() {
    assert!(CapacityProblem::unit_box(2, 17, disk(0.3), 3).layout().is_err());
    let v = AffineSubspace::coordinate_hyperplane(3, 2, q(0));
    assert!(CapacityProblem::unit_box(3, 9, MaskSpec::empty(), 1).with_variety(v).layout().is_err());
    // K touching the boundary of D
    assert!(CapacityProblem::unit_box(2, 17, disk(0.95), 1).layout().is_err());
}

#[test]
fn single_point_is_polar_for_the_laplacian_in_three_dimensions() {
    let centre = |res: usize| MaskSpec::Nodes(vec![(res / 2) * (res * res + res + 1)]);
    let mut prev = f64::INFINITY;
    for res in [9, 17, 33] {
        let p = CapacityProblem::unit_box(3, res, centre(res), 1);
        let c = capacity_with(&p, SolveOptions { tol: 1e-10, ..Default::default() }).unwrap().value;
        // Newtonian capacity of a point scales like the grid spacing
        assert!(c < 0.6 * prev, "res {res}: {c} after {prev}");
        prev = c;
    }
    let p = CapacityProblem::unit_box(3, 33, MaskSpec::empty(), 1);
    assert!(pluripolar_test(&centre(33), &p, 0.6).unwrap());
    assert!(pluripolar_test(&MaskSpec::empty(), &p, 1e-12).unwrap());
    let sub = shapes(vec![Shape::Box { lo: vec![-0.3; 3], hi: vec![0.3; 3] }]);
    assert!(!pluripolar_test(&sub, &p, 0.6).unwrap());
}

#[test]
fn quasicontinuity_of_the_tropical_line() {
    let u = GridFunction::sample_cube(2, q(-1), q(1), 65, |x| x[0].max(x[1]).max(0.0)).unwrap();
    for m in 1..=2 {
        let t = std::time::Instant::now();
        let report = quasicontinuity_experiment(&u, m, 1e-3).unwrap();
        assert!(report.nonincreasing(TOL));
        let k = report.first_below.expect("capacity falls below eps");
        assert!(report.rows.iter().any(|r| r.k == k && r.capacity < 1e-3));
        assert!(t.elapsed().as_secs() < 120);
    }
}

#[test]
fn quasicontinuity_with_a_steep_function_finds_exceedance_sets() {
    // a steep convex function, so the first mollifications exceed u + 1/k somewhere
    let u = GridFunction::sample_cube(2, q(-1), q(1), 33, |x| 20.0 * x[0].max(x[1]).max(0.0)).unwrap();
    let report = quasicontinuity_experiment(&u, 1, 1e-3).unwrap();
    assert!(report.rows.iter().any(|r| r.nodes > 0));
    for r in &report.rows {
        assert!(r.lower_bound <= r.capacity + TOL);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn monotone_in_the_obstacle(lo in -0.3f64..0.0, w in 0.1f64..0.3, grow in 0.0f64..0.15, m in 1usize..=2) {
        let small = shapes(vec![Shape::Box { lo: vec![lo, lo], hi: vec![lo + w, lo + w] }]);
        let large = shapes(vec![Shape::Box { lo: vec![lo - grow, lo], hi: vec![lo + w, lo + w + grow] }]);
        let p = CapacityProblem::unit_box(2, 33, MaskSpec::empty(), m).with_domain(disk(0.95));
        let a = capacity_with(&p.with_k(small), precise()).unwrap();
        let b = capacity_with(&p.with_k(large), precise()).unwrap();
        prop_assert!(a.value <= b.value + TOL);
        prop_assert!(a.lower_bound <= a.value + TOL);
        prop_assert!(b.lower_bound <= b.value + TOL);
    }
}
