use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use supertrop::capacity::CapacityProblem;
use supertrop::geometry::{Polytope, WeightedComplex};
use supertrop::hessian::GridFunction;
use supertrop::indicators::Indicator;
use supertrop::tropical::{hypersurface, TropicalPolynomial};
use tempfile::TempDir;

const LINE: &str = r#"{"n": 2, "expr": "max(0, x1, x2)"}"#;
const LIFTED_SQUARE: &str = r#"{"n": 2, "terms": [
    {"alpha": [0, 0], "upsilon": [0, 1]}, {"alpha": [1, 0], "upsilon": [0, 1]},
    {"alpha": [0, 1], "upsilon": [0, 1]}, {"alpha": [1, 1], "upsilon": [-1, 1]}]}"#;
const DISK_PROBLEM: &str = r#"{"box": [[-1, 1], [-1, 1]], "resolution": 17, "m": 1,
    "K": [{"ball": {"center": [0, 0], "radius": 0.5}}],
    "D": [{"ball": {"center": [0, 0], "radius": 1}}]}"#;

struct Sandbox(TempDir);

impl Sandbox {
    fn new() -> Self {
        Sandbox(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> &Self {
        std::fs::write(self.0.path().join(name), text).unwrap();
        self
    }

    fn path(&self, name: &str) -> std::path::PathBuf {
        self.0.path().join(name)
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap()
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_supertrop")).args(args).current_dir(self.0.path()).output().unwrap()
    }

    fn json(&self, args: &[&str]) -> Value {
        let out = self.run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_slice(&out.stdout).unwrap()
    }
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn grid_file(res: usize, f: impl Fn(f64, f64) -> f64) -> String {
    let mut values = Vec::new();
    for i in 0..res {
        for j in 0..res {
            let (x, y) = (-1.0 + 2.0 * i as f64 / (res - 1) as f64, -1.0 + 2.0 * j as f64 / (res - 1) as f64);
            values.push(f(x, y));
        }
    }
    json!({"box": [[-1, 1], [-1, 1]], "resolution": [res, res], "values": values}).to_string()
}

#[test]
fn eval_at_a_point() {
    let s = Sandbox::new();
    s.file("f.json", LINE);
    assert_eq!(s.json(&["eval", "f.json", "--at", "1,0"]), json!({"value": "1"}));
    assert_eq!(s.json(&["eval", "f.json", "--at", "-1/2,-3"]), json!({"value": "0"}));
    assert_eq!(s.run(&["eval", "f.json", "--at", "1"]).status.code(), Some(2));
}

#[test]
fn two_lines_meet_with_mass_one() {
    let s = Sandbox::new();
    s.file("lines.json", r#"{"polynomials": [{"n": 2, "expr": "max(0, x1, x2)"}, {"n": 2, "expr": "max(1, x1, x2 - 2)"}]}"#);
    assert_eq!(s.json(&["intersect", "lines.json", "--mass"]), json!({"mass": "1"}));
    // the same pair split over two files
    s.file("a.json", LINE).file("b.json", r#"{"n": 2, "expr": "max(1, x1, x2 - 2)"}"#);
    assert_eq!(s.json(&["intersect", "a.json", "b.json", "--mass"]), json!({"mass": "1"}));
    let cycle = s.json(&["intersect", "a.json", "b.json", "--seed", "7"]);
    assert_eq!(cycle["balancing"]["balanced"], json!(true));
}

#[test]
fn hessian_refusal_writes_a_violation_map() {
    let s = Sandbox::new();
    s.file("u.json", &grid_file(17, |x, y| x * x - y * y));
    let out = s.run(&["hessian", "u.json", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("u.json.violations.json"), "{}", stderr(&out));
    let map: Value = serde_json::from_str(&s.read("u.json.violations.json")).unwrap();
    assert_eq!(map["ok"], json!(false));
    assert_eq!(map["violations"].as_array().unwrap().len(), 15 * 15);
    // the same function is subharmonic, with zero Laplacian
    let mu = s.json(&["hessian", "u.json", "--m", "1"]);
    assert!(mu["total"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn hessian_density_goes_to_a_sidecar() {
    let s = Sandbox::new();
    s.file("u.json", &grid_file(9, |x, y| (x * x + y * y) / 2.0));
    let out = s.run(&["hessian", "u.json", "--m", "2", "--out", "mu.json"]);
    assert_eq!(out.status.code(), Some(0));
    let mu: Value = serde_json::from_str(&s.read("mu.json")).unwrap();
    assert_eq!(mu["density"], json!("mu.json.density.json"));
    let density = GridFunction::from_json(&serde_json::from_str(&s.read("mu.json.density.json")).unwrap()).unwrap();
    // 2!·0!·σ_2(I) = 2 everywhere
    assert!(density.values().iter().all(|v| (v - 2.0).abs() < 1e-9));
}

#[test]
fn input_errors_exit_with_two() {
    let s = Sandbox::new();
    s.file("bad.json", "{\"n\": 2,\n \"terms\": [\n").file("f.json", LINE);
    let out = s.run(&["frobnicate", "f.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
    let out = s.run(&["eval", "bad.json", "--at", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.json:3:"), "{}", stderr(&out));
    let out = s.run(&["eval", "missing.json", "--at", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
    s.file("dup.json", r#"{"n": 1, "terms": [{"alpha": [1], "upsilon": 0}, {"alpha": [1], "upsilon": 1}]}"#);
    assert_eq!(s.run(&["newton", "dup.json"]).status.code(), Some(2));
}

#[test]
fn capacity_and_non_convergence() {
    let s = Sandbox::new();
    s.file("p.json", DISK_PROBLEM);
    let r = s.json(&["capacity", "p.json"]);
    assert_eq!(r["converged"], json!(true));
    let cap = r["capacity"].as_f64().unwrap();
    assert!(r["lower_bound"].as_f64().unwrap() <= cap + 1e-4);
    assert!((cap - 2.0 * std::f64::consts::PI / 2f64.ln()).abs() < 0.15 * cap);
    let out = s.run(&["capacity", "p.json", "--max-iter", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let partial: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(partial["converged"], json!(false));
    // a larger obstacle through --mask has larger capacity
    let bigger = s.json(&["capacity", "p.json", "--mask", r#"[{"ball": {"center": [0, 0], "radius": 0.6}}]"#]);
    assert!(bigger["capacity"].as_f64().unwrap() > cap);
}

#[test]
fn oracles_are_exposed() {
    let s = Sandbox::new();
    s.file("lines.json", &format!("[{LINE}, {LINE}]")).file("sq.json", LIFTED_SQUARE).file("p.json", DISK_PROBLEM);
    let mv = s.json(&["oracle", "mixed-volume", "lines.json"]);
    assert_eq!(mv["mixed_volume"], json!("1"));
    assert_eq!(mv["agree"], json!(true));
    let gi = s.json(&["oracle", "gradient-image", "sq.json"]);
    assert_eq!(gi["total"], json!("2"));
    assert_eq!(gi["agree"], json!(true));
    // σ_2 of the identity in the plane: 2!·0!·1 = 2
    s.file("w.json", r#"{"matrices": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]], "beta_power": 0}"#);
    assert_eq!(s.json(&["oracle", "wedge", "w.json"])["value"], json!("2"));
    let fine = s.json(&["oracle", "fine-capacity", "p.json", "--factor", "2"]);
    assert_eq!(fine["resolution"], json!([33, 33]));
    assert!(fine["capacity"].as_f64().unwrap() > 0.0);
}

#[test]
fn indicators_and_newton_numbers() {
    let s = Sandbox::new();
    s.file("f.json", LINE);
    let r = s.json(&["indicator", "f.json", "--at", "3,-1"]);
    assert_eq!(r["residual"]["value"], json!([1, 1]));
    assert_eq!(Indicator::from_json(&r["indicator"]).unwrap().gradients().len(), 3);
    let nn = s.json(&["newton-number", "f.json", "--m", "2", "--mode", "literal"]);
    assert_eq!(nn["literal"], json!("divergent"));
    assert_eq!(nn["agree"], json!(false));
    assert_eq!(nn["residual"], json!("1"));
    s.file("g.json", &grid_file(65, |x, y| 0f64.max(x).max(y)));
    let fit = s.json(&["indicator", "g.json", "--growth", "1,0"]);
    assert_eq!(fit["residual"]["value"], json!([1, 1]));
    assert_eq!(s.run(&["indicator", "g.json", "--growth", "0.5,0"]).status.code(), Some(2));
}

#[test]
fn plots() {
    let s = Sandbox::new();
    s.file("f.json", LINE).file("sq.json", LIFTED_SQUARE).file("p.json", DISK_PROBLEM);
    s.json(&["hypersurface", "f.json", "--svg", "line.svg"]);
    let line = s.read("line.svg");
    assert_eq!(line.matches(r#"<line class="ray""#).count(), 3);
    assert_eq!(line.matches(">1</text>").count(), 3);
    s.json(&["subdivide", "sq.json", "--svg", "sq.svg"]);
    assert_eq!(s.read("sq.svg").matches("<polygon").count(), 2);
    s.json(&["capacity", "p.json", "--svg", "cap.svg"]);
    assert!(s.read("cap.svg").matches("<path").count() >= 5);
    s.file("f3.json", r#"{"n": 3, "expr": "max(0, x1, x2, x3)"}"#);
    let out = s.run(&["hypersurface", "f3.json", "--svg", "f3.svg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!s.path("f3.svg").exists());
}

#[test]
fn outputs_round_trip() {
    let s = Sandbox::new();
    s.file("f.json", LINE).file("sq.json", LIFTED_SQUARE).file("p.json", DISK_PROBLEM);
    let f = TropicalPolynomial::from_json(&serde_json::from_str(LIFTED_SQUARE).unwrap()).unwrap();
    assert_eq!(TropicalPolynomial::from_json(&f.to_json()).unwrap(), f);
    let h = s.json(&["hypersurface", "sq.json"]);
    assert_eq!(WeightedComplex::from_json(&h).unwrap(), hypersurface(&f).unwrap().complex);
    let newton = s.json(&["newton", "sq.json"]);
    assert_eq!(Polytope::from_json(&newton["polytope"]).unwrap(), f.newton_polytope());
    assert_eq!(newton["volume"], json!("1"));
    let prob = CapacityProblem::from_json(&serde_json::from_str(DISK_PROBLEM).unwrap()).unwrap();
    assert_eq!(CapacityProblem::from_json(&prob.to_json()).unwrap(), prob);
    s.json(&["capacity", "p.json", "--extremal", "u.json"]);
    let u = GridFunction::from_json(&serde_json::from_str(&s.read("u.json")).unwrap()).unwrap();
    assert_eq!(GridFunction::from_json(&u.to_json()).unwrap(), u);
    assert!(u.values().iter().all(|v| (-1.0..=0.0).contains(v)));
}

fn same_bytes(s: &Sandbox, args: &[&str], files: &[&str]) {
    let first = s.run(args);
    let saved: Vec<String> = files.iter().map(|f| s.read(f)).collect();
    let second = s.run(args);
    assert_eq!(first.stdout, second.stdout, "{args:?}");
    assert_eq!(first.status.code(), second.status.code());
    for (f, before) in files.iter().zip(saved) {
        assert_eq!(before, s.read(f), "{f}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let s = Sandbox::new();
    s.file("f.json", LINE).file("sq.json", LIFTED_SQUARE).file("p.json", DISK_PROBLEM);
    s.file("conics.json", r#"[{"n": 2, "expr": "max(0, x1, x2, 2*x1 - 1, x1 + x2 + 1, 2*x2 - 3)"},
        {"n": 2, "expr": "max(2, x1 + 1, x2, 2*x1, x1 + x2 - 2, 2*x2 + 1)"}]"#);
    s.file("u.json", &grid_file(17, |x, y| x * x + (x + y).abs()));
    same_bytes(&s, &["hypersurface", "sq.json", "--svg", "h.svg"], &["h.svg"]);
    same_bytes(&s, &["subdivide", "sq.json", "--svg", "s.svg"], &["s.svg"]);
    same_bytes(&s, &["intersect", "conics.json"], &[]);
    same_bytes(&s, &["mass", "sq.json"], &[]);
    same_bytes(&s, &["hessian", "u.json", "--m", "1", "--out", "mu.json"], &["mu.json", "mu.json.density.json"]);
    same_bytes(&s, &["capacity", "p.json", "--svg", "c.svg", "--extremal", "e.json"], &["c.svg", "e.json"]);
    same_bytes(&s, &["newton-number", "f.json", "--m", "1"], &[]);
    same_bytes(&s, &["oracle", "mixed-volume", "conics.json"], &[]);
    assert_eq!(s.json(&["intersect", "conics.json", "--mass"]), json!({"mass": "4"}));
    assert!(Path::new(&s.path("h.svg")).exists());
}
