mod input;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use supertrop::capacity::{self, SolveOptions};
use supertrop::geometry::{mixed_volume, Polytope};
use supertrop::hessian::{self, GridFunction};
use supertrop::indicators::{self, LelongFunction, LimitOptions, NewtonMode};
use supertrop::rational::{to_json as q_json, to_string as q_str};
use supertrop::{oracles, tropical, Error};

use input::{read_json, read_polynomials, read_problem, Failure};

#[derive(Parser)]
#[command(name = "supertrop", version, about = "Tropical varieties, Hessian measures and m-capacities")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Degree of subharmonicity.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Obstacle K as a mask spec (JSON text, or @file).
    #[arg(long, global = true)]
    mask: Option<String>,
    /// Seed for the stable-intersection displacement.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Γ_m tolerance (hessian) or solver tolerance (capacity, quasicont).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Point as comma-separated rationals, e.g. "1/2,0".
    #[arg(long, global = true, allow_hyphen_values = true)]
    at: Option<String>,
    /// Also draw the result as SVG.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Node indices fixing axes 3.. of a grid for plotting, comma separated.
    #[arg(long, global = true)]
    slice: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Residual,
    Literal,
}

#[derive(Subcommand)]
enum Verb {
    /// Evaluate a tropical polynomial at --at.
    Eval { input: PathBuf },
    /// Newton polytope and its volume.
    Newton { input: PathBuf },
    /// Regular subdivision dual to the hypersurface.
    Subdivide { input: PathBuf },
    /// Weighted corner locus with its balancing report.
    Hypersurface { input: PathBuf },
    /// Stable intersection of the hypersurfaces of all given polynomials.
    Intersect {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Print only the intersection mass.
        #[arg(long)]
        mass: bool,
    },
    /// Atoms of the Monge-Ampère measure of a tropical polynomial.
    Mass { input: PathBuf },
    /// m-Hessian measure of a grid function; refuses if it is not m-subharmonic.
    Hessian { input: PathBuf },
    /// Relative m-capacity of K in D.
    Capacity {
        input: PathBuf,
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
        /// Write the extremal function as a grid JSON file.
        #[arg(long)]
        extremal: Option<PathBuf>,
    },
    /// cap(G_k) for the sets where mollification exceeds u by 1/k.
    Quasicont {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
    },
    /// Recession indicator Ψ, Θ and the residual mass.
    Indicator {
        input: PathBuf,
        /// Growth constants "C,D" with u ≤ C|x| + D, for grid input.
        #[arg(long)]
        growth: Option<String>,
    },
    /// Residual and literal Newton numbers.
    NewtonNumber {
        input: PathBuf,
        #[arg(long)]
        growth: Option<String>,
    },
    /// Brute-force reference computations.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Refinement factor for fine-capacity.
        #[arg(long, default_value_t = 4)]
        factor: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    MixedVolume,
    Wedge,
    GradientImage,
    FineCapacity,
}

/// Primary JSON and the exit status to report with it.
struct Outcome {
    doc: Value,
    status: u8,
    note: Option<String>,
}

impl From<Value> for Outcome {
    fn from(doc: Value) -> Self {
        Self { doc, status: 0, note: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.doc).expect("serializable") + "\n";
            if let Err(e) = write_out(cli.out.as_deref(), &text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if let Some(note) = out.note {
                eprintln!("{note}");
            }
            ExitCode::from(out.status)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.status())
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_svg(cli: &Cli, draw: impl FnOnce() -> Result<String, String>) -> Result<(), Failure> {
    match &cli.svg {
        Some(p) => write_file(p, &draw().map_err(Failure::Input)?),
        None => Ok(()),
    }
}

fn slice(cli: &Cli) -> Result<Vec<usize>, Failure> {
    match &cli.slice {
        None => Ok(Vec::new()),
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| Failure::Input(format!("bad slice index {t:?}"))))
            .collect(),
    }
}

fn point(cli: &Cli, n: usize, required: bool) -> Result<Vec<supertrop::Q>, Failure> {
    match &cli.at {
        None if required => Err(Failure::Input("--at is required".into())),
        None => Ok(vec![supertrop::Q::default(); n]),
        Some(s) => {
            let x = input::parse_point(s)?;
            if x.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: x.len() }.into());
            }
            Ok(x)
        }
    }
}

fn mode(cli: &Cli) -> NewtonMode {
    match cli.mode {
        Some(ModeArg::Literal) => NewtonMode::Literal,
        _ => NewtonMode::Residual,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.verb {
        Verb::Eval { input } => {
            let f = input::read_polynomial(input)?;
            let x = point(cli, f.n(), true)?;
            Ok(json!({ "value": q_str(&f.evaluate(&x)?) }).into())
        }
        Verb::Newton { input } => {
            let p = input::read_polynomial(input)?.newton_polytope();
            Ok(json!({ "polytope": p.to_json(), "dim": p.dim(), "volume": q_str(&p.volume()) }).into())
        }
        Verb::Subdivide { input } => {
            let s = tropical::dual_subdivision(&input::read_polynomial(input)?);
            write_svg(cli, || svg::subdivision(&s))?;
            Ok(s.to_json().into())
        }
        Verb::Hypersurface { input } => {
            let h = tropical::hypersurface(&input::read_polynomial(input)?)?;
            write_svg(cli, || svg::hypersurface(&h))?;
            let mut doc = h.to_json();
            doc["balancing"] = tropical::check_balancing(&h.complex).to_json();
            Ok(doc.into())
        }
        Verb::Intersect { inputs, mass } => {
            let polys = read_polynomials(inputs)?;
            let hs = polys.iter().map(tropical::hypersurface).collect::<supertrop::Result<Vec<_>>>()?;
            let cycle = match cli.seed {
                Some(s) => tropical::stable_intersection_seeded(&hs, s)?,
                None => tropical::stable_intersection(&hs)?,
            };
            if *mass {
                return Ok(json!({ "mass": q_str(&tropical::intersection_mass(&cycle)?) }).into());
            }
            let mut doc = cycle.to_json();
            doc["balancing"] = tropical::check_balancing(&cycle.complex).to_json();
            Ok(doc.into())
        }
        Verb::Mass { input } => {
            let mu = hessian::pl_monge_ampere(&input::read_polynomial(input)?);
            let mut doc = mu.to_json(None);
            doc["total"] = json!(q_str(&mu.atom_mass()));
            Ok(doc.into())
        }
        Verb::Hessian { input } => hessian_verb(cli, input),
        Verb::Capacity { input, max_iter, extremal } => capacity_verb(cli, input, *max_iter, extremal.as_deref()),
        Verb::Quasicont { input, eps } => {
            let u = GridFunction::from_json(&read_json(input)?)?;
            let mut opts = capacity::QuasiOptions::for_grid(&u);
            if let Some(t) = cli.tol {
                opts.solve.tol = t;
            }
            let report = capacity::quasicontinuity_experiment_with(&u, cli.m.unwrap_or(1), *eps, opts)?;
            let stalled = report.rows.iter().filter(|r| !r.converged).count();
            let doc = report.to_json();
            Ok(if stalled > 0 {
                Outcome { doc, status: 3, note: Some(format!("warning: {stalled} capacity solve(s) did not converge")) }
            } else {
                doc.into()
            })
        }
        Verb::Indicator { input, growth } => {
            let (f, n) = lelong(input, growth.as_deref())?;
            let x = point(cli, n, false)?;
            let mut doc = json!({});
            let psi = match &f {
                LelongFunction::Grid { u, .. } => {
                    let xf: Vec<f64> = x.iter().map(supertrop::rational::to_f64).collect();
                    let fit = indicators::grid_indicator(u, &xf, &LimitOptions::default())?;
                    doc["unsettled"] = json!(fit.unsettled);
                    fit.indicator
                }
                LelongFunction::Pl(_) => indicators::recession_indicator(&f, &x)?,
            };
            let m = cli.m.unwrap_or(n);
            doc["indicator"] = psi.to_json();
            doc["theta"] = indicators::theta_polytope(&psi).to_json();
            doc["residual"] = indicators::residual_to_json(&indicators::residual_mass(&psi, m)?);
            doc["m"] = json!(m);
            Ok(doc.into())
        }
        Verb::NewtonNumber { input, growth } => {
            let (f, n) = lelong(input, growth.as_deref())?;
            let x = point(cli, n, false)?;
            let nn = indicators::newton_number(&f, &x, cli.m.unwrap_or(n), mode(cli))?;
            Ok(nn.to_json().into())
        }
        Verb::Oracle { kind, inputs, factor } => oracle_verb(cli, *kind, inputs, *factor),
    }
}

fn lelong(path: &Path, growth: Option<&str>) -> Result<(LelongFunction, usize), Failure> {
    let doc = read_json(path)?;
    if doc.get("values").is_some() {
        let u = GridFunction::from_json(&doc)?;
        let (c, d) = match growth {
            None => (f64::MAX, 0.0),
            Some(s) => match input::parse_floats(s)?.as_slice() {
                [c, d] => (*c, *d),
                _ => return Err(Failure::Input("--growth takes \"C,D\"".into())),
            },
        };
        let n = u.n();
        Ok((LelongFunction::grid(u, c, d)?, n))
    } else {
        let f = input::polynomial_from(&doc)?;
        let n = f.n();
        Ok((LelongFunction::Pl(f), n))
    }
}

fn sidecar(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn hessian_verb(cli: &Cli, input: &Path) -> Result<Outcome, Failure> {
    let u = GridFunction::from_json(&read_json(input)?)?;
    let m = cli.m.ok_or_else(|| Failure::Input("hessian needs --m".into()))?;
    if m == 0 || m > u.n() {
        return Err(Error::OutOfRange(format!("m = {m} must lie in 1..={}", u.n())).into());
    }
    let report = hessian::is_m_subharmonic(&u, m, cli.tol);
    if !report.ok {
        let path = sidecar(cli.out.as_deref().unwrap_or(input), ".violations.json");
        write_file(&path, &(serde_json::to_string_pretty(&report.to_json()).expect("serializable") + "\n"))?;
        return Err(Failure::Input(format!(
            "function is not {m}-subharmonic at {} interior node(s); violation map: {}",
            report.violations.len(),
            path.display()
        )));
    }
    let mu = hessian::hessian_measure_smooth(&u, m, cli.tol)?;
    let density = match &cli.out {
        Some(out) => {
            let path = sidecar(out, ".density.json");
            let grid = mu.density.as_ref().expect("smooth measures have a density");
            write_file(&path, &(serde_json::to_string(&grid.to_json()).expect("serializable") + "\n"))?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let mut doc = mu.to_json(density.as_deref());
    doc["checked"] = json!(report.checked);
    doc["min_density"] = json!(mu.min_density());
    let fixed = slice(cli)?;
    write_svg(cli, || svg::contours(mu.density.as_ref().expect("density"), &fixed))?;
    Ok(doc.into())
}

fn problem(cli: &Cli, input: &Path) -> Result<capacity::CapacityProblem, Failure> {
    let mut prob = read_problem(input)?;
    if let Some(m) = cli.m {
        prob.m = m;
    }
    if let Some(spec) = &cli.mask {
        prob.k = input::read_mask(spec)?;
    }
    Ok(prob)
}

fn capacity_verb(cli: &Cli, input: &Path, max_iter: usize, extremal: Option<&Path>) -> Result<Outcome, Failure> {
    let prob = problem(cli, input)?;
    let mut opts = SolveOptions { max_iter, ..SolveOptions::default() };
    if let Some(t) = cli.tol {
        opts.tol = t;
    }
    let res = capacity::capacity_with(&prob, opts)?;
    if let Some(p) = extremal {
        write_file(p, &(serde_json::to_string(&res.extremal.u.to_json()).expect("serializable") + "\n"))?;
    }
    let fixed = slice(cli)?;
    write_svg(cli, || svg::contours(&res.extremal.u, &fixed))?;
    let mut doc = res.to_json();
    doc["m"] = json!(prob.m);
    doc["resolution"] = json!(prob.resolution);
    if res.extremal.converged {
        Ok(doc.into())
    } else {
        let note = format!(
            "error: {}",
            Error::NotConverged { iterations: res.extremal.iterations, residual: res.extremal.residual }
        );
        Ok(Outcome { doc, status: 3, note: Some(note) })
    }
}

fn oracle_verb(cli: &Cli, kind: OracleKind, inputs: &[PathBuf], factor: usize) -> Result<Outcome, Failure> {
    match kind {
        OracleKind::MixedVolume => {
            let bodies: Vec<Polytope> = input::read_polytopes(inputs)?;
            let expanded = oracles::mixed_volume_by_expansion(&bodies)?;
            let direct = mixed_volume(&bodies)?;
            Ok(json!({
                "mixed_volume": q_str(&expanded),
                "inclusion_exclusion": q_str(&direct),
                "agree": expanded == direct,
            })
            .into())
        }
        OracleKind::Wedge => {
            let [path] = inputs else { return Err(Failure::Input("wedge takes one input file".into())) };
            let (matrices, beta) = input::read_wedge(path)?;
            Ok(json!({ "value": q_str(&hessian::superform_wedge_oracle(&matrices, beta)?) }).into())
        }
        OracleKind::GradientImage => {
            let [path] = inputs else { return Err(Failure::Input("gradient-image takes one input file".into())) };
            let f = input::read_polynomial(path)?;
            let atoms = oracles::gradient_image_atoms(&f);
            let total: supertrop::Q = atoms.iter().map(|(_, m)| m.clone()).sum();
            let direct = hessian::pl_monge_ampere(&f).atom_mass();
            Ok(json!({
                "atoms": atoms.iter().map(|(p, m)| json!({
                    "point": p.iter().map(q_json).collect::<Vec<_>>(),
                    "mass": q_json(m),
                })).collect::<Vec<_>>(),
                "total": q_str(&total),
                "agree": total == direct,
            })
            .into())
        }
        OracleKind::FineCapacity => {
            let [path] = inputs else { return Err(Failure::Input("fine-capacity takes one input file".into())) };
            if factor == 0 {
                return Err(Failure::Input("--factor must be positive".into()));
            }
            let prob = problem(cli, path)?;
            let value = oracles::fine_grid_capacity(&prob, factor)?;
            let fine: Vec<usize> = prob.resolution.iter().map(|r| factor * (r - 1) + 1).collect();
            Ok(json!({ "capacity": value, "factor": factor, "resolution": fine, "m": prob.m }).into())
        }
    }
}
