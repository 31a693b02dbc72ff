//! The `qcqp` command line tool: analysis reports, hull descriptions, verified
//! decomposition certificates, bounded minimization and plot data for
//! problems stored as JSON.

pub mod files;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use qcqp_hull::certify::{self, ConditionReport, Verdict};
use qcqp_hull::generators::{self, FamilySpec};
use qcqp_hull::hull::{decompose, soc_description, verify_certificate};
use qcqp_hull::solve::{brute_force, minimize_soc, Bounds, SolveStatus};
use qcqp_hull::{plot, DualModel, EpigraphPoint, Error, Qcqp};
use serde::Serialize;

use files::{read_json, write_atomic, CertificateFile, HullFile, ProblemFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_ASSUMPTION: i32 = 3;
pub const EXIT_GUARD: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::DimensionMismatch { .. } | Error::InvalidProblem(_) | Error::IllConditioned(_) => EXIT_PARSE,
            Error::InvalidParameters(_) => EXIT_USAGE,
            Error::NoInteriorPoint
            | Error::NotSimultaneouslyDiagonalizable
            | Error::MissingAssumption(_)
            | Error::NoDescentDirection { .. } => EXIT_ASSUMPTION,
            Error::GuardExceeded { .. } | Error::NoConvergence(_) => EXIT_GUARD,
            Error::NotInDsdp(_) | Error::InfeasibleBox | Error::NoFeasiblePoint | Error::Lp(_) => EXIT_VERIFY,
        };
        let message = match &e {
            Error::NoInteriorPoint => format!("assumption 1 (dual strict feasibility) fails: {e}"),
            Error::NotSimultaneouslyDiagonalizable => format!("assumption 2 (polyhedral multiplier set) unverified: {e}"),
            _ => e.to_string(),
        };
        Failure::new(code, message)
    }
}

#[derive(Debug, Parser)]
#[command(name = "qcqp", version, about = "Convex hull certificates for QCQP epigraphs")]
struct Cli {
    /// Numerical tolerance for verification.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct BoxArgs {
    /// `lo,hi`, once per axis or once for all axes.
    #[arg(long = "box", value_name = "LO,HI", allow_hyphen_values = true)]
    boxes: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the sufficient conditions for the hull result.
    Analyze {
        problem: PathBuf,
        /// A primal feasible point for the first assumption.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        feasible: Option<Vec<f64>>,
    },
    /// Emit the convex quadratic description of the hull.
    Hull { problem: PathBuf },
    /// Write a certificate expressing `(x, t)` as a convex combination of
    /// epigraph points.
    Decompose {
        problem: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Minimize over the hull description within a box.
    Solve {
        problem: PathBuf,
        #[command(flatten)]
        bounds: BoxArgs,
        /// Grid points per axis for the brute-force comparison.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Write a problem from one of the built-in families.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// CSV of the least epigraph and hull `t` over a grid (two variables only).
    Plot {
        problem: PathBuf,
        #[command(flatten)]
        bounds: BoxArgs,
        #[arg(long, default_value_t = 201)]
        resolution: usize,
    },
    /// Re-check a certificate file against a problem.
    Verify { problem: PathBuf, certificate: PathBuf },
}

#[derive(Debug, Subcommand)]
enum Family {
    Example1,
    Gtrs {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    Qmp {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    Swiss {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        inside: usize,
        #[arg(long, default_value_t = 1)]
        outside: usize,
        #[arg(long, default_value_t = 0)]
        linear: usize,
    },
    Barvinok {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Failure::new(EXIT_USAGE, "--tol must be positive"));
    }
    match &cli.command {
        Command::Analyze { problem, feasible } => analyze(cli, &load(problem)?, feasible.as_deref(), stdout),
        Command::Hull { problem } => hull(cli, &load(problem)?, stdout),
        Command::Decompose { problem, point, t } => decompose_cmd(cli, &load(problem)?, point, *t, stdout),
        Command::Solve { problem, bounds, grid } => solve(cli, &load(problem)?, bounds, *grid, stdout),
        Command::Generate { family } => generate(cli, family, stdout),
        Command::Plot { problem, bounds, resolution } => plot_cmd(cli, &load(problem)?, bounds, *resolution, stdout),
        Command::Verify { problem, certificate } => verify(&load(problem)?, certificate, stdout),
    }
}

fn load(path: &Path) -> Result<Qcqp, Failure> {
    let file: ProblemFile = read_json(path).map_err(|e| Failure::new(EXIT_PARSE, e))?;
    file.to_problem().map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => {
            write_atomic(path, text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::new(EXIT_USAGE, e.to_string())),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents are plain data");
    s.push('\n');
    s
}

fn parse_bounds(args: &BoxArgs, n: usize, default: Option<(f64, f64)>) -> Result<Bounds, Failure> {
    let parse = |s: &str| -> Result<(f64, f64), Failure> {
        let bad = || Failure::new(EXIT_USAGE, format!("--box expects lo,hi, got `{s}`"));
        let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        Ok((lo, hi))
    };
    let pairs = match (args.boxes.len(), default) {
        (0, Some(d)) => vec![d; n],
        (0, None) => return Err(Failure::new(EXIT_USAGE, "--box is required")),
        (1, _) => vec![parse(&args.boxes[0])?; n],
        (k, _) if k == n => args.boxes.iter().map(|s| parse(s)).collect::<Result<_, _>>()?,
        (k, _) => return Err(Failure::new(EXIT_USAGE, format!("{k} --box values for {n} variables"))),
    };
    let (lo, hi) = pairs.into_iter().unzip();
    Bounds::new(lo, hi).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Unknown => "unknown",
    }
}

fn report_text(r: &ConditionReport) -> String {
    let mut s = String::new();
    let mut line = |k: &str, v: String| s.push_str(&format!("{k}: {v}\n"));
    line("assumption1", verdict(r.assumption1).into());
    if let Some(g) = &r.gamma_star {
        line("gamma_star", format!("{g:?}"));
    }
    line("primal_feasible", r.primal_feasible.map_or("unknown".into(), |b| b.to_string()));
    line("assumption2", verdict(r.assumption2).into());
    line("theorem1", verdict(r.theorem1).into());
    line("theorem2", verdict(r.theorem2).into());
    line("k", r.k.to_string());
    line("faces", r.num_faces.to_string());
    line("semidefinite_faces", r.semidefinite_faces.len().to_string());
    for f in &r.semidefinite_faces {
        s.push_str(&format!(
            "  rows {:?}: aff_dim {}, dim_v {}, b_aff_dim {}\n",
            f.active_rows, f.aff_dim, f.dim_v, f.b_aff_dim
        ));
    }
    let mut line = |k: &str, v: String| s.push_str(&format!("{k}: {v}\n"));
    line("corollary1", verdict(r.corollary_m1).into());
    line("corollary2", verdict(r.corollary_b0).into());
    line("corollary3", verdict(r.corollary_scaled_identity).into());
    let by: Vec<&str> = [
        ("theorem1", r.theorem1),
        ("theorem2", r.theorem2),
        ("corollary1", r.corollary_m1),
        ("corollary2", r.corollary_b0),
        ("corollary3", r.corollary_scaled_identity),
    ]
    .iter()
    .filter(|(_, v)| v.passed())
    .map(|(k, _)| *k)
    .collect();
    if r.hull_guaranteed {
        line("hull_guaranteed", format!("true (via {})", by.join(", ")));
    } else {
        line("hull_guaranteed", "false".into());
    }
    for n in &r.notes {
        line("note", n.clone());
    }
    s
}

fn analyze(cli: &Cli, p: &Qcqp, feasible: Option<&[f64]>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let x = match feasible {
        Some(v) if v.len() != p.dimension() => {
            return Err(Failure::new(EXIT_USAGE, format!("--feasible needs {} coordinates", p.dimension())))
        }
        Some(v) => Some(DVector::from_column_slice(v)),
        None => None,
    };
    let a = certify::analyze(p, x.as_ref())?;
    match &cli.out {
        Some(_) => {
            emit(cli, &to_json(&a.report), stdout)?;
            stdout.write_all(report_text(&a.report).as_bytes()).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))
        }
        None => emit(cli, &report_text(&a.report), stdout),
    }
}

fn hull(cli: &Cli, p: &Qcqp, stdout: &mut dyn Write) -> Result<(), Failure> {
    let model = DualModel::new(p)?;
    let d = soc_description(&model.gamma.v, p)?;
    emit(cli, &to_json(&HullFile::from_description(&d)), stdout)
}

fn decompose_cmd(cli: &Cli, p: &Qcqp, x: &[f64], t: f64, stdout: &mut dyn Write) -> Result<(), Failure> {
    if x.len() != p.dimension() {
        return Err(Failure::new(EXIT_USAGE, format!("--point needs {} coordinates", p.dimension())));
    }
    let target = EpigraphPoint::from_slice(x, t);
    if !target.is_finite() {
        return Err(Failure::new(EXIT_USAGE, "point must be finite"));
    }
    let model = DualModel::new(p)?;
    let c = decompose(p, &model, &target, cli.tol * 0.1)?;
    if !verify_certificate(p, &c, &target, cli.tol) {
        return Err(Failure::new(EXIT_VERIFY, "decomposition does not verify; no certificate written"));
    }
    emit(cli, &to_json(&CertificateFile::new(&target, &c, cli.tol)), stdout)
}

#[derive(Serialize)]
struct BruteOutput {
    value: f64,
    x: Vec<f64>,
    gap: f64,
}

#[derive(Serialize)]
struct SolveOutput {
    value: f64,
    t: f64,
    minimizer: Vec<f64>,
    lower_bound: f64,
    iterations: usize,
    status: SolveStatus,
    brute_force: Option<BruteOutput>,
}

fn solve(cli: &Cli, p: &Qcqp, bounds: &BoxArgs, grid: Option<usize>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let n = p.dimension();
    let bounds = parse_bounds(bounds, n, None)?;
    let model = DualModel::new(p)?;
    let d = soc_description(&model.gamma.v, p)?;
    let r = minimize_soc(&d, &bounds, cli.tol)?;
    let brute = if n <= 3 {
        let grid = grid.unwrap_or(if n <= 2 { 400 } else { 60 });
        let b = brute_force(p, &bounds, grid, cli.seed)?;
        Some(BruteOutput { value: b.value, x: b.x.iter().copied().collect(), gap: b.value - r.value })
    } else {
        None
    };
    let out = SolveOutput {
        value: r.value,
        t: r.value / 2.0,
        minimizer: r.minimizer.iter().copied().collect(),
        lower_bound: r.lower_bound,
        iterations: r.iterations,
        status: r.status,
        brute_force: brute,
    };
    emit(cli, &to_json(&out), stdout)
}

fn generate(cli: &Cli, family: &Family, stdout: &mut dyn Write) -> Result<(), Failure> {
    let seed = cli.seed;
    let spec = match *family {
        Family::Example1 => FamilySpec::Example1,
        Family::Gtrs { n } => FamilySpec::Gtrs { n, seed },
        Family::Qmp { n, k, m } => FamilySpec::QuadraticMatrixProgram { n, k, m, seed },
        Family::Swiss { n, inside, outside, linear } => FamilySpec::SwissCheese { n, inside, outside, linear, seed },
        Family::Barvinok { n, count } => FamilySpec::Barvinok { forms: generators::random_diagonal_forms(n, count, seed) },
    };
    let p = generators::generate(&spec).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    emit(cli, &to_json(&ProblemFile::from_problem(&p)), stdout)
}

fn plot_cmd(cli: &Cli, p: &Qcqp, bounds: &BoxArgs, resolution: usize, stdout: &mut dyn Write) -> Result<(), Failure> {
    if p.dimension() != 2 {
        return Err(Failure::new(EXIT_USAGE, format!("plot needs two variables, problem has {}", p.dimension())));
    }
    let bounds = parse_bounds(bounds, 2, Some((-10.0, 10.0)))?;
    let model = DualModel::new(p)?;
    let d = soc_description(&model.gamma.v, p)?;
    let rows = plot::plot2d(p, &d, &bounds, resolution)?;
    emit(cli, &plot::to_csv(&rows), stdout)
}

fn verify(p: &Qcqp, path: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cert: CertificateFile = read_json(path).map_err(|e| Failure::new(EXIT_PARSE, e))?;
    if !cert.verify(p) {
        return Err(Failure::new(EXIT_VERIFY, format!("{}: certificate does not verify", path.display())));
    }
    writeln!(stdout, "verified: {} points, tol {:e}", cert.points.len(), cert.tol)
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))
}
