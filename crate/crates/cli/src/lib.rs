//! Command dispatch for the `l2alex` binary.
//!
//! [`run`] takes the argument vector and output streams so the whole tool can
//! be driven from tests.

pub mod format;
pub mod input;

use std::io::Write;

use clap::{Parser, Subcommand};
use l2alex::degree::{self, AsymptoteReport, ConvexityReport};
use l2alex::mahler::{self, MahlerOptions};
use l2alex::torsion::{self, Section9Scenario, TorsionSpec};
use l2alex::Error;

use format::{fmt_g, Json};
pub use input::{parse_input, InputDocument, InputError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "l2alex", version, about = "L^2-Alexander torsion and Mahler measure calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mahler measure of the polynomial (or matrix determinant) in the document.
    Mahler {
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = mahler::DEFAULT_TOL)]
        tol: f64,
    },
    /// Samples V(t) on a geometric grid as CSV.
    Eval {
        #[arg(long)]
        input: String,
        /// `lo:hi:n`, points lo*(hi/lo)^(k/(n-1)).
        #[arg(long = "t-grid")]
        t_grid: String,
        #[arg(long, default_value_t = mahler::DEFAULT_TOL)]
        tol: f64,
    },
    /// Asymptote exponents and leading coefficients of V.
    Degree {
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = mahler::DEFAULT_TOL)]
        tol: f64,
    },
    /// Multiplicative convexity and slope bound of V on a grid.
    Convexity {
        #[arg(long)]
        input: String,
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Samples the torsion function of the presentation as CSV.
    Torsion {
        #[arg(long)]
        input: String,
        #[arg(long = "t-grid")]
        t_grid: String,
        #[arg(long, default_value_t = mahler::DEFAULT_TOL)]
        tol: f64,
    },
    /// Worked scenarios.
    Scenario {
        #[command(subcommand)]
        which: Scenario,
    },
}

#[derive(Debug, Subcommand)]
enum Scenario {
    /// Three figure-eight pieces glued along tori.
    Section9 {
        /// Class `a,b,c` with a + b + c = 0.
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        /// Also report `n` classes of the same size rotated in the plane a + b + c = 0.
        #[arg(long)]
        sweep: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Input(InputError),
    Numeric(Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Numeric(e) if e.is_budget() => EXIT_BUDGET,
            Failure::Numeric(e) if e.is_degeneracy() => EXIT_DEGENERATE,
            Failure::Numeric(_) => EXIT_INPUT,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(e) => format!("error[{}]: {e}", e.code()),
            Failure::Numeric(e) => {
                let code = match self.exit_code() {
                    EXIT_BUDGET => "E201",
                    EXIT_DEGENERATE => "E301",
                    _ => "E109",
                };
                format!("error[{code}]: {e}")
            }
        }
    }
}

/// Applies `L2ALEX_THREADS` to the global rayon pool; `0` or unset keeps the default.
pub fn configure_threads() {
    if let Some(n) = std::env::var("L2ALEX_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs one invocation; `args[0]` is the program name. Returns the exit code.
pub fn run<S: AsRef<str>>(args: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args.iter().map(|a| a.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "{}", f.message());
            f.exit_code()
        }
    }
}

fn read_document(path: &str) -> Result<InputDocument, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    parse_input(&text)
}

/// Parses `lo:hi:n` (an optional `-geometric` suffix on `n` is accepted).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, InputError> {
    let bad = || InputError::Usage(format!("grid must look like lo:hi:n, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n_text = parts[2].trim();
    let n: usize = n_text.strip_suffix("-geometric").unwrap_or(n_text).parse().map_err(|_| bad())?;
    degree::geometric_grid(lo, hi, n).map_err(|e| InputError::Usage(e.to_string()))
}

fn parse_phi(spec: &str) -> Result<[f64; 3], InputError> {
    let vals = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|_| InputError::Usage(format!("phi must be three numbers a,b,c, got {spec:?}")))?;
    <[f64; 3]>::try_from(vals).map_err(|_| InputError::Usage(format!("phi must have three entries, got {spec:?}")))
}

fn check_tol(tol: f64) -> Result<(), InputError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(InputError::Usage(format!("tolerance must be positive, got {tol}")))
    }
}

fn dispatch(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Mahler { input, tol } => {
            check_tol(tol)?;
            let doc = read_document(&input)?;
            let est = mahler::mahler_mv_with(&doc.polynomial(), &MahlerOptions::with_tol(tol))?;
            Ok(format!(
                "{}\n",
                Json::obj([
                    ("measure", Json::Num(est.measure)),
                    ("log_measure", Json::Num(est.log_measure)),
                    ("achieved_tol", Json::Num(est.achieved_tol)),
                ])
            ))
        }
        Command::Eval { input, t_grid, tol } => {
            check_tol(tol)?;
            let doc = read_document(&input)?;
            let grid = parse_grid(&t_grid)?;
            let v = det_function(&doc)?;
            let values = v.log_eval_grid(&grid, tol)?;
            Ok(csv(grid.iter().zip(&values).map(|(&t, &lv)| (t, Some(lv.exp())))))
        }
        Command::Degree { input, tol } => {
            check_tol(tol)?;
            let doc = read_document(&input)?;
            let v = det_function(&doc)?;
            Ok(format!("{}\n", asymptote_json(&degree::asymptote(&v, tol)?)))
        }
        Command::Convexity { input, grid, tol } => {
            check_tol(tol)?;
            let doc = read_document(&input)?;
            let grid = parse_grid(&grid)?;
            let v = det_function(&doc)?;
            Ok(format!("{}\n", convexity_json(&degree::convexity_check(&v, &grid, tol)?)))
        }
        Command::Torsion { input, t_grid, tol } => {
            check_tol(tol)?;
            let doc = read_document(&input)?;
            let grid = parse_grid(&t_grid)?;
            let spec = TorsionSpec {
                matrix: doc.matrix.clone(),
                class: doc.class()?.clone(),
                pairs: doc.pairs.clone().unwrap_or_default(),
                index_divisor: doc.index_divisor(),
                label: input.clone(),
            };
            let tau = torsion::torsion_from_presentation(&spec)?;
            let rows = grid
                .iter()
                .map(|&t| Ok((t, tau.eval(t, tol)?.value())))
                .collect::<l2alex::Result<Vec<_>>>()?;
            Ok(csv(rows))
        }
        Command::Scenario {
            which: Scenario::Section9 { phi, sweep },
        } => {
            let phi = parse_phi(&phi)?;
            let first = section9_row(phi)?;
            match sweep {
                None => Ok(format!("{first}\n")),
                Some(n) => {
                    if n == 0 {
                        return Err(InputError::Usage("sweep needs at least one sample".into()).into());
                    }
                    let rows = sweep_classes(phi, n)
                        .into_iter()
                        .map(section9_row)
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(format!("{}\n", Json::Arr(rows)))
                }
            }
        }
    }
}

fn det_function(doc: &InputDocument) -> Result<degree::DetFunction, Failure> {
    let v = degree::det_function(&doc.matrix, doc.class()?)?;
    Ok(l2alex::twist::index_rescale(&v, doc.index_divisor())?)
}

fn csv(rows: impl IntoIterator<Item = (f64, Option<f64>)>) -> String {
    let mut s = String::from("t,value\n");
    for (t, v) in rows {
        s.push_str(&fmt_g(t));
        s.push(',');
        s.push_str(&v.map_or_else(|| "unspecified".to_string(), fmt_g));
        s.push('\n');
    }
    s
}

fn asymptote_json(r: &AsymptoteReport) -> Json {
    Json::obj([
        ("d_plus", Json::Num(r.d_plus)),
        ("d_minus", Json::Num(r.d_minus)),
        ("deg_b", Json::Num(r.deg_b)),
        ("C_plus", Json::opt(r.c_plus)),
        ("C_minus", Json::opt(r.c_minus)),
        ("method", Json::Str(r.method.as_str().into())),
    ])
}

fn convexity_json(r: &ConvexityReport) -> Json {
    Json::obj([
        ("passed", Json::Bool(r.passed())),
        ("zero_function", Json::Bool(r.zero_function)),
        ("max_abs_slope", Json::Num(r.max_abs_slope)),
        ("slope_bound", Json::opt(r.slope_bound)),
        (
            "slope_window",
            match r.slope_window {
                Some((lo, hi)) => Json::nums(&[lo, hi]),
                None => Json::Null,
            },
        ),
        (
            "violations",
            Json::Arr(
                r.violations
                    .iter()
                    .map(|v| {
                        Json::obj([
                            ("t_lo", Json::Num(v.t_lo)),
                            ("t_mid", Json::Num(v.t_mid)),
                            ("t_hi", Json::Num(v.t_hi)),
                            ("excess", Json::Num(v.excess)),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "slope_violations",
            Json::Arr(
                r.slope_violations
                    .iter()
                    .map(|v| {
                        Json::obj([
                            ("t0", Json::Num(v.t0)),
                            ("t1", Json::Num(v.t1)),
                            ("slope", Json::Num(v.slope)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

fn section9_row(phi: [f64; 3]) -> Result<Json, Failure> {
    let sc = Section9Scenario::new(phi)?;
    let res = sc.result();
    let deg = torsion::torsion_degree(&sc.torsion(), mahler::DEFAULT_TOL)?;
    Ok(Json::obj([
        ("phi", Json::nums(&phi)),
        ("norm", Json::Num(res.norm)),
        ("delta", Json::Int(res.delta as i64)),
        ("leading", Json::Num(res.leading)),
        ("deg_b", Json::Num(deg.deg_b)),
    ]))
}

/// `n` classes at the Euclidean radius of `phi`, rotated in the plane
/// `a + b + c = 0` in steps of `2 pi / n`, starting at `phi`.
fn sweep_classes(phi: [f64; 3], n: usize) -> Vec<[f64; 3]> {
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    let e1 = [1.0 / s2, -1.0 / s2, 0.0];
    let e2 = [1.0 / s6, 1.0 / s6, -2.0 / s6];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let (x, y) = (dot(phi, e1), dot(phi, e2));
    (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let (c, s) = (a.cos(), a.sin());
            let (u, v) = (c * x - s * y, s * x + c * y);
            let mut p = [0.0; 3];
            for i in 0..3 {
                // Adding 0.0 turns -0 into 0.
                p[i] = u * e1[i] + v * e2[i] + 0.0;
            }
            p
        })
        .collect()
}

