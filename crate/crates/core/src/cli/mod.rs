//! Command-line front end: config handling, command dispatch and CSV output.
//!
//! Exit codes: 0 success, 1 selftest failure, 2 invalid configuration,
//! 3 numerical nonconvergence, 4 I/O failure.

pub mod config;
pub mod io;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::convexcal::{ConvexBody, DirectionGrid};
use crate::error::Error;
use crate::funcspace::SetTrajectory;
use crate::geometry::Vector;
use crate::knots::{
    asymptotic_b, power_law_estimate, midpoint_knots, optimize_knots, uniform_optimal_error, OptimizeOptions,
};
use crate::noisy::{decompose_envelope, envelope_integral, noisy_envelope, noisy_sharpness_gap, phi_star_noisy, ErrorBudget};
use crate::recovery::{decompose, extremal_trajectory, phi_star, sharpness_gap, worst_case_error, KnotSet};
use crate::rmintegral::Integrator;

pub use config::{KnotsSource, RawConfig, RunConfig, TrajectorySource, KEYS};
use io::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Failed,
    Config,
    Nonconvergence,
    Io,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Config,
            message: msg.into(),
        }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Io,
            message: msg.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Failed => 1,
            ErrorKind::Config => 2,
            ErrorKind::Nonconvergence => 3,
            ErrorKind::Io => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::QuadratureNonconvergence { .. } | Error::IntegrationNonconvergence { .. } => ErrorKind::Nonconvergence,
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Config,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Bound,
    Recover,
    Knots,
    Noisy,
    Integrate,
    Asymptotics,
    Study,
    Selftest,
}

impl CommandKind {
    pub const ALL: [CommandKind; 8] = [
        CommandKind::Bound,
        CommandKind::Recover,
        CommandKind::Knots,
        CommandKind::Noisy,
        CommandKind::Integrate,
        CommandKind::Asymptotics,
        CommandKind::Study,
        CommandKind::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Bound => "bound",
            CommandKind::Recover => "recover",
            CommandKind::Knots => "knots",
            CommandKind::Noisy => "noisy",
            CommandKind::Integrate => "integrate",
            CommandKind::Asymptotics => "asymptotics",
            CommandKind::Study => "study",
            CommandKind::Selftest => "selftest",
        }
    }

    fn about(self) -> &'static str {
        match self {
            CommandKind::Bound => "worst-case error of the optimal method for given knots",
            CommandKind::Recover => "apply the optimal method to sample clouds",
            CommandKind::Knots => "place knots and report their worst-case error",
            CommandKind::Noisy => "error value, active cells and method for samples with errors",
            CommandKind::Integrate => "refine the weighted set-valued integral of a trajectory",
            CommandKind::Asymptotics => "partial sums of the asymptotic constant",
            CommandKind::Study => "sweep n and compare errors with the closed form",
            CommandKind::Selftest => "run the invariant suite",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        CommandKind::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Result of a command before anything is written.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
    /// Set when the command completed but reports failed checks.
    pub failed: bool,
}

impl RunOutput {
    fn line(&mut self, s: impl AsRef<str>) {
        self.stdout.push_str(s.as_ref());
        self.stdout.push('\n');
    }

    fn file(&mut self, path: &Option<PathBuf>, content: String) {
        if let Some(p) = path {
            self.files.push((p.clone(), content));
        }
    }

    /// Writes `content` to `path`, or to stdout when no path is configured.
    fn file_or_stdout(&mut self, path: &Option<PathBuf>, content: String) {
        match path {
            Some(p) => self.files.push((p.clone(), content)),
            None => self.stdout.push_str(&content),
        }
    }
}

/// Shortest decimal that reads back to the same double.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn grid(cfg: &RunConfig) -> Result<Arc<DirectionGrid>, CliError> {
    Ok(match cfg.grid_size {
        Some(size) => DirectionGrid::with_size(cfg.dim, size)?,
        None => DirectionGrid::default_for(cfg.dim)?,
    })
}

fn optimize_options(cfg: &RunConfig) -> OptimizeOptions {
    OptimizeOptions {
        starts: cfg.starts,
        max_sweeps: cfg.max_sweeps,
        seed: cfg.seed,
        ..Default::default()
    }
}

fn knots(cfg: &RunConfig) -> Result<KnotSet, CliError> {
    match &cfg.knots {
        None => Err(CliError::config("missing `knots`")),
        Some(KnotsSource::Explicit(v)) => Ok(KnotSet::new(v.clone())?),
        Some(KnotsSource::Midpoints(n)) => Ok(midpoint_knots(*n)?),
        Some(KnotsSource::Optimize(n)) => Ok(optimize_knots(&cfg.weight, &cfg.omega, *n, &optimize_options(cfg))?.knots),
    }
}

fn direction(cfg: &RunConfig) -> Result<Vector, CliError> {
    let v = match &cfg.trajectory {
        TrajectorySource::Extremal(d) => Vector::new(d.clone())?,
        _ => Vector::basis(cfg.dim, 0),
    };
    if v.dim() != cfg.dim {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim,
            found: v.dim(),
        }
        .into());
    }
    Ok(v)
}

fn body_csv(body: &ConvexBody) -> String {
    let mut t = Table::new(&["direction_index", "support_value"]);
    for (j, h) in body.support().iter().enumerate() {
        t.row([j.to_string(), num(*h)]);
    }
    t.finish()
}

fn samples_for(cfg: &RunConfig, n: usize) -> Result<Option<&[crate::geometry::PointCloud]>, CliError> {
    match &cfg.samples {
        None => Ok(None),
        Some(s) if s.len() != n => Err(CliError::config(format!("{} sample files for {n} knots", s.len()))),
        Some(s) => {
            if let Some(c) = s.iter().find(|c| c.dim() != cfg.dim) {
                return Err(CliError::config(format!("sample of dimension {} with dim = {}", c.dim(), cfg.dim)));
            }
            Ok(Some(s))
        }
    }
}

/// Runs one command. Nothing is written; see [`RunOutput`].
pub fn run(command: CommandKind, cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let mut out = RunOutput::default();
    match command {
        CommandKind::Bound => {
            let x = knots(cfg)?;
            out.line(num(worst_case_error(&cfg.omega, &cfg.weight, &x)?));
            if cfg.sharpness {
                let s = sharpness_gap(&cfg.omega, &cfg.weight, &x, &direction(cfg)?, &grid(cfg)?)?;
                out.line(format!("lower_bound {}", num(s.lower_bound)));
                out.line(format!("gap {}", num(s.gap)));
            }
            out.file(&cfg.outputs.cells, cell_table(&x, cfg)?);
        }
        CommandKind::Recover => {
            let x = knots(cfg)?;
            let samples = samples_for(cfg, x.len())?.ok_or_else(|| CliError::config("missing `samples`"))?;
            if cfg.outputs.body.is_none() {
                return Err(CliError::config("missing `output.body`"));
            }
            let body = phi_star(samples, &decompose(&x, &cfg.weight)?, &grid(cfg)?)?;
            out.line(num(worst_case_error(&cfg.omega, &cfg.weight, &x)?));
            out.file(&cfg.outputs.body, body_csv(&body));
            out.file(&cfg.outputs.cells, cell_table(&x, cfg)?);
        }
        CommandKind::Knots => {
            let x = knots(cfg)?;
            out.line(num(worst_case_error(&cfg.omega, &cfg.weight, &x)?));
            let mut t = Table::new(&["index", "knot"]);
            for (i, k) in x.as_slice().iter().enumerate() {
                t.row([i.to_string(), num(*k)]);
            }
            out.file(&cfg.outputs.csv, t.finish());
            out.file(&cfg.outputs.cells, cell_table(&x, cfg)?);
        }
        CommandKind::Noisy => noisy(cfg, &mut out)?,
        CommandKind::Integrate => integrate(cfg, &mut out)?,
        CommandKind::Asymptotics => {
            let mut report = asymptotic_b(&cfg.weight, &cfg.omega, &cfg.asymptotics_n)?;
            if cfg.ratios {
                report = report.with_ratios(&cfg.weight, &cfg.omega, &optimize_options(cfg))?;
            }
            let mut t = Table::new(&["n", "B_n", "ratio"]);
            for (i, (n, b)) in report.n_values.iter().zip(&report.b_estimates).enumerate() {
                let ratio = report.ratios.as_ref().map_or(String::new(), |r| num(r[i]));
                t.row([n.to_string(), num(*b), ratio]);
            }
            if cfg.outputs.csv.is_some() {
                out.line(num(report.b_extrapolated));
            }
            out.file_or_stdout(&cfg.outputs.csv, t.finish());
        }
        CommandKind::Study => study(cfg, &mut out)?,
        CommandKind::Selftest => {
            let checks = crate::selftest::run(cfg.seed)?;
            let passed = checks.iter().filter(|c| c.passed).count();
            for c in &checks {
                out.line(format!("{} {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail));
            }
            out.line(format!("passed {passed} of {}", checks.len()));
            out.failed = passed != checks.len();
        }
    }
    Ok(out)
}

fn cell_table(x: &KnotSet, cfg: &RunConfig) -> Result<String, CliError> {
    let cells = decompose(x, &cfg.weight)?;
    let mut t = Table::new(&["index", "knot", "cell_lo", "cell_hi", "weight"]);
    for (i, k) in x.as_slice().iter().enumerate() {
        let (lo, hi) = cells.cell(i);
        t.row([i.to_string(), num(*k), num(lo), num(hi), num(cells.weights[i])]);
    }
    Ok(t.finish())
}

fn noisy(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), CliError> {
    let x = knots(cfg)?;
    let eps = match cfg.epsilons.as_deref() {
        None => return Err(CliError::config("missing `epsilons`")),
        Some([e]) => ErrorBudget::uniform(x.len(), *e)?,
        Some(v) => ErrorBudget::new(v.to_vec())?,
    };
    let samples = samples_for(cfg, x.len())?;
    match (samples.is_some(), cfg.outputs.body.is_some()) {
        (true, false) => return Err(CliError::config("missing `output.body`")),
        (false, true) => return Err(CliError::config("`output.body` needs `samples`")),
        _ => {}
    }
    let env = noisy_envelope(&cfg.omega, &x, &eps)?;
    let decomp = decompose_envelope(&env, &cfg.weight)?;
    out.line(num(envelope_integral(&env, &cfg.weight)?));
    if cfg.sharpness {
        let s = noisy_sharpness_gap(&cfg.omega, &x, &eps, &cfg.weight, &direction(cfg)?, &grid(cfg)?)?;
        out.line(format!("lower_bound {}", num(s.lower_bound)));
        out.line(format!("gap {}", num(s.gap)));
    }
    let mut t = Table::new(&["index", "knot", "epsilon", "active", "cell_lo", "cell_hi", "weight"]);
    for (k, xk) in x.as_slice().iter().enumerate() {
        let e = num(eps.as_slice()[k]);
        match decomp.active_indices.binary_search(&k) {
            Ok(j) => {
                for &(lo, hi) in &decomp.cells[j] {
                    t.row([k.to_string(), num(*xk), e.clone(), "true".into(), num(lo), num(hi), num(decomp.weights[j])]);
                }
            }
            Err(_) => t.row([k.to_string(), num(*xk), e, "false".into(), String::new(), String::new(), num(0.0)]),
        }
    }
    out.file(&cfg.outputs.cells, t.finish());
    if let Some(s) = samples {
        out.file(&cfg.outputs.body, body_csv(&phi_star_noisy(s, &decomp, &grid(cfg)?)?));
    }
    Ok(())
}

fn integrate(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), CliError> {
    let f = match &cfg.trajectory {
        TrajectorySource::RotatingSegment => SetTrajectory::rotating_segment(),
        TrajectorySource::Constant(c) => SetTrajectory::constant(c.clone()),
        TrajectorySource::Extremal(_) => extremal_trajectory(&cfg.omega, &knots(cfg)?, &direction(cfg)?)?,
        TrajectorySource::Sampled { times, clouds, tol } => {
            SetTrajectory::sampled(times.clone(), clouds.clone(), &cfg.omega, *tol)?
        }
    };
    if f.dim() != cfg.dim {
        return Err(CliError::config(format!("trajectory of dimension {} with dim = {}", f.dim(), cfg.dim)));
    }
    let r = Integrator::new(cfg.integral_tol)
        .min_cells(cfg.min_cells)
        .integrate(&f, &cfg.weight, &grid(cfg)?)?;
    out.line(format!("cells {}", r.cells()));
    out.line(format!("distance {}", num(r.achieved_tolerance)));
    out.file(&cfg.outputs.body, body_csv(&r.body));
    let mut t = Table::new(&["cells", "successive_distance"]);
    for (n, d) in &r.log {
        t.row([n.to_string(), num(*d)]);
    }
    out.file(&cfg.outputs.log, t.finish());
    Ok(())
}

fn study(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), CliError> {
    let optimize = matches!(cfg.knots, Some(KnotsSource::Optimize(_))) || !cfg.weight.is_constant_one();
    let asymptotic = match (&cfg.omega.power_exponent(), cfg.weight.is_constant_one()) {
        (None, false) => Some(asymptotic_b(&cfg.weight, &cfg.omega, &[4096])?.b_extrapolated),
        _ => None,
    };
    let (lo, hi) = cfg.study_range;
    let mut t = Table::new(&["n", "error", "closed_form", "ratio"]);
    for n in lo..=hi {
        let x = if optimize {
            optimize_knots(&cfg.weight, &cfg.omega, n, &optimize_options(cfg))?.knots
        } else {
            midpoint_knots(n)?
        };
        let error = worst_case_error(&cfg.omega, &cfg.weight, &x)?;
        let closed = match (cfg.omega.power_exponent(), asymptotic) {
            (Some(alpha), _) => cfg.omega.value(1.0) * power_law_estimate(alpha, &cfg.weight, n)?,
            (None, None) => uniform_optimal_error(&cfg.omega, n)?,
            (None, Some(b)) => n as f64 * crate::knots::omega_big(&cfg.omega, (b / n as f64).min(1.0))?,
        };
        t.row([n.to_string(), num(error), num(closed), num(error / closed)]);
    }
    out.file_or_stdout(&cfg.outputs.csv, t.finish());
    Ok(())
}

fn key_args() -> Vec<Arg> {
    let mut args = vec![Arg::new("config")
        .short('c')
        .long("config")
        .value_name("FILE")
        .help("key = value configuration file")
        .action(ArgAction::Set)];
    for (key, help) in KEYS {
        args.push(
            Arg::new(*key)
                .long(*key)
                .value_name("VALUE")
                .help(*help)
                .action(ArgAction::Set),
        );
    }
    args
}

pub fn command() -> Command {
    let mut cmd = Command::new("setquad")
        .about("Optimal recovery of weighted integrals of set-valued functions")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for c in CommandKind::ALL {
        cmd = cmd.subcommand(Command::new(c.name()).about(c.about()).args(key_args()));
    }
    cmd
}

fn config_from(matches: &ArgMatches) -> Result<RunConfig, CliError> {
    let mut raw = match matches.get_one::<String>("config") {
        Some(p) => RawConfig::load(std::path::Path::new(p))?,
        None => RawConfig::default(),
    };
    for (key, _) in KEYS {
        if let Some(v) = matches.get_one::<String>(key) {
            raw.set(key, v)?;
        }
    }
    RunConfig::from_raw(&raw)
}

/// Parses `args`, runs the command and writes its outputs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let kind = CommandKind::parse(name).expect("registered subcommand");
    let result = config_from(sub).and_then(|cfg| run(kind, &cfg)).and_then(|out| {
        io::commit(&out.files)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            let _ = std::io::Write::flush(&mut std::io::stdout());
            if out.failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
