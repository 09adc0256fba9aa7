//! Command-line front end for the `entgeo` toolkit.
//!
//! Exit codes: 0 success, 1 malformed input, 2 mean value outside the convex
//! support, 3 solver budget exhausted, 4 a verification suite failed.

mod commands;
mod figures;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use entgeo::io::SCHEMA;
use entgeo::Error;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "entgeo", version, about = "Entropy geometry on finite-dimensional C*-algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Problem file in JSON.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output file; standard output when absent. A directory for `figures`.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Accepted mean-value residual.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Newton iterations for solvers, search depth for `lattice`.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximum-entropy state for the mean value `xi`.
    Maxent(Common),
    /// rI-projection of each state onto the closure of the family.
    Project(Common),
    /// Entropy distance of each state from the family.
    Distance(Common),
    /// Projection lattice of the constraint space.
    Lattice(Common),
    /// States along the e-geodesic `t ↦ R(θ + t·u)` and its limit.
    Geodesic(Common),
    /// CSV point clouds of a planar family.
    Figures {
        #[command(flatten)]
        common: Common,
        /// Built-in family; ignored when --input is given.
        #[arg(long, default_value = "staffelberg")]
        family: String,
        /// Points per axis of the parameter grid.
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
    /// Acceptance suites; exits 0 only if every selected suite passes.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite name or number; all suites when absent.
        #[arg(long)]
        suite: Option<String>,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(Error),
    VerifyFailed(Vec<usize>),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Core(e) => core_code(e),
            CliError::VerifyFailed(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::VerifyFailed(ids) => write!(f, "failed criteria: {ids:?}"),
        }
    }
}

pub fn core_code(e: &Error) -> u8 {
    match e {
        Error::OutsideConvexSupport { .. } => 2,
        Error::BudgetExhausted { .. } => 3,
        _ => 1,
    }
}

/// JSON body reporting a failed computation.
pub fn error_json(command: &str, e: &Error) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": command, "error": e.to_string(), "exit_code": core_code(e) });
    match e {
        Error::OutsideConvexSupport { certificate, violation } => {
            v["certificate"] = json!(certificate);
            v["violation"] = json!(violation);
        }
        Error::BudgetExhausted { residual } if residual.is_finite() => {
            v["residual"] = json!(residual);
        }
        _ => {}
    }
    v
}

/// Line-oriented JSON output; one object per line.
pub struct Output {
    inner: Box<dyn Write>,
}

impl Output {
    fn open(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::Input(format!("cannot create {}: {e}", p.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self { inner })
    }

    pub fn line(&mut self, v: &Value) -> Result<(), CliError> {
        writeln!(self.inner, "{v}")?;
        Ok(())
    }

    fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush()?;
        Ok(())
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("ENTGEO_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, which cannot happen this early.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Figures { common, family, grid } => figures::run(&common, &family, grid),
        Command::Verify { common, suite } => {
            let mut out = Output::open(common.output.as_ref())?;
            let r = commands::verify(&common, suite.as_deref(), &mut out);
            out.finish()?;
            r
        }
        Command::Maxent(c) | Command::Project(c) | Command::Distance(c) | Command::Lattice(c) | Command::Geodesic(c)
            if c.input.is_none() =>
        {
            Err(CliError::Input("--input is required".into()))
        }
        cmd => {
            let (name, common) = match &cmd {
                Command::Maxent(c) => ("maxent", c),
                Command::Project(c) => ("project", c),
                Command::Distance(c) => ("distance", c),
                Command::Lattice(c) => ("lattice", c),
                Command::Geodesic(c) => ("geodesic", c),
                _ => unreachable!("handled above"),
            };
            let problem = commands::read_problem(common)?;
            let mut out = Output::open(common.output.as_ref())?;
            let r = match name {
                "maxent" => commands::maxent(common, &problem, &mut out),
                "project" => commands::project(common, &problem, &mut out),
                "distance" => commands::distance(&problem, &mut out),
                "lattice" => commands::lattice(common, &problem, &mut out),
                _ => commands::geodesic(&problem, &mut out),
            };
            out.finish()?;
            r
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("entgeo: {e}");
            ExitCode::from(e.code())
        }
    }
}
