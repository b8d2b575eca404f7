//! Command-line interface.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_tolerance_override, BCandidates, ConfigError, HamiltonianSpec, Scenario};
use crate::demo::{self, DemoError};
use crate::suites::{run_verify, SuiteSelector};

/// Exit code when a check fails.
pub const EXIT_FAILED: u8 = 1;
/// Exit code for configuration and I/O errors.
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "infokahler",
    version,
    about = "Numerical checks of information geometry and Kähler structure"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and report every check.
    Verify(VerifyArgs),
    /// Produce demonstration data.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Debug, Subcommand)]
pub enum DemoCommand {
    /// Integrate the scenario Hamiltonian and write a CSV trajectory.
    Flow(FlowArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: SuiteSelector,
    /// Scenario JSON file; command-line options override its fields.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long = "a", allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Split parameters, each in (0, 1).
    #[arg(long = "k", num_args = 1.., allow_negative_numbers = true)]
    pub k: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Global seed; falls back to the scenario, then INFOKAHLER_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance override, NAME=REAL. Repeatable.
    #[arg(long = "tol", value_parser = parse_tolerance_override)]
    pub tol: Vec<(String, f64)>,
    /// Write the full JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Which B candidates the uniqueness suite tests.
    #[arg(long = "b", value_enum)]
    pub b: Option<BCandidates>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Keep every N-th integration step in the output.
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl VerifyArgs {
    /// The scenario file (or defaults) with command-line overrides applied.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let mut s = match &self.scenario {
            Some(path) => Scenario::load(path)?,
            None => Scenario::default(),
        };
        if let Some(n) = self.n {
            s.n = n;
        }
        if let Some(alpha) = self.alpha {
            s.alpha = alpha;
        }
        if let Some(a) = self.a {
            s.a_param = a;
        }
        if let Some(k) = &self.k {
            s.k_values = k.clone();
        }
        if let Some(trials) = self.trials {
            s.trials = trials;
        }
        if let Some(seed) = self.seed {
            s.seed = Some(seed);
        }
        for (name, value) in &self.tol {
            s.tol.insert(name.clone(), *value);
        }
        if let Some(b) = self.b {
            s.b_candidates = b;
        }
        // a Hamiltonian sized for another dimension cannot be reused
        if let (Some(_), HamiltonianSpec::Matrix { hermitian_matrix }) = (self.n, &s.hamiltonian) {
            let rows = hermitian_matrix.len();
            if rows != s.n {
                return Err(ConfigError::single(
                    "n",
                    format!("--n {} conflicts with the {rows} x {rows} scenario Hamiltonian", s.n),
                ));
            }
        }
        Ok(s)
    }
}

fn verify(args: &VerifyArgs) -> Result<bool, String> {
    let scenario = args.scenario().map_err(|e| e.to_string())?;
    let report = run_verify(&scenario, args.suite).map_err(|e| e.to_string())?;
    print!("{}", report.render_text());
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(report.all_passed())
}

fn flow(args: &FlowArgs) -> Result<(), DemoError> {
    let scenario = match &args.scenario {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };
    let rows = demo::run_demo_flow(&scenario, args.t, args.steps)?;
    match &args.out {
        Some(path) => demo::write_csv(&rows, args.stride, BufWriter::new(File::create(path)?)),
        None => demo::write_csv(&rows, args.stride, io::stdout().lock()),
    }
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Verify(args) => match verify(&args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(EXIT_FAILED),
            Err(msg) => {
                let _ = writeln!(io::stderr(), "error: {msg}");
                ExitCode::from(EXIT_ERROR)
            }
        },
        Command::Demo(DemoCommand::Flow(args)) => match flow(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                let _ = writeln!(io::stderr(), "error: {e}");
                ExitCode::from(EXIT_ERROR)
            }
        },
    }
}
