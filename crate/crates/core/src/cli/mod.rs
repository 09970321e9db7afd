//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input
//! (or unwritable output), 3 numerical failure.

mod analyze;
mod calibrate;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::calibration::CalibrationError;
use crate::exec::Parallelism;
use crate::material::MaterialFileError;
use crate::mesh::io::MeshReadError;
use crate::reliability::output::{OutputError, Spacing};
use crate::reliability::ReliabilityError;

pub use analyze::{run_analysis, run_convergence, AnalysisOutcome, ConvergenceRow};
pub use calibrate::{run_calibration, CalibrationOptions};
pub use config::{ConfigFile, GridConfig, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Mesh(#[from] MeshReadError),
    #[error(transparent)]
    Material(#[from] MaterialFileError),
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Reliability(#[from] ReliabilityError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error("{path}: {source}")]
    Write { path: String, source: OutputError },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Mesh(_) | CliError::Material(_) | CliError::Config { .. } | CliError::Write { .. } => EXIT_INPUT,
            CliError::Reliability(_) => EXIT_NUMERICAL,
            CliError::Calibration(e) => match e {
                CalibrationError::Io { .. }
                | CalibrationError::Data { .. }
                | CalibrationError::TooFewRecords(_)
                | CalibrationError::TooFewStrainLevels(_)
                | CalibrationError::NothingToFit
                | CalibrationError::InadmissibleStart(_) => EXIT_INPUT,
                CalibrationError::EstimationFailed { .. } | CalibrationError::Optimizer(_) => EXIT_NUMERICAL,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lcfpost", version, about = "Probabilistic LCF crack-initiation analysis of FE results")]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Failure probability, face report and density field for one mesh.
    Analyze(AnalyzeArgs),
    /// Weibull scale for 1..=6 quadrature points per dimension.
    Convergence(ConvergenceArgs),
    /// Maximum-likelihood fit of the strain-life curve and Weibull shape.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// Mesh file (neutral format with nodes, elements, displacements).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Material parameter file.
    #[arg(long)]
    material: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with default values for any of these options.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Face evaluation: `parallel` or `sequential`.
    #[arg(long)]
    exec: Option<Parallelism>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Gauss points per dimension (1..=6).
    #[arg(long)]
    lq: Option<usize>,
    /// Number of identical, independent segments making up the component.
    #[arg(long)]
    segments: Option<u32>,
    /// First cycle count of the PoF curve (default: 1e-4 times the Weibull scale).
    #[arg(long)]
    grid_start: Option<f64>,
    /// Last cycle count of the PoF curve (default: 10 times the Weibull scale).
    #[arg(long)]
    grid_stop: Option<f64>,
    #[arg(long)]
    grid_count: Option<usize>,
    #[arg(long, value_parser = parse_spacing)]
    grid_spacing: Option<Spacing>,
    /// Cycle count for the summary's point values.
    #[arg(long, conflicts_with = "report_nstar")]
    report_cycles: Option<f64>,
    /// Like --report-cycles, in multiples of the Weibull scale.
    #[arg(long)]
    report_nstar: Option<f64>,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Specimen CSV with columns n_cycles,strain_amplitude,gauge_area.
    #[arg(long)]
    data: PathBuf,
    /// Parameter file with E, nu, K, n_ro and optionally a starting point
    /// for sigma_f, b, eps_f, c, m_weibull.
    #[arg(long)]
    fixed: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Perturbed restarts after the run from the starting point.
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    /// Parameters to fit, comma separated (default: sigma_f,b,eps_f,c,m_weibull).
    #[arg(long, value_delimiter = ',')]
    free: Option<Vec<String>>,
    #[arg(long, default_value_t = 5000)]
    max_iterations: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_spacing(s: &str) -> Result<Spacing, String> {
    match s {
        "log" => Ok(Spacing::Log),
        "linear" => Ok(Spacing::Linear),
        other => Err(format!("expected `log` or `linear`, found `{other}`")),
    }
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => "error",
        (false, 0) => "warn",
        (false, 1) => "info",
        _ => "debug",
    };
    let env = env_logger::Env::default().default_filter_or(level);
    let _ = env_logger::Builder::from_env(env).target(env_logger::Target::Stderr).try_init();
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(a) => {
            let cfg = config::resolve(&a.common, Some(&a))?;
            let outcome = run_analysis(&cfg)?;
            log::info!("eta = {:e}, outputs in {}", outcome.result.eta, cfg.out.display());
            Ok(())
        }
        Command::Convergence(c) => {
            let cfg = config::resolve(&c.common, None)?;
            let rows = run_convergence(&cfg)?;
            for r in &rows {
                log::info!("lq = {}: eta = {:e} ({:.3e} of lq = 6)", r.lq, r.eta, r.eta_over_eta6);
            }
            Ok(())
        }
        Command::Calibrate(c) => {
            let opts = calibrate::options_from_args(&c)?;
            run_calibration(&c.data, &c.fixed, &opts).map(|_| ())
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose, cli.quiet);
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            log::error!("{e}");
            let shown = e.to_string();
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                let cause = s.to_string();
                if !shown.contains(&cause) {
                    log::error!("  caused by: {cause}");
                }
                source = s.source();
            }
            // the log filter may hide errors; always leave a line on stderr
            if !log::log_enabled!(log::Level::Error) {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}
