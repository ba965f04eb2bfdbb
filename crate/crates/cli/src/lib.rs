//! `asreg` command-line frontend.
//!
//! Exit codes: 0 on success, 1 when a certification finds violations or an
//! iteration breaks down numerically, 2 on usage, input or I/O errors.

mod commands;
mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_certify, cmd_corpus, cmd_plot, cmd_rate, cmd_run};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "asreg", version, about = "Averaged maps, certified rates of asymptotic regularity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print Σ(ε) and Ψ for an instance.
    Rate(RateArgs),
    /// Iterate an instance and write `n,displacement` CSV.
    Run(RunArgs),
    /// Run the certification suites and write a JSON report.
    Certify(CertifyArgs),
    /// Render a displacement CSV as SVG.
    Plot(PlotArgs),
    /// List or export the builtin corpus.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Instance JSON file.
    #[arg(long, value_name = "PATH", conflicts_with = "corpus")]
    pub instance: Option<PathBuf>,
    /// Named corpus; only `builtin` exists.
    #[arg(long, value_name = "NAME")]
    pub corpus: Option<String>,
    /// Instance id within the corpus.
    #[arg(long, requires = "corpus")]
    pub id: Option<String>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub source: Source,
    /// Comma-separated ε values; defaults to the instance grid.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 256)]
    pub precision: u32,
    /// CSV file with the full integers.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples per sampled suite; the convexity suite draws ten times as many.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 256)]
    pub precision: u32,
    /// Comma-separated suite names; all suites when absent.
    #[arg(long, value_delimiter = ',')]
    pub suites: Vec<String>,
    /// Comma-separated ε grid overriding each instance's own.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Picard step budget per rate check.
    #[arg(long, default_value_t = 200_000)]
    pub steps: u64,
    /// JSON report destination; standard output when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Record wall-clock time per report (breaks byte-identical output).
    #[arg(long)]
    pub runtime: bool,
    /// Compare against deliberately false bounds.
    #[arg(long, hide = true)]
    pub falsify: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Trajectory CSV written by `run`.
    #[arg(long)]
    pub csv: PathBuf,
    /// Instance for the Σ markers.
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 256)]
    pub precision: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Write each instance as `<id>.json` into this directory.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

/// An error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn violations(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VIOLATIONS,
            message: message.into(),
        }
    }
}

impl From<asreg_core::Error> for Failure {
    fn from(e: asreg_core::Error) -> Self {
        match e {
            asreg_core::Error::NonFinite { .. } => Failure::violations(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Rate(a) => cmd_rate(&a),
        Command::Run(a) => cmd_run(&a),
        Command::Certify(a) => cmd_certify(&a),
        Command::Plot(a) => cmd_plot(&a),
        Command::Corpus(a) => cmd_corpus(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("asreg: {}", f.message);
            f.code
        }
    }
}
