//! The `qanoun` command line: dataset validation and statistics, span
//! scoring, agreement, LLM parsing, decomposition reports and the
//! annotation server.
//!
//! Exit codes: 0 success, 1 data or validation failure, 2 usage error,
//! 3 endpoint transport failure.

pub mod commands;
pub mod error;

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, Result};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "qanoun", version, about = "QA-Noun dataset, evaluation and annotation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every record of a dataset; exits 1 if any violation is found.
    Validate(ValidateArgs),
    /// Template histogram and corpus totals.
    Stats(StatsArgs),
    /// Score predicted against gold datasets with the UA metric.
    Eval(EvalArgs),
    /// Agreement between the two records of each annotated target.
    Iaa(IaaArgs),
    /// Run the LLM noun parser over a corpus.
    Parse(ParseArgs),
    /// Decompose sentences into meaning units and report granularity.
    Decompose(DecomposeArgs),
    /// Start the annotation service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaggerKind {
    /// Skip the noun check.
    None,
    /// Built-in closed-class heuristic.
    Heuristic,
}

#[derive(Debug, Args)]
pub struct TaggerArgs {
    /// Noun tagger for target checks and detection.
    #[arg(long, value_enum, default_value = "heuristic")]
    pub tagger: TaggerKind,
    /// External tagger program; receives one sentence per run as JSON on stdin.
    #[arg(long, value_name = "PROGRAM", conflicts_with = "tagger")]
    pub tagger_cmd: Option<String>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub dataset: PathBuf,
    /// Also check that targets are nouns, using the heuristic tagger.
    #[arg(long)]
    pub check_nouns: bool,
    /// Print violations as JSON lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub dataset: PathBuf,
    /// Compare against the published dataset figures.
    #[arg(long)]
    pub published: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Micro,
    Macro,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_enum, default_value = "micro")]
    pub mode: Mode,
    /// Print the report, with per-target counts, as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    Independent,
    Consolidated,
}

#[derive(Debug, Args)]
pub struct IaaArgs {
    pub dataset: PathBuf,
    /// Which records to pair per target.
    #[arg(long, value_enum, default_value = "independent")]
    pub phase: PhaseArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EndpointArgs {
    /// Endpoint definition (JSON). Secrets are read from the environment
    /// variable it names, never from flags.
    #[arg(long, value_name = "FILE")]
    pub endpoint: PathBuf,
    /// Answer requests from a recorded log instead of the network.
    #[arg(long, value_name = "FILE")]
    pub replay: Option<PathBuf>,
    /// Append every request and response to a log.
    #[arg(long, value_name = "FILE", conflicts_with = "replay")]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Dataset whose targets are parsed; sentences without targets use the tagger.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    #[command(flatten)]
    pub endpoint: EndpointArgs,
    /// Exemplar set replacing the built-in one.
    #[arg(long, value_name = "FILE")]
    pub exemplars: Option<PathBuf>,
    #[command(flatten)]
    pub tagger: TaggerArgs,
    /// Output dataset; stdout if absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Sentences to decompose (dataset format).
    #[arg(long = "in", value_name = "FILE", required_unless_present = "script")]
    pub input: Option<PathBuf>,
    /// Endpoint for the noun parser and judges.
    #[arg(long, value_name = "FILE", required_unless_present = "script")]
    pub endpoint: Option<PathBuf>,
    /// Separate endpoint for the redundancy and entailment judges.
    #[arg(long, value_name = "FILE")]
    pub judge_endpoint: Option<PathBuf>,
    /// External verbal QA service; by default verbal QAs are prompted from the endpoint.
    #[arg(long, value_name = "URL")]
    pub verb_url: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub replay: Option<PathBuf>,
    #[arg(long, value_name = "FILE", conflicts_with = "replay")]
    pub record: Option<PathBuf>,
    /// Scripted sources and judges instead of endpoints.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["input", "endpoint"])]
    pub script: Option<PathBuf>,
    #[command(flatten)]
    pub tagger: TaggerArgs,
    /// Also judge unit pairs from the same source.
    #[arg(long)]
    pub within_source: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = qanoun_core::eval::bootstrap::DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = qanoun_core::eval::bootstrap::DEFAULT_LEVEL)]
    pub level: f64,
    /// Write the machine-readable report here.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, value_name = "DIR")]
    pub data_dir: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// JSON object mapping bearer tokens to annotator ids.
    #[arg(long, value_name = "FILE")]
    pub token_file: PathBuf,
    #[command(flatten)]
    pub tagger: TaggerArgs,
}

/// Parses `argv` and runs the command, writing results to `out` and notes
/// to `err`. Returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
