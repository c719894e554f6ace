//! Command-line front end.
//!
//! Each subcommand covers one analysis family; `report` runs every family
//! the bundle has data for and records what it skipped. All produced tables
//! are printed to stdout as markdown and written under `--out` in each
//! requested format.
//!
//! Exit codes: 2 for configuration problems (bad flags, unwritable output,
//! argument parse failures), 3 for data problems (missing or unusable
//! datasets), 1 for internal failures.

mod index_cmd;
mod sections;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::ingest::{load_bundle, validate_cross, Bundle};
use crate::report::{write_tables, OutputFormat, Table};

/// Environment variable naming a remote toxicity-scoring endpoint.
pub const TOXICITY_ENDPOINT_ENV: &str = "ECOLENS_TOXICITY_ENDPOINT";
/// Environment variable holding the API key sent to that endpoint.
pub const TOXICITY_KEY_ENV: &str = "ECOLENS_TOXICITY_API_KEY";

#[derive(Debug, Parser)]
#[command(
    name = "ecolens",
    version,
    about = "Ecosystem-scale analysis of foundation-model evaluations"
)]
pub struct Cli {
    /// Manifest describing the dataset bundle to analyze.
    #[arg(long, global = true, value_name = "FILE")]
    manifest: Option<PathBuf>,

    /// Directory tables are written into.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Formats to write tables in.
    #[arg(
        long,
        global = true,
        value_enum,
        value_delimiter = ',',
        default_values = ["csv", "json", "md"]
    )]
    format: Vec<OutputFormat>,

    /// Decimal places for floats in csv and markdown output. JSON output
    /// always keeps full precision.
    #[arg(long, global = true, default_value_t = 3)]
    precision: usize,

    /// Worker threads. Defaults to one per core; results never depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare observed failure overlap against an independence baseline.
    Homogenize,
    /// Score prediction logs, ranked lists, and generation statistics.
    Metrics,
    /// Estimate training energy, emissions, and inference runtimes.
    Efficiency,
    /// Score transparency sheets and run rater workflows.
    Index {
        #[command(subcommand)]
        op: IndexOp,
    },
    /// Flag emergent capabilities on scaling curves.
    Scaling {
        /// Tolerance within which performance counts as random-level.
        #[arg(long, value_name = "EPS")]
        near_random_tol: f64,
        /// Minimum rise above the random baseline that counts as a jump.
        #[arg(long, value_name = "DELTA")]
        jump_min: f64,
    },
    /// Run every analysis the bundle has data for.
    Report {
        /// Tolerance within which performance counts as random-level.
        #[arg(long, value_name = "EPS")]
        near_random_tol: Option<f64>,
        /// Minimum rise above the random baseline that counts as a jump.
        #[arg(long, value_name = "DELTA")]
        jump_min: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
enum IndexOp {
    /// Aggregate every sheet in the bundle, whoever rated it.
    Score,
    /// Agreement statistics for entities rated by more than one rater.
    Agree,
    /// Merge two raters' sheets into one using an adjudication file.
    Resolve {
        /// JSON file mapping entity id -> indicator id -> adjudicated score.
        #[arg(long, value_name = "FILE")]
        resolutions: PathBuf,
    },
    /// Aggregate the single final sheet of each entity and edition.
    Aggregate,
    /// Pairwise agreement between entities' final sheets, per edition.
    Correlate,
    /// Compare aggregate scores across entity cohorts.
    Cohorts,
    /// Point changes between two editions.
    Diff,
}

/// Failure class, mapped onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// Bad invocation: missing or contradictory flags, unwritable output.
    Config,
    /// The bundle cannot support the requested analysis.
    Data,
    /// A bug or an unexpected runtime condition.
    Internal,
}

/// An error surfaced to the user, carrying its exit code.
#[derive(Debug)]
pub struct RunError {
    failure: Failure,
    message: String,
}

impl RunError {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        Self {
            failure: Failure::Config,
            message: message.into(),
        }
    }

    pub(crate) fn data(message: impl Into<String>) -> Self {
        Self {
            failure: Failure::Data,
            message: message.into(),
        }
    }

    pub(crate) fn internal(message: impl Into<String>) -> Self {
        Self {
            failure: Failure::Internal,
            message: message.into(),
        }
    }

    pub fn failure(&self) -> Failure {
        self.failure
    }

    pub fn exit_code(&self) -> u8 {
        match self.failure {
            Failure::Config => 2,
            Failure::Data => 3,
            Failure::Internal => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for RunError {}

/// Analysis errors come from bad or insufficient data; flag problems are
/// constructed as `Config` explicitly at the sites that detect them.
impl From<crate::Error> for RunError {
    fn from(e: crate::Error) -> Self {
        RunError::data(e.to_string())
    }
}

/// Where produced files go. Threaded through to subcommands that write
/// files of their own beyond the shared table output.
struct Sink<'a> {
    out_dir: &'a Path,
    formats: &'a [OutputFormat],
}

/// Parses argv and runs; the binary's whole `main`.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let manifest = cli
        .manifest
        .as_deref()
        .ok_or_else(|| RunError::config("--manifest is required"))?;
    check_flags(&cli.command)?;
    let mut formats: Vec<OutputFormat> = Vec::new();
    for f in &cli.format {
        if !formats.contains(f) {
            formats.push(*f);
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::internal(format!("cannot build thread pool: {e}")))?;
    let bundle = load_bundle(manifest)?;
    let sink = Sink {
        out_dir: &cli.out,
        formats: &formats,
    };
    let tables = pool.install(|| build_tables(&cli.command, &bundle, &sink))?;
    let tables: Vec<Table> = tables.into_iter().filter(|t| !t.is_empty()).collect();
    write_tables(&tables, &cli.out, &formats, cli.precision).map_err(|e| {
        RunError::config(format!("cannot write under {}: {e}", cli.out.display()))
    })?;
    let mut rendered = String::new();
    for table in &tables {
        rendered.push_str(&format!(
            "## {}\n\n{}\n",
            table.name,
            table.to_markdown(cli.precision)
        ));
    }
    print!("{rendered}");
    Ok(())
}

/// Threshold flags are validated before any data is read so a bad flag pair
/// exits as a configuration error even on an unreadable bundle.
fn check_flags(command: &Command) -> Result<(), RunError> {
    match command {
        Command::Scaling {
            near_random_tol,
            jump_min,
        } => check_thresholds(*near_random_tol, *jump_min),
        Command::Report {
            near_random_tol,
            jump_min,
        } => match (near_random_tol, jump_min) {
            (Some(eps), Some(delta)) => check_thresholds(*eps, *delta),
            (None, None) => Ok(()),
            _ => Err(RunError::config(
                "--near-random-tol and --jump-min must be given together",
            )),
        },
        _ => Ok(()),
    }
}

fn check_thresholds(eps: f64, delta: f64) -> Result<(), RunError> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(RunError::config(format!(
            "--near-random-tol must be finite and >= 0, got {eps}"
        )));
    }
    if !delta.is_finite() || delta <= eps {
        return Err(RunError::config(format!(
            "--jump-min must exceed --near-random-tol ({eps}), got {delta}"
        )));
    }
    Ok(())
}

fn build_tables(
    command: &Command,
    bundle: &Bundle,
    sink: &Sink<'_>,
) -> Result<Vec<Table>, RunError> {
    match command {
        Command::Homogenize => sections::homogenization(bundle),
        Command::Metrics => sections::metrics(bundle),
        Command::Efficiency => sections::efficiency(bundle),
        Command::Index { op } => index_cmd::run(op, bundle, sink),
        Command::Scaling {
            near_random_tol,
            jump_min,
        } => sections::scaling(bundle, *near_random_tol, *jump_min),
        Command::Report {
            near_random_tol,
            jump_min,
        } => report(bundle, *near_random_tol, *jump_min, sink),
    }
}

/// Appends `result`'s tables, or records why the analysis was skipped.
/// Only data-class errors downgrade to a skip; the `report` subcommand is a
/// survey of whatever the bundle supports, not a strict pipeline.
fn run_or_skip(
    name: &str,
    result: Result<Vec<Table>, RunError>,
    tables: &mut Vec<Table>,
    skipped: &mut Table,
) -> Result<(), RunError> {
    match result {
        Ok(mut produced) => {
            tables.append(&mut produced);
            Ok(())
        }
        Err(e) if e.failure() == Failure::Data => {
            skipped.push(vec![name.into(), e.to_string().into()]);
            Ok(())
        }
        Err(e) => Err(e),
    }
}

fn report(
    bundle: &Bundle,
    eps: Option<f64>,
    delta: Option<f64>,
    sink: &Sink<'_>,
) -> Result<Vec<Table>, RunError> {
    let mut tables = Vec::new();
    let mut skipped = Table::new("skipped", &["analysis", "reason"]);
    run_or_skip(
        "homogenize",
        sections::homogenization(bundle),
        &mut tables,
        &mut skipped,
    )?;
    run_or_skip("metrics", sections::metrics(bundle), &mut tables, &mut skipped)?;
    run_or_skip(
        "efficiency",
        sections::efficiency(bundle),
        &mut tables,
        &mut skipped,
    )?;
    let index_ops = [
        ("index", IndexOp::Aggregate),
        ("index agree", IndexOp::Agree),
        ("index correlate", IndexOp::Correlate),
        ("index cohorts", IndexOp::Cohorts),
        ("index diff", IndexOp::Diff),
    ];
    for (name, op) in &index_ops {
        run_or_skip(name, index_cmd::run(op, bundle, sink), &mut tables, &mut skipped)?;
    }
    match (eps, delta) {
        (Some(eps), Some(delta)) => run_or_skip(
            "scaling",
            sections::scaling(bundle, eps, delta),
            &mut tables,
            &mut skipped,
        )?,
        _ => skipped.push(vec![
            "scaling".into(),
            "no emergence thresholds; pass --near-random-tol and --jump-min".into(),
        ]),
    }
    let mut cross = Table::new("cross_validation", &["dataset", "message"]);
    for violation in validate_cross(bundle) {
        cross.push(vec![violation.dataset.into(), violation.message.into()]);
    }
    tables.push(cross);
    tables.push(skipped);
    Ok(tables)
}
