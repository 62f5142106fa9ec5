//! `mutcat` — benchmark driver for the mutable categorical distribution.
//!
//! Subcommands:
//! * `bench-steady`: steady-state experiment, CSV with one row per
//!   checkpoint plus a trailing summary comment.
//! * `bench-deletion`: mass-deletion experiment, CSV with a single row.
//! * `selftest`: randomized invariant and oracle cross-checks.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when an
//! internal invariant check fails.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use mutable_categorical::workload::{
    run_deletion, run_steady_state, DeletionConfig, MeasurementRow, SteadyStateConfig, Summary,
    WeightDistribution,
};
use mutable_categorical::Error;

mod selftest;

/// Environment variable consulted for the seed when `--seed` is absent.
const SEED_ENV: &str = "MUTCAT_SEED";
const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(
    name = "mutcat",
    version,
    about = "Benchmarks for a mutable categorical distribution sampled through a weighted tree"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state experiment: random add/delete/modify churn with
    /// periodic measured-vs-optimal checkpoints.
    BenchSteady(BenchSteadyArgs),
    /// Mass-deletion experiment: delete a large distribution down to a
    /// small remainder and measure the final state.
    BenchDeletion(BenchDeletionArgs),
    /// Randomized invariant and oracle cross-checks over the public API.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct BenchSteadyArgs {
    /// Categories present before burn-in.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Mutations before measurement starts.
    #[arg(long, default_value_t = 25_000)]
    burnin: u64,
    /// Mutations during the measured phase.
    #[arg(long, default_value_t = 25_000)]
    ops: u64,
    /// Checkpoint cadence within the measured phase.
    #[arg(long, default_value_t = 500)]
    every: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BenchDeletionArgs {
    /// Categories built before deletion starts.
    #[arg(long, default_value_t = 100_000)]
    initial: usize,
    /// Categories remaining when the run stops.
    #[arg(long = "final", default_value_t = 1024)]
    final_count: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Weight generator for new and reweighted categories.
    #[arg(long, default_value = "uniform", value_parser = ["uniform", "exponential", "resonance"])]
    dist: String,
    /// Rotation pass after each mutation.
    #[arg(long, default_value = "off", value_parser = ["on", "off"])]
    rotations: String,
    /// 64-bit seed; falls back to $MUTCAT_SEED, then 1.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// 64-bit seed; falls back to $MUTCAT_SEED, then 1.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version are not failures; everything else is a
            // usage error.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed stdout (e.g. piping into `head`) is not a failure.
        Err(AppError::Io(err)) if err.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                AppError::Internal(_) => ExitCode::from(2),
                AppError::Config(_) | AppError::Io(_) => ExitCode::from(1),
            }
        }
    }
}

enum AppError {
    Config(String),
    Io(io::Error),
    Internal(String),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(msg) => write!(f, "{msg}"),
            AppError::Io(err) => write!(f, "{err}"),
            AppError::Internal(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<io::Error> for AppError {
    fn from(err: io::Error) -> Self {
        AppError::Io(err)
    }
}

impl From<Error> for AppError {
    fn from(err: Error) -> Self {
        match err {
            Error::Internal(msg) => AppError::Internal(msg),
            other => AppError::Config(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::BenchSteady(args) => {
            let config = SteadyStateConfig {
                n_categories: args.n,
                burn_in_ops: args.burnin,
                measured_ops: args.ops,
                measure_every: args.every,
                dist: parse_dist(&args.common.dist)?,
                rotations: args.common.rotations == "on",
                seed: resolve_seed(args.common.seed)?,
            };
            let result = run_steady_state(&config)?;
            write_report(args.common.out.as_deref(), &result.rows, &result.summary)?;
            Ok(())
        }
        Command::BenchDeletion(args) => {
            let config = DeletionConfig {
                initial_categories: args.initial,
                final_categories: args.final_count,
                dist: parse_dist(&args.common.dist)?,
                rotations: args.common.rotations == "on",
                seed: resolve_seed(args.common.seed)?,
            };
            let row = run_deletion(&config)?;
            let summary = Summary {
                mean_e_l: row.e_l,
                mean_e_opt: row.e_opt,
                mean_ratio: row.ratio,
            };
            write_report(
                args.common.out.as_deref(),
                std::slice::from_ref(&row),
                &summary,
            )?;
            Ok(())
        }
        Command::Selftest(args) => {
            let seed = resolve_seed(args.seed)?;
            let failures = selftest::run(seed);
            if failures == 0 {
                println!("selftest passed");
                Ok(())
            } else {
                Err(AppError::Internal(format!(
                    "selftest: {failures} check(s) failed"
                )))
            }
        }
    }
}

fn parse_dist(name: &str) -> Result<WeightDistribution, AppError> {
    name.parse::<WeightDistribution>()
        .map_err(|e| AppError::Config(e.to_string()))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, AppError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw.parse::<u64>().map_err(|_| {
            AppError::Config(format!(
                "{SEED_ENV} must be a 64-bit unsigned integer, got `{raw}`"
            ))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// CSV schema: `op_index,n,e_l,e_opt,ratio` rows followed by one summary
/// comment line. Floats are printed in shortest round-trip form, so
/// re-parsing a column reproduces the exact values.
fn write_report(
    out: Option<&std::path::Path>,
    rows: &[MeasurementRow],
    summary: &Summary,
) -> io::Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path)?;
            let mut writer = BufWriter::new(file);
            write_csv(&mut writer, rows, summary)?;
            writer.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut handle = stdout.lock();
            write_csv(&mut handle, rows, summary)?;
            handle.flush()
        }
    }
}

fn write_csv<W: Write>(out: &mut W, rows: &[MeasurementRow], summary: &Summary) -> io::Result<()> {
    writeln!(out, "op_index,n,e_l,e_opt,ratio")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.op_index, row.n, row.e_l, row.e_opt, row.ratio
        )?;
    }
    writeln!(
        out,
        "# mean_e_l={},mean_e_opt={},mean_ratio={}",
        summary.mean_e_l, summary.mean_e_opt, summary.mean_ratio
    )
}
