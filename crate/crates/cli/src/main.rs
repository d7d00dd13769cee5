//! Command-line front end: decide single instances, sweep for the minimal
//! winning capacity, and verify strategy certificates.
//!
//! Exit codes are the machine contract (stdout formatting is not):
//! 0 = online player wins / certificate valid, 1 = adversary wins /
//! certificate invalid, 2 = usage, model, or format error,
//! 3 = inconclusive (node limit), 4 = cache memory cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use binstretch::cache::CacheConfig;
use binstretch::certificate::{extract, Certificate, ExtractError, VerifyOutcome};
use binstretch::solver::{SolveInterrupt, Solver, SweepConclusion};
use binstretch::{
    minimal_capacity, solve_instance, Outcome, Params, SolveConfig, SolveError, SolveStats,
};

const EXIT_WIN: u8 = 0;
const EXIT_LOSS: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_MEMORY_CAP: u8 = 4;

/// Environment variable holding a hard cap (in bytes) on the estimated heap
/// usage of the dominance cache. Exceeding it aborts with exit code 4.
const CACHE_CAP_ENV: &str = "BINSTRETCH_CACHE_CAP_BYTES";

/// Instances at or above this many bins times granularity take from hours to
/// days and are refused without `--i-have-days`.
const LONG_RUN_GATE: u64 = 60;

#[derive(Parser)]
#[command(
    name = "binstretch",
    version,
    about = "Exact search for online bin stretching bounds",
    after_help = "Exit codes: 0 win/valid, 1 loss/invalid, 2 usage or format error, \
                  3 inconclusive, 4 cache memory cap exceeded.\n\
                  The cache memory cap is read from BINSTRETCH_CACHE_CAP_BYTES."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one (bins, granularity, capacity) instance.
    Solve(SolveArgs),
    /// Scan capacities upward for the smallest winning one.
    Sweep(SweepArgs),
    /// Check a strategy certificate against the game rules.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Number of online (and offline) bins.
    #[arg(long)]
    bins: usize,
    /// Number of item classes; the scaled offline bin size.
    #[arg(long)]
    granularity: u32,
    /// Scaled online bin size; a bin is lost when its level reaches it.
    #[arg(long)]
    capacity: u32,
    /// Write the winning strategy certificate to this path.
    #[arg(long)]
    cert: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Number of online (and offline) bins.
    #[arg(long)]
    bins: usize,
    /// Number of item classes; capacities from here to twice here are tried.
    #[arg(long)]
    granularity: u32,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate file to check.
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args)]
struct CommonArgs {
    /// Disable the dominance cache (slower, same outcomes).
    #[arg(long)]
    no_cache: bool,
    /// Run the cheat check on the prior history only, without the item that
    /// just failed every placement.
    #[arg(long)]
    che_literal: bool,
    /// Print solver counters as stat: lines.
    #[arg(long)]
    stats: bool,
    /// Trace every solve entry at most this deep (to stderr).
    #[arg(long, value_name = "DEPTH")]
    trace_depth: Option<u32>,
    /// Give up with an inconclusive outcome after this many solve calls.
    #[arg(long, value_name = "N")]
    node_limit: Option<u64>,
    /// Worker threads splitting the root items (certificate extraction is
    /// always single-threaded).
    #[arg(long, default_value_t = 1, value_name = "N")]
    workers: usize,
    /// Confirm a search that is expected to run for days.
    #[arg(long)]
    i_have_days: bool,
    /// Drop cache entries made redundant by newer ones (experimental).
    #[arg(long)]
    prune_cache: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    };
    ExitCode::from(code)
}

fn fail(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_ERROR
}

fn build_config(common: &CommonArgs) -> Result<SolveConfig, String> {
    let memory_cap_bytes = match std::env::var(CACHE_CAP_ENV) {
        Ok(raw) => Some(
            raw.parse::<u64>()
                .map_err(|_| format!("{CACHE_CAP_ENV} must be a byte count, got {raw:?}"))?,
        ),
        Err(std::env::VarError::NotPresent) => None,
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(format!("{CACHE_CAP_ENV} is not valid unicode"));
        }
    };
    if common.workers == 0 {
        return Err("--workers must be at least 1".into());
    }
    Ok(SolveConfig {
        cache_enabled: !common.no_cache,
        che_includes_current_item: !common.che_literal,
        node_limit: common.node_limit,
        trace_depth: common.trace_depth,
        workers: common.workers,
        cache: CacheConfig {
            prune_dominated: common.prune_cache,
            memory_cap_bytes,
        },
    })
}

fn long_run_guard(bins: usize, granularity: u32, confirmed: bool) -> Result<(), String> {
    if bins as u64 * granularity as u64 >= LONG_RUN_GATE && !confirmed {
        return Err(format!(
            "bins={bins} granularity={granularity} is a multi-day search; \
             pass --i-have-days to run it anyway"
        ));
    }
    Ok(())
}

fn alpha(granularity: u32, capacity: u32) -> String {
    // exact ratio first; the decimal is rounded up so it stays a bound
    let scaled = (capacity as u64 * 10_000).div_ceil(granularity as u64);
    format!(
        "{capacity}/{granularity} ({}.{:04})",
        scaled / 10_000,
        scaled % 10_000
    )
}

fn outcome_label(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::AlgorithmWins => "algorithm wins",
        Outcome::AdversaryWins => "adversary wins",
        Outcome::Inconclusive => "inconclusive (node limit reached)",
    }
}

fn outcome_exit(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::AlgorithmWins => EXIT_WIN,
        Outcome::AdversaryWins => EXIT_LOSS,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn print_stats(stats: &SolveStats) {
    for (key, value) in stats.entries() {
        println!("stat:{key}={value}");
    }
}

fn cmd_solve(args: SolveArgs) -> u8 {
    let params = match Params::new(args.bins, args.granularity, args.capacity) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let config = match build_config(&args.common) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Err(e) = long_run_guard(args.bins, args.granularity, args.common.i_have_days) {
        return fail(e);
    }

    println!(
        "instance: bins={} granularity={} capacity={}",
        params.bins(),
        params.granularity(),
        params.capacity()
    );
    println!("alpha: {}", alpha(params.granularity(), params.capacity()));

    let started = Instant::now();
    let (outcome, stats, certificate) = if args.cert.is_some() {
        // extraction replays the strategy on the same solver, so the solve
        // and the certificate come from one single-threaded run
        if config.workers > 1 {
            eprintln!("note: certificate extraction is single-threaded; ignoring --workers");
        }
        let mut solver = Solver::new(
            params,
            &SolveConfig {
                workers: 1,
                ..config
            },
        );
        match extract(&mut solver) {
            Ok(cert) => (Outcome::AlgorithmWins, solver.stats(), Some(cert)),
            Err(ExtractError::NotWinning) => (Outcome::AdversaryWins, solver.stats(), None),
            Err(ExtractError::Interrupted(SolveInterrupt::NodeLimitExceeded)) => {
                (Outcome::Inconclusive, solver.stats(), None)
            }
            Err(ExtractError::Interrupted(SolveInterrupt::MemoryCapExceeded { cap_bytes })) => {
                eprintln!("error: cache memory cap of {cap_bytes} bytes exceeded");
                return EXIT_MEMORY_CAP;
            }
            Err(e @ ExtractError::Inconsistent { .. }) => return fail(e),
        }
    } else {
        match solve_instance(params, &config) {
            Ok(report) => (report.outcome, report.stats, None),
            Err(SolveError::MemoryCapExceeded { cap_bytes }) => {
                eprintln!("error: cache memory cap of {cap_bytes} bytes exceeded");
                return EXIT_MEMORY_CAP;
            }
            Err(SolveError::Model(e)) => return fail(e),
        }
    };
    let wall = started.elapsed();

    println!("outcome: {}", outcome_label(outcome));
    println!("time: {:.3}s", wall.as_secs_f64());
    if let (Some(cert), Some(path)) = (certificate, args.cert.as_deref()) {
        if let Err(e) = fs::write(path, cert.to_json()) {
            return fail(format_args!("writing {}: {e}", path.display()));
        }
        println!("certificate: {}", path.display());
    }
    if args.common.stats {
        print_stats(&stats);
    }
    outcome_exit(outcome)
}

fn cmd_sweep(args: SweepArgs) -> u8 {
    if let Err(e) = Params::new(args.bins, args.granularity, args.granularity.saturating_mul(2)) {
        return fail(e);
    }
    let config = match build_config(&args.common) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Err(e) = long_run_guard(args.bins, args.granularity, args.common.i_have_days) {
        return fail(e);
    }

    println!(
        "instance: bins={} granularity={}",
        args.bins, args.granularity
    );
    let sweep = match minimal_capacity(args.bins, args.granularity, &config) {
        Ok(s) => s,
        Err(SolveError::MemoryCapExceeded { cap_bytes }) => {
            eprintln!("error: cache memory cap of {cap_bytes} bytes exceeded");
            return EXIT_MEMORY_CAP;
        }
        Err(SolveError::Model(e)) => return fail(e),
    };
    for step in &sweep.steps {
        println!(
            "capacity {}: {} ({:.3}s)",
            step.capacity,
            outcome_label(step.outcome),
            step.wall.as_secs_f64()
        );
        if args.common.stats {
            print_stats(&step.stats);
        }
    }
    match sweep.conclusion {
        SweepConclusion::Found { capacity } => {
            println!("minimal capacity: {capacity}");
            println!("alpha: {}", alpha(args.granularity, capacity));
            EXIT_WIN
        }
        SweepConclusion::NoneWithinTwiceGranularity => {
            println!(
                "no winning capacity up to {} (stretching factor 2)",
                args.granularity.saturating_mul(2)
            );
            EXIT_LOSS
        }
        SweepConclusion::Inconclusive { capacity } => {
            println!("inconclusive at capacity {capacity}; sweep abandoned");
            EXIT_INCONCLUSIVE
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> u8 {
    let text = match fs::read_to_string(&args.cert) {
        Ok(t) => t,
        Err(e) => return fail(format_args!("reading {}: {e}", args.cert.display())),
    };
    let cert = match Certificate::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    print_certificate_header(&args.cert, &cert);
    match cert.verify() {
        VerifyOutcome::Valid => {
            println!("result: valid");
            EXIT_WIN
        }
        VerifyOutcome::Invalid { failure, state } => {
            println!("result: invalid");
            println!("failure: {failure}");
            println!("state: {state}");
            EXIT_LOSS
        }
    }
}

fn print_certificate_header(path: &Path, cert: &Certificate) {
    println!("certificate: {}", path.display());
    println!(
        "instance: bins={} granularity={} capacity={} (alpha {})",
        cert.params.bins(),
        cert.params.granularity(),
        cert.params.capacity(),
        alpha(cert.params.granularity(), cert.params.capacity())
    );
    println!("nodes: {}", cert.nodes.len());
}
