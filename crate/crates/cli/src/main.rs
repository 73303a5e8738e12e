//! Batch experiment runner for the lattice NOMA library.
//!
//! One subcommand per experiment kind; every experiment reads its own
//! table from a TOML config and writes CSV data plus a JSON metadata
//! sidecar into the output directory. Runs are deterministic for a
//! given seed regardless of the thread count.

mod checkpoint;
mod config;
mod experiments;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Experiment {
    /// Monte-Carlo achievable rates of a superposition scheme.
    RateRegion,
    /// Outage rates over slow Rayleigh fading plus the capacity boundary.
    OutageRegion,
    /// Exact and closed-form minimum product distance over a power sweep.
    ProductDistance,
    /// Analytic vs exhaustive minimum determinant over a power sweep.
    MinDet,
    /// Symbol error rates under block Rayleigh fading.
    Ser,
    /// Closed-form capacity gap tables.
    GapBounds,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::RateRegion => "rate-region",
            Experiment::OutageRegion => "outage-region",
            Experiment::ProductDistance => "product-distance",
            Experiment::MinDet => "min-det",
            Experiment::Ser => "ser",
            Experiment::GapBounds => "gap-bounds",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "latnoma", version, about)]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,
    /// TOML config with one table per experiment.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output directory for CSV and metadata files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Check the config and print diagnostics without running.
    #[arg(long, global = true, default_value_t = false)]
    validate_only: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli.threads.unwrap_or_else(num_threads_default);
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        eprintln!("error: could not build thread pool: {e}");
        return ExitCode::from(1);
    }

    let Some(config_path) = cli.config.as_deref() else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(2);
    };
    let cfg = match config::load(config_path) {
        Ok(cfg) => cfg,
        Err(e) => {
            // TOML parse errors carry line/column positions.
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };

    let diags = validate::validate(&cfg, cli.experiment);
    if !diags.is_empty() {
        for d in &diags {
            eprintln!("invalid: {d}");
        }
        return ExitCode::from(2);
    }
    if cli.validate_only {
        println!("config ok for {}", cli.experiment.name());
        return ExitCode::SUCCESS;
    }

    match experiments::run(cli.experiment, &cfg, cli.seed, &cli.out, threads) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
