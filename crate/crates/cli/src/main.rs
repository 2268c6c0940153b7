//! `floatloc` command-line tool.
//!
//! Exit codes: 0 on success, 2 for invalid input or usage, 1 for internal
//! failures.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "floatloc",
    version,
    about = "Floating-location placement, oracles, worst-case bounds and drift analysis"
)]
struct Cli {
    /// Worker threads for Monte Carlo and grid sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Place floating locations with the bracket-allocation heuristic.
    Optimize(OptimizeArgs),
    /// Exact optimum by parametric search, optionally checked by brute force.
    Oracle(OracleArgs),
    /// Rank the heuristic against uniformly random placements.
    Montecarlo(MonteCarloArgs),
    /// Worst-case spacing over all bump configurations.
    Worstcase(WorstCaseArgs),
    /// Longest wake-up period keeping head drift below a clearance.
    Wakeup(WakeupArgs),
}

#[derive(Args, Debug)]
struct Io {
    /// Instance JSON file.
    #[arg(long)]
    input: std::path::PathBuf,
    /// Report destination (default: stdout).
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Controllable,
    Strict,
}

impl From<Mode> for floatloc::ObjectiveMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Controllable => floatloc::ObjectiveMode::Controllable,
            Mode::Strict => floatloc::ObjectiveMode::Strict,
        }
    }
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    io: Io,
    /// Objective reported as `objective`.
    #[arg(long, value_enum, default_value_t = Mode::Controllable)]
    mode: Mode,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    io: Io,
    /// Also enumerate every allocation (small instances only).
    #[arg(long)]
    brute: bool,
}

#[derive(Args, Debug)]
struct MonteCarloArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Empirical CDF destination (`value,cumulative_prob`).
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
    /// Per-trial objectives destination (`trial,objective`).
    #[arg(long)]
    samples_csv: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct WorstCaseArgs {
    /// Interval length in tracks.
    #[arg(long)]
    length: f64,
    /// Number of floating locations.
    #[arg(long)]
    floating: usize,
    /// Number of bumps.
    #[arg(long)]
    bumps: usize,
    /// Grid points per bump axis for numerical verification.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct WakeupArgs {
    /// Drift parameter JSON file.
    #[arg(long)]
    params: std::path::PathBuf,
    /// Allowed drift in tracks.
    #[arg(
        long,
        allow_negative_numbers = true,
        required_unless_present = "clearance_from_worstcase",
        conflicts_with = "clearance_from_worstcase"
    )]
    clearance: Option<f64>,
    /// Use the worst-case spacing for LENGTH FLOATING BUMPS as the clearance.
    #[arg(long, num_args = 3, value_names = ["LENGTH", "FLOATING", "BUMPS"])]
    clearance_from_worstcase: Option<Vec<String>>,
    /// Drift trace destination (`t,x,xdot`).
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
    /// Trace length in seconds (default: the wake-up period, or 10 s if infinite).
    #[arg(long)]
    horizon: Option<f64>,
    /// Trace sampling step in seconds.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        floatloc::parallel::configure_threads(threads);
    }
    let result = match cli.command {
        Command::Optimize(a) => commands::optimize(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Montecarlo(a) => commands::montecarlo(a),
        Command::Worstcase(a) => commands::worstcase(a),
        Command::Wakeup(a) => commands::wakeup(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(1)
        }
    }
}
