//! Benchmark and verification entry points.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

mod bench;
mod demo;
mod run;
mod util;
mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mopbd",
    version,
    about = "Incremental multi-objective path planning benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a seeded batch of simulator instances and print a summary table.
    Bench(BenchArgs),
    /// Run a single instance and print one line per planning task.
    Run(RunArgs),
    /// Cross-check planner fronts against independent oracles on small grids.
    Verify(VerifyArgs),
    /// Show the weighted-sum scalarization counterexample.
    ScalarizationDemo,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ProtocolArg {
    /// Obstacle ahead of the robot on its selected path, every k moves.
    Ahead,
    /// Alternately add/delete two obstacles in the 5x5 window around the robot.
    Multi,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    /// MovingAI .map file.
    #[arg(long)]
    map: PathBuf,
    /// Planners to compare (comma separated); the first one drives the robot.
    #[arg(long, value_delimiter = ',', default_value = "mopbd,namoa")]
    planner: Vec<String>,
    /// Objective count M.
    #[arg(long, default_value_t = 2)]
    objectives: usize,
    /// Approximation factor for the -eps planner variants.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Base seed; instance i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 25)]
    instances: u64,
    /// Robot moves between environment events.
    #[arg(long, default_value_t = 7)]
    k: usize,
    /// Per-task time limit in seconds (default: 60 ahead / 300 multi).
    #[arg(long)]
    time_limit: Option<u64>,
    #[arg(long, value_enum, default_value_t = ProtocolArg::Ahead)]
    protocol: ProtocolArg,
    /// Trace output path (defaults to $MOPBD_OUT_DIR when set).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Also emit scatter data (x = l_k/l_0, y = runtime) to this CSV path.
    #[arg(long)]
    scatter: Option<PathBuf>,
    /// Worker threads over instances.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long, default_value = "mopbd")]
    planner: String,
    #[arg(long, default_value_t = 2)]
    objectives: usize,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 7)]
    k: usize,
    #[arg(long)]
    time_limit: Option<u64>,
    #[arg(long, value_enum, default_value_t = ProtocolArg::Ahead)]
    protocol: ProtocolArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct VerifyArgs {
    /// Side length of the empty verification grid.
    #[arg(long, default_value_t = 4)]
    size: usize,
    #[arg(long, default_value_t = 200)]
    instances: u64,
    #[arg(long, default_value_t = 2)]
    objectives: usize,
    /// 0 checks exact front equality; > 0 checks the (1+eps)^L cover bound.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Moves between obstacle events; small grids need a small k for any
    /// event to fire before the robot arrives.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Corrupt the checked front on purpose; the run must then fail.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// Command failure with its process exit code.
enum Failure {
    Verification(String),
    Usage(String),
    Io(anyhow::Error),
}

impl Failure {
    fn io(e: impl Into<anyhow::Error>) -> Failure {
        Failure::Io(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Bench(args) => bench::cmd_bench(args),
        Cmd::Run(args) => run::cmd_run(args),
        Cmd::Verify(args) => verify::cmd_verify(args),
        Cmd::ScalarizationDemo => demo::cmd_scalarization_demo(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("i/o error: {e:#}");
            ExitCode::from(3)
        }
    }
}
