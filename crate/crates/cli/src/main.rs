//! `pentrack`: tracking metrics, distillation-loss diagnostics, session
//! memory modelling, re-identification simulation, and storage/budget
//! arithmetic behind one executable.
//!
//! Every subcommand writes one JSON document (manifest + report) to
//! standard output; diagnostics go to standard error. Exit codes:
//! 0 ok, 2 input error, 3 empty or degenerate data, 4 numeric
//! degeneracy.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pentrack_cli::commands::{self, Ctx};

#[derive(Parser)]
#[command(name = "pentrack", version, about, disable_help_subcommand = true)]
struct Cli {
    /// Emit only the resolved manifest, without running the computation.
    #[arg(long, global = true)]
    manifest_only: bool,
    /// Write the JSON document to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tracking metrics from ground-truth and prediction track CSVs.
    MotEval(commands::mot_eval::Args),
    /// Distillation loss and fidelity over a tensor pair.
    LossEval(commands::loss_eval::Args),
    /// Re-identification harness over a scenario config.
    ReidSim(commands::reid_sim::Args),
    /// Session memory model with sliding-window pruning.
    PruneSim(commands::prune_sim::Args),
    /// Annual embedding-bank storage and raw-traffic projection.
    Storage(commands::storage::Args),
    /// Device memory budget report.
    Budget(commands::budget::Args),
    /// Classification report from a confusion-matrix CSV.
    ClsEval(commands::cls_eval::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        manifest_only: cli.manifest_only,
        out: cli.out,
    };
    let result = match &cli.command {
        Command::MotEval(args) => commands::mot_eval::run(args, &ctx),
        Command::LossEval(args) => commands::loss_eval::run(args, &ctx),
        Command::ReidSim(args) => commands::reid_sim::run(args, &ctx),
        Command::PruneSim(args) => commands::prune_sim::run(args, &ctx),
        Command::Storage(args) => commands::storage::run(args, &ctx),
        Command::Budget(args) => commands::budget::run(args, &ctx),
        Command::ClsEval(args) => commands::cls_eval::run(args, &ctx),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
