//! Experiment CLI for worst-class boosting: data generation, training,
//! evaluation, sweeps, theta selection, and plot-ready exports.

use std::path::Path;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod model;
mod sweep;

use error::CliError;

#[derive(Parser)]
#[command(
    name = "wcboost",
    version,
    about = "Boosting experiments that bound the worst-class error"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark dataset (train/test files plus the blob spec).
    GenData(commands::GenDataArgs),
    /// Train one model and write it as JSON.
    Train(commands::TrainArgs),
    /// Evaluate a trained model on a dataset.
    Evaluate(commands::EvaluateArgs),
    /// Run every (method, theta, size, seed) cell of an experiment config.
    Sweep(sweep::SweepArgs),
    /// Pick theta by worst-class validation error from sweep records.
    SelectTheta(commands::SelectThetaArgs),
    /// Export a decision-boundary lattice as CSV (2D models).
    ExportBoundary(commands::ExportBoundaryArgs),
    /// Evaluate the worst-class generalization bound.
    Bound(commands::BoundArgs),
    /// Rebuild aggregate CSVs from per-run JSON records.
    Report(sweep::ReportArgs),
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        let payload = serde_json::json!({
            "error": err.code(),
            "message": err.to_string(),
        });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::GenData(args) => commands::gen_data(args),
        Command::Train(args) => commands::train(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::Sweep(args) => sweep::sweep(args),
        Command::SelectTheta(args) => commands::select_theta_command(args),
        Command::ExportBoundary(args) => commands::export_boundary(args),
        Command::Bound(args) => commands::bound(args),
        Command::Report(args) => sweep::report(args),
    }
}

/// Writes via a temp file and rename so partially written outputs never
/// appear under the final name.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
