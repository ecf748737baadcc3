//! `isus`: multimodel inference and re-weighted subset simulation from the
//! command line.

mod commands;
mod config;
mod io;
mod model;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunArgs;

#[derive(Debug, Parser)]
#[command(name = "isus", version, about = "Imprecise subset simulation", propagate_version = true)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit candidate families and posterior clouds to each dataset.
    Fit(RunArgs),
    /// Build the optimal density, run one subset simulation and re-weight it
    /// for every candidate model.
    Isus(RunArgs),
    /// Plain subset simulation under the true inputs of a benchmark, or under
    /// the optimal density when data or pools are given.
    Sus {
        #[command(flatten)]
        run: RunArgs,
        /// Independent runs.
        #[arg(long, default_value_t = 1)]
        runs: u64,
    },
    /// One independent subset simulation per candidate model (validation).
    Oracle {
        #[command(flatten)]
        run: RunArgs,
        /// A distribution document from `isus` to compare against.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Monte Carlo failure probability of a benchmark under its true inputs.
    Bench {
        /// linear3, plate, frame or linear<β>.
        name: String,
        /// Number of samples.
        n: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Also write a JSON document here.
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
        /// Write the frame ground-motion record as a `t,a` table.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Collect distribution documents into one ECDF table for plotting.
    ExportPlot {
        #[arg(long = "input", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long, short = 'o')]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let result = match cli.command {
        Command::Fit(run) => commands::fit(run),
        Command::Isus(run) => commands::isus(run),
        Command::Sus { run, runs } => commands::sus(run, runs),
        Command::Oracle { run, compare } => commands::oracle(run, compare),
        Command::Bench {
            name,
            n,
            seed,
            workers,
            output,
            record,
        } => commands::bench(&name, n, seed, workers, output, record),
        Command::ExportPlot { inputs, output } => commands::export_plot(&inputs, &output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
