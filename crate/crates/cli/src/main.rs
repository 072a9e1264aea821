//! `critspectra`: batch front end for simulation, spectral analysis,
//! random-matrix baselines, the circulant oracle and exponent studies.
//!
//! Exit codes: 0 success, 2 config error, 3 precondition error,
//! 4 numerical failure.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "critspectra", version, about = "Spectral diagnostics of criticality")]
struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, env = "CRITSPECTRA_JOBS", default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Ising simulation described by a config file.
    Simulate(SimulateArgs),
    /// Spectral observables of a recorded time series.
    Spectrum(commands::spectrum::SpectrumArgs),
    /// Emerging spectra of power-mapped Wishart matrices.
    RmtBaseline(commands::rmt::RmtArgs),
    /// Exact circulant spectrum and its Zipf exponent.
    Oracle(commands::oracle::OracleArgs),
    /// Fitted exponent as a function of lattice size.
    Study(StudyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write the series as CSV, one row per site.
    #[arg(long)]
    export_csv: bool,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cli.jobs)))?;
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate::run(&a.config, &a.out, a.export_csv),
        Command::Spectrum(a) => commands::spectrum::run(&a),
        Command::RmtBaseline(a) => commands::rmt::run(&a),
        Command::Oracle(a) => commands::oracle::run(&a),
        Command::Study(a) => commands::study::run(&a.config, &a.out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("critspectra: {e}");
            e.exit_code()
        }
    }
}
