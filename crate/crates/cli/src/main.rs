//! `whitelasso`: simulate sparse regressions with AR(1) errors, fit LASSO /
//! GLS / FGLS estimators, evaluate theoretical bounds, run the Monte Carlo
//! study and render its figures.
//!
//! Exit codes: 0 success, 2 validation error, 1 runtime failure. Data goes
//! to stdout or files; progress and messages go to stderr.

mod chart;
mod commands;
mod config;
mod errors;
mod io;

use clap::Parser;

use errors::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "whitelasso",
    about = "LASSO and (feasible) GLS-LASSO for regressions with AR(1) errors",
    version
)]
enum Cli {
    Simulate(commands::simulate::SimulateArgs),
    Fit(commands::fit::FitArgs),
    EstimateAr(commands::estimate_ar::EstimateArArgs),
    Bounds(commands::bounds::BoundsArgs),
    Frobenius(commands::frobenius::FrobeniusArgs),
    McRun(commands::mc_run::McRunArgs),
    Plot(commands::plot::PlotArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli {
        Cli::Simulate(args) => commands::simulate::run(args),
        Cli::Fit(args) => commands::fit::run(args),
        Cli::EstimateAr(args) => commands::estimate_ar::run(args),
        Cli::Bounds(args) => commands::bounds::run(args),
        Cli::Frobenius(args) => commands::frobenius::run(args),
        Cli::McRun(args) => commands::mc_run::run(args),
        Cli::Plot(args) => commands::plot::run(args),
    };
    match outcome {
        Ok(()) => {}
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}
