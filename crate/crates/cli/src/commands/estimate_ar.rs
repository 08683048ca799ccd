use std::path::PathBuf;

use clap::Args;
use ndarray::Array1;
use whitelasso_core::whiten::estimate_ar1;

use crate::errors::{require_input, CliResult};
use crate::io::read_series;

/// Estimate the AR(1) coefficient of a residual series by least squares.
#[derive(Debug, Args)]
pub struct EstimateArArgs {
    /// Residual series: one value per line, or a single-column CSV.
    pub input: PathBuf,
}

pub fn run(args: EstimateArArgs) -> CliResult<()> {
    require_input(&args.input)?;
    let values = read_series(&args.input)?;
    let series = Array1::from_vec(values);
    let fit = estimate_ar1(series.view())?;
    println!("rho_raw,rho_used,clamped");
    println!("{},{},{}", fit.rho_raw, fit.rho_used, fit.clamped);
    Ok(())
}
