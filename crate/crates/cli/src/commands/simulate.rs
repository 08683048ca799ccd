use std::path::PathBuf;

use clap::Args;
use whitelasso_core::datagen::{simulate_dataset, DesignCov, DgpConfig, InitMode};

use crate::errors::{require_writable, validation, CliResult};
use crate::io::{write_dataset_csv, write_meta_toml};

/// Generate a synthetic dataset and write it as CSV plus a metadata sidecar.
#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sample size.
    #[arg(long)]
    pub n: usize,
    /// Number of predictors.
    #[arg(long)]
    pub p: usize,
    /// Number of nonzero coefficients; defaults to floor(p / 10).
    #[arg(long)]
    pub s: Option<usize>,
    /// AR(1) coefficient of the errors, in (-1,1).
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    /// Innovation standard deviation.
    #[arg(long = "sigma-u", default_value_t = 1.0)]
    pub sigma_u: f64,
    /// Error initialization: stationary | fixed.
    #[arg(long, default_value = "stationary")]
    pub init: String,
    /// Variance of the first error term (with --init fixed).
    #[arg(long = "init-var")]
    pub init_var: Option<f64>,
    /// Magnitude of the nonzero coefficients.
    #[arg(long = "beta-magnitude", default_value_t = 1.0)]
    pub beta_magnitude: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
    /// Metadata sidecar path; defaults to `<output>.meta.toml`.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

pub fn parse_init(init: &str, init_var: Option<f64>) -> CliResult<InitMode> {
    match init {
        "stationary" => Ok(InitMode::Stationary),
        "fixed" => {
            let v1 = init_var.ok_or_else(|| validation("--init fixed requires --init-var"))?;
            Ok(InitMode::FixedVariance(v1))
        }
        other => Err(validation(format!(
            "unknown init `{other}` (expected stationary or fixed)"
        ))),
    }
}

pub fn run(args: SimulateArgs) -> CliResult<()> {
    let meta_path = args
        .meta
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.meta.toml", args.output.display())));
    require_writable(&args.output)?;
    require_writable(&meta_path)?;

    let config = DgpConfig {
        n: args.n,
        p: args.p,
        s: args.s.unwrap_or(args.p / 10),
        rho: args.rho,
        sigma_u: args.sigma_u,
        init_mode: parse_init(&args.init, args.init_var)?,
        design_cov: DesignCov::Identity,
        beta_magnitude: args.beta_magnitude,
        seed: args.seed,
    };
    config.validate()?;
    let data = simulate_dataset(&config)?;
    write_dataset_csv(&args.output, &data)?;
    write_meta_toml(&meta_path, &config, &data)?;
    Ok(())
}
