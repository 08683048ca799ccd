use std::path::PathBuf;

use clap::Args;
use whitelasso_core::mc::{records_csv, results_csv, run_scenario_with_progress};

use crate::config::RunConfig;
use crate::errors::{require_writable, runtime, validation, CliResult};

/// Run the Monte Carlo study and write the aggregated results CSV.
#[derive(Debug, Args)]
pub struct McRunArgs {
    /// Study configuration file (TOML); flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sample sizes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Dimensions, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<usize>>,
    /// Persistence values, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub rho: Option<Vec<f64>>,
    /// Estimators, comma-separated subset of lasso,gls,fgls.
    #[arg(long, value_delimiter = ',')]
    pub estimators: Option<Vec<String>>,
    /// Replications per cell.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "sigma-u")]
    pub sigma_u: Option<f64>,
    /// Fixed sparsity; defaults to floor(p / 10).
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long = "beta-magnitude")]
    pub beta_magnitude: Option<f64>,
    /// Error initialization: stationary | fixed.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long = "init-var")]
    pub init_var: Option<f64>,
    /// Penalty by cross-validation (default tuning mode).
    #[arg(long)]
    pub cv: bool,
    /// Fixed penalty for every stage.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Closed-form theoretical penalties.
    #[arg(long = "lambda-theory")]
    pub lambda_theory: bool,
    #[arg(long = "grid-len")]
    pub grid_len: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "theory-c")]
    pub theory_c: Option<f64>,
    #[arg(long = "theory-k")]
    pub theory_k: Option<f64>,
    #[arg(long = "c-prop3")]
    pub c_prop3: Option<f64>,
    /// Worker threads; falls back to WHITELASSO_THREADS, then all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Results CSV path.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
    /// Optional per-replication dump CSV.
    #[arg(long = "dump-reps")]
    pub dump_reps: Option<PathBuf>,
}

impl McRunArgs {
    fn tuning_override(&self) -> CliResult<Option<String>> {
        let chosen = [self.cv, self.lambda.is_some(), self.lambda_theory]
            .iter()
            .filter(|b| **b)
            .count();
        if chosen > 1 {
            return Err(validation("choose one of --cv, --lambda, --lambda-theory"));
        }
        Ok(if self.cv {
            Some("cv".to_string())
        } else if self.lambda.is_some() {
            Some("fixed".to_string())
        } else if self.lambda_theory {
            Some("theory".to_string())
        } else {
            None
        })
    }

    fn as_overrides(&self) -> CliResult<RunConfig> {
        Ok(RunConfig {
            n: self.n.clone(),
            p: self.p.clone(),
            rho: self.rho.clone(),
            estimators: self.estimators.clone(),
            replications: self.reps,
            base_seed: self.seed,
            sigma_u: self.sigma_u,
            s: self.s,
            beta_magnitude: self.beta_magnitude,
            init: self.init.clone(),
            init_variance: self.init_var,
            design: None,
            design_diagonal: None,
            tuning: self.tuning_override()?,
            lambda: self.lambda,
            grid_len: self.grid_len,
            tau: self.tau,
            theory_c: self.theory_c,
            theory_k: self.theory_k,
            c_prop3: self.c_prop3,
            threads: self.threads,
            results: self.out.clone(),
            dump_reps: self.dump_reps.clone(),
        })
    }
}

fn env_threads() -> CliResult<Option<usize>> {
    match std::env::var("WHITELASSO_THREADS") {
        Ok(text) => text
            .parse::<usize>()
            .map(Some)
            .map_err(|_| validation(format!("WHITELASSO_THREADS is not a number: `{text}`"))),
        Err(_) => Ok(None),
    }
}

pub fn run(args: McRunArgs) -> CliResult<()> {
    let file_config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let merged = file_config.merged_with(args.as_overrides()?);
    let (scenario, threads, results_path, dump_path) = merged.into_scenario()?;
    scenario.validate()?;

    let results_path = results_path
        .ok_or_else(|| validation("no results path: pass -o/--out or set `results` in the config"))?;
    require_writable(&results_path)?;
    if let Some(path) = &dump_path {
        require_writable(path)?;
    }

    let threads = match threads {
        Some(t) => Some(t),
        None => env_threads()?,
    };

    let progress = |done: usize, total: usize| {
        eprintln!("cell {done}/{total} complete");
    };
    let result = match threads {
        Some(t) if t > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| runtime(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run_scenario_with_progress(&scenario, Some(&progress)))?
        }
        _ => run_scenario_with_progress(&scenario, Some(&progress))?,
    };

    for failure in &result.failures {
        eprintln!("replication failed: {failure}");
    }
    std::fs::write(&results_path, results_csv(&result.rows))
        .map_err(|e| runtime(format!("cannot write {}: {e}", results_path.display())))?;
    if let Some(path) = &dump_path {
        std::fs::write(path, records_csv(&result.records))
            .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
