use std::path::PathBuf;

use clap::Args;
use ndarray::{Array1, Array2};
use whitelasso_core::solver::{
    fit_fgls_lasso, fit_gls_lasso, fit_lasso, EstimatorKind, LassoFit, SolverConfig,
};
use whitelasso_core::tuning::{
    cv_two_fold, default_grid, lambda_fgls_theoretical, lambda_lasso_theoretical,
    TheoryConstants, DEFAULT_GRID_LEN,
};
use whitelasso_core::whiten::{ArFitResult, WhiteningOperator};

use crate::errors::{require_input, require_writable, validation, CliResult};
use crate::io::read_dataset_csv;

/// Fit one estimator on a dataset CSV and write the coefficients.
#[derive(Debug, Args)]
pub struct FitArgs {
    /// Dataset CSV with header `y,x1..xp`.
    pub data: PathBuf,
    /// Estimator: lasso | gls | fgls.
    #[arg(long, default_value = "lasso")]
    pub estimator: String,
    /// Known AR(1) coefficient (gls only).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Fixed penalty level.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Tune the penalty by temporal 2-fold cross-validation (default).
    #[arg(long)]
    pub cv: bool,
    /// Use the closed-form theoretical penalty.
    #[arg(long = "lambda-theory")]
    pub lambda_theory: bool,
    /// Cross-validation grid length.
    #[arg(long = "grid-len", default_value_t = DEFAULT_GRID_LEN)]
    pub grid_len: usize,
    /// Probability exponent for the theoretical penalty.
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    #[arg(long = "theory-c", default_value_t = 1.0)]
    pub theory_c: f64,
    #[arg(long = "theory-k", default_value_t = 1.0)]
    pub theory_k: f64,
    #[arg(long = "c-prop3", default_value_t = 1.0)]
    pub c_prop3: f64,
    /// Sparsity used by the theoretical FGLS penalty; defaults to floor(p/10).
    #[arg(long = "theory-s")]
    pub theory_s: Option<usize>,
    /// Output CSV for the fitted coefficients.
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

enum Tuning {
    Cv { grid_len: usize },
    Fixed(f64),
    Theory(TheoryConstants),
}

impl Tuning {
    fn from_args(args: &FitArgs) -> CliResult<Self> {
        let chosen = [args.lambda.is_some(), args.cv, args.lambda_theory]
            .iter()
            .filter(|b| **b)
            .count();
        if chosen > 1 {
            return Err(validation(
                "choose one of --lambda, --cv, --lambda-theory",
            ));
        }
        if let Some(lambda) = args.lambda {
            return Ok(Tuning::Fixed(lambda));
        }
        if args.lambda_theory {
            return Ok(Tuning::Theory(TheoryConstants {
                k: args.theory_k,
                c: args.theory_c,
                tau: args.tau,
                c_prop3: args.c_prop3,
            }));
        }
        Ok(Tuning::Cv {
            grid_len: args.grid_len,
        })
    }
}

fn cv_lambda(x: &Array2<f64>, y: &Array1<f64>, grid_len: usize) -> CliResult<f64> {
    let grid = default_grid(x.view(), y.view(), grid_len)?;
    Ok(cv_two_fold(x.view(), y.view(), &EstimatorKind::Lasso, &grid)?.chosen_lambda)
}

fn write_beta(path: &PathBuf, beta: &Array1<f64>) -> CliResult<()> {
    let mut out = String::from("index,beta\n");
    for (j, v) in beta.iter().enumerate() {
        out.push_str(&format!("{},{}\n", j + 1, v));
    }
    std::fs::write(path, out)
        .map_err(|e| crate::errors::runtime(format!("cannot write {}: {e}", path.display())))
}

fn summary_json(
    estimator: &str,
    lambda: f64,
    lambda_stage1: Option<f64>,
    fit: &LassoFit,
    ar: Option<&ArFitResult>,
    rho_known: Option<f64>,
) -> String {
    let mut fields = vec![
        format!("\"estimator\": \"{estimator}\""),
        format!("\"lambda\": {lambda}"),
    ];
    if let Some(l1) = lambda_stage1 {
        fields.push(format!("\"lambda_stage1\": {l1}"));
    }
    fields.push(format!("\"objective\": {}", fit.objective));
    fields.push(format!("\"sweeps\": {}", fit.sweeps));
    fields.push(format!("\"converged\": {}", fit.converged));
    fields.push(format!("\"kkt_violation\": {}", fit.kkt_violation));
    fields.push(format!(
        "\"nonzero\": {}",
        fit.beta.iter().filter(|v| **v != 0.0).count()
    ));
    if let Some(rho) = rho_known {
        fields.push(format!("\"rho_used\": {rho}"));
    }
    if let Some(ar) = ar {
        fields.push(format!("\"rho_raw\": {}", ar.rho_raw));
        fields.push(format!("\"rho_used\": {}", ar.rho_used));
        fields.push(format!("\"clamped\": {}", ar.clamped));
    }
    format!("{{{}}}", fields.join(", "))
}

pub fn run(args: FitArgs) -> CliResult<()> {
    require_input(&args.data)?;
    require_writable(&args.output)?;
    let tuning = Tuning::from_args(&args)?;
    let (x, y) = read_dataset_csv(&args.data)?;
    let (n, p) = x.dim();

    match args.estimator.as_str() {
        "lasso" => {
            let lambda = match &tuning {
                Tuning::Fixed(v) => *v,
                Tuning::Cv { grid_len } => cv_lambda(&x, &y, *grid_len)?,
                Tuning::Theory(consts) => lambda_lasso_theoretical(
                    consts,
                    n as f64,
                    p as f64,
                    args.rho.unwrap_or(0.0),
                )?,
            };
            let fit = fit_lasso(x.view(), y.view(), &SolverConfig::new(lambda))?;
            write_beta(&args.output, &fit.beta)?;
            println!("{}", summary_json("lasso", lambda, None, &fit, None, None));
        }
        "gls" => {
            let rho = args
                .rho
                .ok_or_else(|| validation("--estimator gls requires --rho"))?;
            let op = WhiteningOperator::new(rho)?;
            let xw = op.apply_matrix(x.view());
            let yw = op.apply(y.view());
            let lambda = match &tuning {
                Tuning::Fixed(v) => *v,
                Tuning::Cv { grid_len } => cv_lambda(&xw, &yw, *grid_len)?,
                Tuning::Theory(consts) => {
                    lambda_lasso_theoretical(consts, n as f64, p as f64, 0.0)?
                }
            };
            let fit = fit_gls_lasso(x.view(), y.view(), rho, &SolverConfig::new(lambda))?;
            write_beta(&args.output, &fit.beta)?;
            println!(
                "{}",
                summary_json("gls", lambda, None, &fit, None, Some(rho))
            );
        }
        "fgls" => {
            let lambda1 = match &tuning {
                Tuning::Fixed(v) => *v,
                Tuning::Cv { grid_len } => cv_lambda(&x, &y, *grid_len)?,
                Tuning::Theory(consts) => lambda_lasso_theoretical(
                    consts,
                    n as f64,
                    p as f64,
                    args.rho.unwrap_or(0.0),
                )?,
            };
            // first stage fixes the AR estimate; the second-stage penalty is
            // then chosen on the whitened data
            let stage1 = fit_lasso(x.view(), y.view(), &SolverConfig::new(lambda1))?;
            let resid = &y - &x.dot(&stage1.beta);
            let ar = whitelasso_core::solver::ar_fit_or_identity(resid.view())?;
            let op = WhiteningOperator::new(ar.rho_used)?;
            let xw = op.apply_matrix(x.view());
            let yw = op.apply(y.view());
            let lambda2 = match &tuning {
                Tuning::Fixed(v) => *v,
                Tuning::Cv { grid_len } => cv_lambda(&xw, &yw, *grid_len)?,
                Tuning::Theory(consts) => {
                    let s = args.theory_s.unwrap_or(p / 10).max(1);
                    lambda_fgls_theoretical(consts, n as f64, p as f64, s as f64, ar.rho_used)?
                }
            };
            let (fit, ar) = fit_fgls_lasso(
                x.view(),
                y.view(),
                &SolverConfig::new(lambda1),
                &SolverConfig::new(lambda2),
            )?;
            write_beta(&args.output, &fit.beta)?;
            println!(
                "{}",
                summary_json("fgls", lambda2, Some(lambda1), &fit, Some(&ar), None)
            );
        }
        other => {
            return Err(validation(format!(
                "unknown estimator `{other}` (expected lasso, gls or fgls)"
            )))
        }
    }
    Ok(())
}
