use clap::Args;
use whitelasso_core::diagnostics::{
    bound_cor3_fgls, bound_prop1, bound_prop3, bound_thm1, kappa_footnote,
    whitener_operator_norm,
};
use whitelasso_core::tuning::TheoryConstants;

use crate::errors::{validation, CliResult};

/// Evaluate theoretical bound formulas over a grid of (n, rho) and print a
/// CSV table.
#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Which bound: prop1 | thm1 | prop3 | cor3 | r-norm.
    #[arg(long)]
    pub bound: String,
    /// Sample sizes, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<f64>,
    /// Error persistence values, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0])]
    pub rho: Vec<f64>,
    #[arg(long, default_value_t = 128.0)]
    pub p: f64,
    /// Sparsity entering the `p^{s tau}` exponents.
    #[arg(long, default_value_t = 12.0)]
    pub s: f64,
    /// Restricted-eigenvalue constant (prop1).
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Derive kappa from the eigenvalue formula instead of --kappa.
    #[arg(long = "kappa-footnote")]
    pub kappa_footnote: bool,
    #[arg(long = "eta-min", default_value_t = 1.0)]
    pub eta_min: f64,
    #[arg(long = "sigma-max", default_value_t = 1.0)]
    pub sigma_max: f64,
    /// Cone opening used by the kappa formula.
    #[arg(long, default_value_t = 3.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    #[arg(long = "theory-c", default_value_t = 1.0)]
    pub theory_c: f64,
    #[arg(long = "theory-k", default_value_t = 1.0)]
    pub theory_k: f64,
    #[arg(long = "c-prop3", default_value_t = 1.0)]
    pub c_prop3: f64,
    /// Penalty level entering the oracle bound (thm1).
    #[arg(long = "lambda-t", default_value_t = 0.1)]
    pub lambda_t: f64,
    #[arg(long = "kappa-t", default_value_t = 1.0)]
    pub kappa_t: f64,
    /// Candidate support size (thm1).
    #[arg(long = "s-size", default_value_t = 12)]
    pub s_size: usize,
    /// Off-support l1 mass of the true coefficients (thm1).
    #[arg(long = "tail-l1", default_value_t = 0.0)]
    pub tail_l1: f64,
}

pub fn run(args: BoundsArgs) -> CliResult<()> {
    let consts = TheoryConstants {
        k: args.theory_k,
        c: args.theory_c,
        tau: args.tau,
        c_prop3: args.c_prop3,
    };
    consts.validate()?;

    println!("bound,n,rho,value,note");
    for &n in &args.n {
        for &rho in &args.rho {
            let (value, note): (Option<f64>, String) = match args.bound.as_str() {
                "prop1" => {
                    let kappa = if args.kappa_footnote {
                        kappa_footnote(args.eta_min, args.sigma_max, args.p, n, args.alpha, args.s)
                    } else {
                        args.kappa
                    };
                    if kappa <= 0.0 {
                        (None, "vacuous (kappa <= 0)".to_string())
                    } else {
                        let report = bound_prop1(&consts, kappa, n, args.p, args.s, rho)?;
                        (Some(report.value), String::new())
                    }
                }
                "thm1" => {
                    let report = bound_thm1(
                        args.lambda_t,
                        args.kappa_t,
                        args.s_size,
                        args.tail_l1,
                        args.sigma_max,
                        n,
                        args.p,
                    )?;
                    (Some(report.value), String::new())
                }
                "prop3" => {
                    let report = bound_prop3(&consts, n, args.p, args.s)?;
                    (Some(report.value), String::new())
                }
                "cor3" => {
                    let report =
                        bound_cor3_fgls(&consts, args.eta_min, n, args.p, args.s, rho)?;
                    (Some(report.value), String::new())
                }
                "r-norm" => {
                    if n < 1.0 || n.fract() != 0.0 {
                        return Err(validation("r-norm needs integer n"));
                    }
                    (Some(whitener_operator_norm(rho, n as usize)?), String::new())
                }
                other => {
                    return Err(validation(format!(
                        "unknown bound `{other}` (expected prop1, thm1, prop3, cor3 or r-norm)"
                    )))
                }
            };
            let value_text = value.map(|v| v.to_string()).unwrap_or_else(|| "nan".to_string());
            println!("{},{},{},{},{}", args.bound, n, rho, value_text, note);
        }
    }
    Ok(())
}
