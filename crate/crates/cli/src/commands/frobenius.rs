use std::path::PathBuf;

use clap::Args;
use whitelasso_core::datagen::InitMode;
use whitelasso_core::diagnostics::psi_frobenius_growth;

use crate::errors::{require_writable, runtime, validation, CliResult};

/// Emit cumulative error-variance curves as CSV, one column per
/// (rho, initialization) combination.
#[derive(Debug, Args)]
pub struct FrobeniusArgs {
    /// Persistence values, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub rho: Vec<f64>,
    /// Series length.
    #[arg(long)]
    pub n: usize,
    #[arg(long = "sigma-u", default_value_t = 1.0)]
    pub sigma_u: f64,
    /// Initializations: `stationary` or `fixed:<variance>`, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![String::from("stationary")])]
    pub init: Vec<String>,
    /// Output CSV path; stdout when omitted.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

fn parse_init_spec(spec: &str) -> CliResult<(InitMode, String)> {
    if spec == "stationary" {
        return Ok((InitMode::Stationary, "stationary".to_string()));
    }
    if let Some(rest) = spec.strip_prefix("fixed:") {
        let v1: f64 = rest
            .parse()
            .map_err(|_| validation(format!("cannot parse initial variance `{rest}`")))?;
        return Ok((InitMode::FixedVariance(v1), format!("fixed{rest}")));
    }
    Err(validation(format!(
        "unknown init `{spec}` (expected stationary or fixed:<variance>)"
    )))
}

pub fn run(args: FrobeniusArgs) -> CliResult<()> {
    if let Some(path) = &args.output {
        require_writable(path)?;
    }
    let mut columns = Vec::new();
    let mut header = String::from("t");
    for &rho in &args.rho {
        for spec in &args.init {
            let (init, label) = parse_init_spec(spec)?;
            let curve = psi_frobenius_growth(args.n, rho, args.sigma_u, init)?;
            header.push_str(&format!(",f_rho{rho}_{label}"));
            columns.push(curve);
        }
    }
    let mut out = header;
    out.push('\n');
    for t in 0..args.n {
        out.push_str(&format!("{}", t + 1));
        for col in &columns {
            out.push_str(&format!(",{}", col[t]));
        }
        out.push('\n');
    }
    match &args.output {
        Some(path) => std::fs::write(path, out)
            .map_err(|e| runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}
