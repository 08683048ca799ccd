//! Study configuration file for `mc-run`. Every key has a CLI flag
//! equivalent; flags override file values. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use whitelasso_core::datagen::{DesignCov, InitMode};
use whitelasso_core::mc::{
    DgpTemplate, Scenario, ScenarioEstimator, SparsityRule, TuningMode, DEFAULT_MC_GRID_LEN,
};
use whitelasso_core::tuning::TheoryConstants;

use crate::errors::{validation, CliResult};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<Vec<usize>>,
    pub p: Option<Vec<usize>>,
    pub rho: Option<Vec<f64>>,
    pub estimators: Option<Vec<String>>,
    pub replications: Option<usize>,
    pub base_seed: Option<u64>,
    pub sigma_u: Option<f64>,
    pub s: Option<usize>,
    pub beta_magnitude: Option<f64>,
    pub init: Option<String>,
    pub init_variance: Option<f64>,
    pub design: Option<String>,
    pub design_diagonal: Option<Vec<f64>>,
    pub tuning: Option<String>,
    pub lambda: Option<f64>,
    pub grid_len: Option<usize>,
    pub tau: Option<f64>,
    pub theory_c: Option<f64>,
    pub theory_k: Option<f64>,
    pub c_prop3: Option<f64>,
    pub threads: Option<usize>,
    pub results: Option<PathBuf>,
    pub dump_reps: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| validation(format!("{}: {e}", path.display())))
    }

    /// Overlay `overrides` (CLI flags) on top of this file config.
    pub fn merged_with(mut self, overrides: RunConfig) -> Self {
        macro_rules! take {
            ($field:ident) => {
                if overrides.$field.is_some() {
                    self.$field = overrides.$field;
                }
            };
        }
        take!(n);
        take!(p);
        take!(rho);
        take!(estimators);
        take!(replications);
        take!(base_seed);
        take!(sigma_u);
        take!(s);
        take!(beta_magnitude);
        take!(init);
        take!(init_variance);
        take!(design);
        take!(design_diagonal);
        take!(tuning);
        take!(lambda);
        take!(grid_len);
        take!(tau);
        take!(theory_c);
        take!(theory_k);
        take!(c_prop3);
        take!(threads);
        take!(results);
        take!(dump_reps);
        self
    }

    pub fn into_scenario(self) -> CliResult<(Scenario, Option<usize>, Option<PathBuf>, Option<PathBuf>)> {
        let estimators = match &self.estimators {
            None => vec![
                ScenarioEstimator::Lasso,
                ScenarioEstimator::Gls,
                ScenarioEstimator::Fgls,
            ],
            Some(names) => {
                let mut parsed = Vec::new();
                for name in names {
                    parsed.push(parse_estimator(name)?);
                }
                parsed
            }
        };

        let init_mode = match self.init.as_deref() {
            None | Some("stationary") => InitMode::Stationary,
            Some("fixed") => {
                let v1 = self.init_variance.ok_or_else(|| {
                    validation("init = \"fixed\" requires init_variance")
                })?;
                InitMode::FixedVariance(v1)
            }
            Some(other) => {
                return Err(validation(format!(
                    "unknown init `{other}` (expected stationary or fixed)"
                )))
            }
        };

        let design_cov = match self.design.as_deref() {
            None | Some("identity") => DesignCov::Identity,
            Some("diagonal") => {
                let values = self.design_diagonal.clone().ok_or_else(|| {
                    validation("design = \"diagonal\" requires design_diagonal")
                })?;
                DesignCov::Diagonal(values)
            }
            Some(other) => {
                return Err(validation(format!(
                    "unknown design `{other}` (expected identity or diagonal)"
                )))
            }
        };

        let s_rule = match self.s {
            None => SparsityRule::FloorPOverTen,
            Some(s) => SparsityRule::Fixed(s),
        };

        let tuning = match self.tuning.as_deref() {
            None | Some("cv") => TuningMode::CrossValidation {
                grid_len: self.grid_len.unwrap_or(DEFAULT_MC_GRID_LEN),
            },
            Some("fixed") => {
                let lambda = self
                    .lambda
                    .ok_or_else(|| validation("tuning = \"fixed\" requires lambda"))?;
                TuningMode::FixedLambda(lambda)
            }
            Some("theory") => {
                let defaults = TheoryConstants::default();
                TuningMode::Theory(TheoryConstants {
                    k: self.theory_k.unwrap_or(defaults.k),
                    c: self.theory_c.unwrap_or(defaults.c),
                    tau: self.tau.unwrap_or(defaults.tau),
                    c_prop3: self.c_prop3.unwrap_or(defaults.c_prop3),
                })
            }
            Some(other) => {
                return Err(validation(format!(
                    "unknown tuning `{other}` (expected cv, fixed or theory)"
                )))
            }
        };

        let scenario = Scenario {
            n_values: self
                .n
                .unwrap_or_else(|| (1..=10).map(|k| k * 50).collect()),
            p_values: self.p.unwrap_or_else(|| vec![128]),
            rho_values: self.rho.unwrap_or_else(|| vec![0.0, 0.5, 0.9, 0.99]),
            estimators,
            replications: self.replications.unwrap_or(200),
            base_seed: self.base_seed.unwrap_or(0),
            dgp: DgpTemplate {
                s_rule,
                sigma_u: self.sigma_u.unwrap_or(1.0),
                init_mode,
                design_cov,
                beta_magnitude: self.beta_magnitude.unwrap_or(1.0),
            },
            tuning,
        };
        Ok((scenario, self.threads, self.results, self.dump_reps))
    }
}

pub fn parse_estimator(name: &str) -> CliResult<ScenarioEstimator> {
    match name {
        "lasso" => Ok(ScenarioEstimator::Lasso),
        "gls" => Ok(ScenarioEstimator::Gls),
        "fgls" => Ok(ScenarioEstimator::Fgls),
        other => Err(validation(format!(
            "unknown estimator `{other}` (expected lasso, gls or fgls)"
        ))),
    }
}
