//! Seeded Monte Carlo study: replications over grids of sample size,
//! dimension, error persistence and estimator, with deterministic
//! aggregation no matter how the work is scheduled.
//!
//! Every replication owns a substream whose seed packs the tuple
//! (base seed, n, p, rho index, estimator index, replication index) into the
//! generator seed bytes, so streams never collide and results are identical
//! across thread counts.

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::datagen::{simulate_dataset_with_rng, DesignCov, DgpConfig, InitMode};
use crate::diagnostics::{estimation_errors, sign_recovered, ErrorReport};
use crate::error::{invalid, Result};
use crate::solver::{ar_fit_or_identity, fit_lasso, EstimatorKind, SolverConfig};
use crate::tuning::{
    cv_two_fold, default_grid, lambda_fgls_theoretical, lambda_lasso_theoretical,
    TheoryConstants,
};
use crate::whiten::{ArFitResult, WhiteningOperator};

/// Estimator arm of a study cell. The GLS arm whitens with the cell's own
/// error persistence, which is what a known-correlation benchmark means on
/// a grid of persistence values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioEstimator {
    Lasso,
    Gls,
    Fgls,
}

impl ScenarioEstimator {
    pub fn label(&self) -> &'static str {
        match self {
            ScenarioEstimator::Lasso => "lasso",
            ScenarioEstimator::Gls => "gls",
            ScenarioEstimator::Fgls => "fgls",
        }
    }
}

/// How the sparsity of the true coefficient vector scales with dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsityRule {
    /// `s = floor(p / 10)`.
    FloorPOverTen,
    Fixed(usize),
}

impl SparsityRule {
    pub fn sparsity_for(&self, p: usize) -> usize {
        match self {
            SparsityRule::FloorPOverTen => p / 10,
            SparsityRule::Fixed(s) => *s,
        }
    }
}

/// Data-generating template shared by every cell of a scenario; the cell
/// supplies n, p and rho.
#[derive(Debug, Clone, PartialEq)]
pub struct DgpTemplate {
    pub s_rule: SparsityRule,
    pub sigma_u: f64,
    pub init_mode: InitMode,
    pub design_cov: DesignCov,
    pub beta_magnitude: f64,
}

impl Default for DgpTemplate {
    fn default() -> Self {
        Self {
            s_rule: SparsityRule::FloorPOverTen,
            sigma_u: 1.0,
            init_mode: InitMode::Stationary,
            design_cov: DesignCov::Identity,
            beta_magnitude: 1.0,
        }
    }
}

impl DgpTemplate {
    fn config_for(&self, n: usize, p: usize, rho: f64) -> DgpConfig {
        DgpConfig {
            n,
            p,
            s: self.s_rule.sparsity_for(p),
            rho,
            sigma_u: self.sigma_u,
            init_mode: self.init_mode,
            design_cov: self.design_cov.clone(),
            beta_magnitude: self.beta_magnitude,
            seed: 0, // replications draw from their own substream
        }
    }
}

/// Default cross-validation grid length at desk scale.
pub const DEFAULT_MC_GRID_LEN: usize = 20;

/// How each replication chooses its penalty.
#[derive(Debug, Clone, PartialEq)]
pub enum TuningMode {
    /// Temporal 2-fold cross-validation on a log-spaced grid; the second
    /// stage of FGLS re-tunes on the whitened data.
    CrossValidation { grid_len: usize },
    /// One penalty for every stage.
    FixedLambda(f64),
    /// Closed-form choices from the theory, with the cell's persistence for
    /// the raw-data fits and the estimated coefficient for the FGLS second
    /// stage.
    Theory(TheoryConstants),
}

impl Default for TuningMode {
    fn default() -> Self {
        TuningMode::CrossValidation {
            grid_len: DEFAULT_MC_GRID_LEN,
        }
    }
}

/// Full study specification.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n_values: Vec<usize>,
    pub p_values: Vec<usize>,
    pub rho_values: Vec<f64>,
    pub estimators: Vec<ScenarioEstimator>,
    pub replications: usize,
    pub base_seed: u64,
    pub dgp: DgpTemplate,
    pub tuning: TuningMode,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty()
            || self.p_values.is_empty()
            || self.rho_values.is_empty()
            || self.estimators.is_empty()
        {
            return Err(invalid("every scenario grid must be non-empty"));
        }
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1"));
        }
        let min_n = if matches!(self.tuning, TuningMode::CrossValidation { .. }) {
            4
        } else {
            2
        };
        if self.n_values.iter().any(|n| *n < min_n) {
            return Err(invalid(format!("every n must be at least {min_n}")));
        }
        if self.rho_values.iter().any(|r| !r.is_finite() || r.abs() >= 1.0) {
            return Err(invalid("every rho must lie in (-1,1)"));
        }
        if let TuningMode::CrossValidation { grid_len } = self.tuning {
            if grid_len < 2 {
                return Err(invalid("grid length must be at least 2"));
            }
        }
        if let TuningMode::FixedLambda(lambda) = self.tuning {
            if !(lambda >= 0.0) || !lambda.is_finite() {
                return Err(invalid("fixed lambda must be non-negative and finite"));
            }
        }
        if let TuningMode::Theory(consts) = &self.tuning {
            consts.validate()?;
        }
        for &p in &self.p_values {
            let probe = self.dgp.config_for(*self.n_values.iter().max().unwrap(), p, 0.0);
            probe.validate()?;
        }
        Ok(())
    }
}

/// One cell of the study grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub estimator: ScenarioEstimator,
    pub n: usize,
    pub p: usize,
    pub rho: f64,
}

/// Outcome of a single replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RepRecord {
    pub cell: Cell,
    pub rep: usize,
    pub errors: ErrorReport,
    pub sign: bool,
    /// AR(1) fit from the FGLS pipeline; absent for the other arms.
    pub rho_hat: Option<ArFitResult>,
}

/// Aggregated statistics for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: Cell,
    pub mean_l1: f64,
    pub mean_l2_scaled: f64,
    pub mean_linf: f64,
    /// Empirical 2.5% quantile of the scaled l2 error.
    pub ci_lo_l2: f64,
    /// Empirical 97.5% quantile of the scaled l2 error.
    pub ci_hi_l2: f64,
    pub sign_rate: f64,
    pub mean_rho_hat: Option<f64>,
    pub mean_abs_rho_err: Option<f64>,
    pub replications_completed: usize,
}

/// Study output: per-cell aggregates plus the raw per-replication records
/// they were reduced from.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub rows: Vec<CellSummary>,
    pub records: Vec<RepRecord>,
    /// One message per failed replication, in deterministic order.
    pub failures: Vec<String>,
}

/// Linear-interpolated order statistic at rank `q * (m - 1)`.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(invalid("percentile of an empty sequence"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid("q must lie in [0,1]"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Seed bytes for one replication: an injective packing of the coordinate
/// tuple, so distinct replications can never share a stream.
pub fn replication_seed(
    base_seed: u64,
    n: usize,
    p: usize,
    rho_index: usize,
    estimator_index: usize,
    rep_index: usize,
) -> [u8; 32] {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&base_seed.to_le_bytes());
    seed[8..12].copy_from_slice(&(n as u32).to_le_bytes());
    seed[12..16].copy_from_slice(&(p as u32).to_le_bytes());
    seed[16..20].copy_from_slice(&(rho_index as u32).to_le_bytes());
    seed[20..24].copy_from_slice(&(estimator_index as u32).to_le_bytes());
    seed[24..32].copy_from_slice(&(rep_index as u64).to_le_bytes());
    seed
}

/// The substream owned by one replication.
pub fn replication_rng(
    base_seed: u64,
    n: usize,
    p: usize,
    rho_index: usize,
    estimator_index: usize,
    rep_index: usize,
) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(replication_seed(
        base_seed,
        n,
        p,
        rho_index,
        estimator_index,
        rep_index,
    ))
}

fn cv_lambda(x: &Array2<f64>, y: &Array1<f64>, grid_len: usize) -> Result<f64> {
    let grid = default_grid(x.view(), y.view(), grid_len)?;
    Ok(cv_two_fold(x.view(), y.view(), &EstimatorKind::Lasso, &grid)?.chosen_lambda)
}

/// Simulate one dataset from the supplied substream, tune the penalty, fit
/// the cell's estimator and score it against the true coefficients.
pub fn run_replication(
    cell: &Cell,
    dgp: &DgpTemplate,
    tuning: &TuningMode,
    rep: usize,
    rng: &mut ChaCha8Rng,
) -> Result<RepRecord> {
    let config = dgp.config_for(cell.n, cell.p, cell.rho);
    let data = simulate_dataset_with_rng(&config, rng)?;

    let (beta, rho_hat) = match cell.estimator {
        ScenarioEstimator::Lasso => {
            let lambda = match tuning {
                TuningMode::FixedLambda(v) => *v,
                TuningMode::CrossValidation { grid_len } => {
                    cv_lambda(&data.x, &data.y, *grid_len)?
                }
                TuningMode::Theory(consts) => lambda_lasso_theoretical(
                    consts,
                    cell.n as f64,
                    cell.p as f64,
                    cell.rho,
                )?,
            };
            let fit = fit_lasso(data.x.view(), data.y.view(), &SolverConfig::new(lambda))?;
            (fit.beta, None)
        }
        ScenarioEstimator::Gls => {
            let op = WhiteningOperator::new(cell.rho)?;
            let xw = op.apply_matrix(data.x.view());
            let yw = op.apply(data.y.view());
            let lambda = match tuning {
                TuningMode::FixedLambda(v) => *v,
                TuningMode::CrossValidation { grid_len } => cv_lambda(&xw, &yw, *grid_len)?,
                TuningMode::Theory(consts) => {
                    // whitened errors are uncorrelated, so the choice at rho = 0
                    lambda_lasso_theoretical(consts, cell.n as f64, cell.p as f64, 0.0)?
                }
            };
            let fit = fit_lasso(xw.view(), yw.view(), &SolverConfig::new(lambda))?;
            (fit.beta, None)
        }
        ScenarioEstimator::Fgls => {
            let lambda1 = match tuning {
                TuningMode::FixedLambda(v) => *v,
                TuningMode::CrossValidation { grid_len } => {
                    cv_lambda(&data.x, &data.y, *grid_len)?
                }
                TuningMode::Theory(consts) => lambda_lasso_theoretical(
                    consts,
                    cell.n as f64,
                    cell.p as f64,
                    cell.rho,
                )?,
            };
            let stage1 = fit_lasso(data.x.view(), data.y.view(), &SolverConfig::new(lambda1))?;
            let resid = &data.y - &data.x.dot(&stage1.beta);
            let ar = ar_fit_or_identity(resid.view())?;
            let op = WhiteningOperator::new(ar.rho_used)?;
            let xw = op.apply_matrix(data.x.view());
            let yw = op.apply(data.y.view());
            let lambda2 = match tuning {
                TuningMode::FixedLambda(v) => *v,
                TuningMode::CrossValidation { grid_len } => cv_lambda(&xw, &yw, *grid_len)?,
                TuningMode::Theory(consts) => lambda_fgls_theoretical(
                    consts,
                    cell.n as f64,
                    cell.p as f64,
                    config.s.max(1) as f64,
                    ar.rho_used,
                )?,
            };
            let fit = fit_lasso(xw.view(), yw.view(), &SolverConfig::new(lambda2))?;
            (fit.beta, Some(ar))
        }
    };

    let errors = estimation_errors(beta.view(), data.beta0.view())?;
    let sign = sign_recovered(beta.view(), data.beta0.view())?;
    Ok(RepRecord {
        cell: *cell,
        rep,
        errors,
        sign,
        rho_hat,
    })
}

fn summarize_cell(cell: Cell, completed: &[&RepRecord]) -> CellSummary {
    let m = completed.len();
    if m == 0 {
        return CellSummary {
            cell,
            mean_l1: f64::NAN,
            mean_l2_scaled: f64::NAN,
            mean_linf: f64::NAN,
            ci_lo_l2: f64::NAN,
            ci_hi_l2: f64::NAN,
            sign_rate: f64::NAN,
            mean_rho_hat: None,
            mean_abs_rho_err: None,
            replications_completed: 0,
        };
    }
    let mf = m as f64;
    let mean_l1 = completed.iter().map(|r| r.errors.l1).sum::<f64>() / mf;
    let mean_l2_scaled = completed.iter().map(|r| r.errors.l2_scaled).sum::<f64>() / mf;
    let mean_linf = completed.iter().map(|r| r.errors.linf).sum::<f64>() / mf;
    let l2_values: Vec<f64> = completed.iter().map(|r| r.errors.l2_scaled).collect();
    let ci_lo_l2 = percentile(&l2_values, 0.025).expect("non-empty");
    let ci_hi_l2 = percentile(&l2_values, 0.975).expect("non-empty");
    let sign_rate = completed.iter().filter(|r| r.sign).count() as f64 / mf;
    let (mean_rho_hat, mean_abs_rho_err) = if cell.estimator == ScenarioEstimator::Fgls {
        let fits: Vec<&ArFitResult> = completed.iter().filter_map(|r| r.rho_hat.as_ref()).collect();
        if fits.is_empty() {
            (None, None)
        } else {
            let k = fits.len() as f64;
            let mean = fits.iter().map(|a| a.rho_used).sum::<f64>() / k;
            let abs_err = fits
                .iter()
                .map(|a| (a.rho_used - cell.rho).abs())
                .sum::<f64>()
                / k;
            (Some(mean), Some(abs_err))
        }
    } else {
        (None, None)
    };
    CellSummary {
        cell,
        mean_l1,
        mean_l2_scaled,
        mean_linf,
        ci_lo_l2,
        ci_hi_l2,
        sign_rate,
        mean_rho_hat,
        mean_abs_rho_err,
        replications_completed: m,
    }
}

/// Run the full grid. Cells execute in a fixed order; replications within a
/// cell run in parallel on the ambient thread pool, and the aggregation
/// folds them in replication order, so the output is byte-identical across
/// thread counts.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioResult> {
    run_scenario_with_progress(scenario, None)
}

pub fn run_scenario_with_progress(
    scenario: &Scenario,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<ScenarioResult> {
    scenario.validate()?;
    let mut cells = Vec::new();
    for (est_idx, est) in scenario.estimators.iter().enumerate() {
        for &n in &scenario.n_values {
            for &p in &scenario.p_values {
                for (rho_idx, &rho) in scenario.rho_values.iter().enumerate() {
                    cells.push((
                        est_idx,
                        rho_idx,
                        Cell {
                            estimator: *est,
                            n,
                            p,
                            rho,
                        },
                    ));
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(cells.len());
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let total = cells.len();
    for (done, (est_idx, rho_idx, cell)) in cells.into_iter().enumerate() {
        let outcomes: Vec<Result<RepRecord>> = (0..scenario.replications)
            .into_par_iter()
            .map(|rep| {
                let mut rng = replication_rng(
                    scenario.base_seed,
                    cell.n,
                    cell.p,
                    rho_idx,
                    est_idx,
                    rep,
                );
                run_replication(&cell, &scenario.dgp, &scenario.tuning, rep, &mut rng)
            })
            .collect();

        let mut completed = Vec::with_capacity(outcomes.len());
        for (rep, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(record) => {
                    records.push(record);
                    completed.push(records.len() - 1);
                }
                Err(e) => failures.push(format!(
                    "{} n={} p={} rho={} rep={}: {}",
                    cell.estimator.label(),
                    cell.n,
                    cell.p,
                    cell.rho,
                    rep,
                    e
                )),
            }
        }
        let refs: Vec<&RepRecord> = completed.iter().map(|&i| &records[i]).collect();
        rows.push(summarize_cell(cell, &refs));
        if let Some(cb) = progress {
            cb(done + 1, total);
        }
    }
    Ok(ScenarioResult {
        rows,
        records,
        failures,
    })
}

pub const RESULTS_HEADER: &str = "estimator,n,p,rho,mean_l1,mean_l2_scaled,mean_linf,ci_lo_l2,ci_hi_l2,sign_rate,mean_rho_hat,mean_abs_rho_err,reps";

pub const RECORDS_HEADER: &str = "estimator,n,p,rho,rep,l1,l2_scaled,linf,sign,rho_hat";

fn fmt_stat(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Aggregated results as CSV, one row per cell, LF newlines.
pub fn results_csv(rows: &[CellSummary]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.cell.estimator.label(),
            row.cell.n,
            row.cell.p,
            row.cell.rho,
            fmt_stat(row.mean_l1),
            fmt_stat(row.mean_l2_scaled),
            fmt_stat(row.mean_linf),
            fmt_stat(row.ci_lo_l2),
            fmt_stat(row.ci_hi_l2),
            fmt_stat(row.sign_rate),
            fmt_opt(row.mean_rho_hat),
            fmt_opt(row.mean_abs_rho_err),
            row.replications_completed,
        ));
    }
    out
}

/// Per-replication dump as CSV.
pub fn records_csv(records: &[RepRecord]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.cell.estimator.label(),
            r.cell.n,
            r.cell.p,
            r.cell.rho,
            r.rep,
            r.errors.l1,
            r.errors.l2_scaled,
            r.errors.linf,
            u8::from(r.sign),
            r.rho_hat.map(|a| format!("{}", a.rho_used)).unwrap_or_default(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_scenario() -> Scenario {
        Scenario {
            n_values: vec![40],
            p_values: vec![10],
            rho_values: vec![0.0, 0.5],
            estimators: vec![
                ScenarioEstimator::Lasso,
                ScenarioEstimator::Gls,
                ScenarioEstimator::Fgls,
            ],
            replications: 4,
            base_seed: 99,
            dgp: DgpTemplate::default(),
            tuning: TuningMode::CrossValidation { grid_len: 5 },
        }
    }

    #[test]
    fn percentile_examples() {
        assert_eq!(percentile(&[5.0], 0.0).unwrap(), 5.0);
        assert_eq!(percentile(&[5.0], 1.0).unwrap(), 5.0);
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap(), 2.5);
        let values: Vec<f64> = (1..=100).map(|v| v as f64).collect();
        let q = percentile(&values, 0.975).unwrap();
        assert!((q - 97.525).abs() < 1e-12, "{q}");
        assert!(percentile(&[], 0.5).is_err());
        assert!(percentile(&[1.0], 1.5).is_err());
    }

    #[test]
    fn replication_seeds_are_distinct() {
        let a = replication_seed(1, 50, 10, 0, 0, 3);
        let b = replication_seed(1, 50, 10, 0, 1, 3);
        let c = replication_seed(1, 50, 10, 1, 0, 3);
        let d = replication_seed(1, 50, 10, 0, 0, 4);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn replication_is_deterministic() {
        let cell = Cell {
            estimator: ScenarioEstimator::Fgls,
            n: 40,
            p: 10,
            rho: 0.5,
        };
        let dgp = DgpTemplate::default();
        let tuning = TuningMode::CrossValidation { grid_len: 5 };
        let mut rng1 = replication_rng(7, 40, 10, 0, 0, 0);
        let mut rng2 = replication_rng(7, 40, 10, 0, 0, 0);
        let a = run_replication(&cell, &dgp, &tuning, 0, &mut rng1).unwrap();
        let b = run_replication(&cell, &dgp, &tuning, 0, &mut rng2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lasso_and_gls_agree_at_zero_rho_on_shared_seed() {
        let dgp = DgpTemplate::default();
        let tuning = TuningMode::CrossValidation { grid_len: 5 };
        let lasso_cell = Cell {
            estimator: ScenarioEstimator::Lasso,
            n: 40,
            p: 10,
            rho: 0.0,
        };
        let gls_cell = Cell {
            estimator: ScenarioEstimator::Gls,
            ..lasso_cell
        };
        let mut rng1 = replication_rng(11, 40, 10, 0, 0, 0);
        let mut rng2 = replication_rng(11, 40, 10, 0, 0, 0);
        let a = run_replication(&lasso_cell, &dgp, &tuning, 0, &mut rng1).unwrap();
        let b = run_replication(&gls_cell, &dgp, &tuning, 0, &mut rng2).unwrap();
        assert_eq!(a.errors, b.errors);
        assert_eq!(a.sign, b.sign);
    }

    #[test]
    fn single_replication_aggregates_to_itself() {
        let mut scenario = tiny_scenario();
        scenario.replications = 1;
        scenario.estimators = vec![ScenarioEstimator::Lasso];
        scenario.rho_values = vec![0.0];
        let result = run_scenario(&scenario).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.records.len(), 1);
        let row = &result.rows[0];
        let rec = &result.records[0];
        assert_eq!(row.mean_l2_scaled, rec.errors.l2_scaled);
        assert_eq!(row.ci_lo_l2, rec.errors.l2_scaled);
        assert_eq!(row.ci_hi_l2, rec.errors.l2_scaled);
        assert_eq!(row.replications_completed, 1);
    }

    #[test]
    fn zero_signal_with_huge_penalty_recovers_sign() {
        let scenario = Scenario {
            n_values: vec![30],
            p_values: vec![10],
            rho_values: vec![0.5],
            estimators: vec![ScenarioEstimator::Lasso],
            replications: 8,
            base_seed: 3,
            dgp: DgpTemplate {
                s_rule: SparsityRule::Fixed(0),
                ..DgpTemplate::default()
            },
            tuning: TuningMode::FixedLambda(1e9),
        };
        let result = run_scenario(&scenario).unwrap();
        assert_eq!(result.rows[0].sign_rate, 1.0);
    }

    #[test]
    fn sign_rate_is_exact_fraction() {
        let result = run_scenario(&tiny_scenario()).unwrap();
        for row in &result.rows {
            let matching: Vec<&RepRecord> = result
                .records
                .iter()
                .filter(|r| r.cell == row.cell)
                .collect();
            assert_eq!(matching.len(), row.replications_completed);
            let count = matching.iter().filter(|r| r.sign).count();
            assert_eq!(row.sign_rate, count as f64 / matching.len() as f64);
        }
    }

    #[test]
    fn aggregates_recomputable_from_records() {
        let result = run_scenario(&tiny_scenario()).unwrap();
        for row in &result.rows {
            let matching: Vec<&RepRecord> = result
                .records
                .iter()
                .filter(|r| r.cell == row.cell)
                .collect();
            let m = matching.len() as f64;
            let mean_l1 = matching.iter().map(|r| r.errors.l1).sum::<f64>() / m;
            assert!((mean_l1 - row.mean_l1).abs() <= 1e-12 * mean_l1.abs().max(1.0));
            let mean_l2 = matching.iter().map(|r| r.errors.l2_scaled).sum::<f64>() / m;
            assert!((mean_l2 - row.mean_l2_scaled).abs() <= 1e-12 * mean_l2.abs().max(1.0));
            assert!(row.ci_lo_l2 <= row.ci_hi_l2);
            assert!((0.0..=1.0).contains(&row.sign_rate));
            if row.cell.estimator == ScenarioEstimator::Fgls {
                assert!(row.mean_rho_hat.is_some());
                assert!(row.mean_abs_rho_err.is_some());
            } else {
                assert!(row.mean_rho_hat.is_none());
            }
        }
    }

    #[test]
    fn scenario_output_identical_across_thread_counts() {
        let scenario = tiny_scenario();
        let mut outputs = Vec::new();
        for threads in [1usize, 2, 4] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let result = pool.install(|| run_scenario(&scenario)).unwrap();
            outputs.push(results_csv(&result.rows) + &records_csv(&result.records));
        }
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[0], outputs[2]);
    }

    #[test]
    fn csv_row_count_matches_grid() {
        let result = run_scenario(&tiny_scenario()).unwrap();
        let csv = results_csv(&result.rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], RESULTS_HEADER);
        assert_eq!(lines.len() - 1, 1 * 1 * 2 * 3);
    }

    #[test]
    fn scenario_validation() {
        let mut s = tiny_scenario();
        s.replications = 0;
        assert!(s.validate().is_err());
        let mut s = tiny_scenario();
        s.rho_values = vec![1.0];
        assert!(s.validate().is_err());
        let mut s = tiny_scenario();
        s.n_values = vec![3];
        assert!(s.validate().is_err());
        let mut s = tiny_scenario();
        s.estimators.clear();
        assert!(s.validate().is_err());
    }
}
