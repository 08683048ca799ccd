//! Penalty selection: closed-form theoretical choices driven by the scaling
//! function `delta(n, r) = sqrt(ln r / n)`, temporal 2-fold cross-validation
//! (folds are the first and second halves of the sample), and a hold-out
//! oracle that tunes against the true coefficients.

use ndarray::{s, Array1, ArrayView1, ArrayView2};

use crate::datagen::SimulatedDataset;
use crate::error::{degenerate, invalid, Result};
use crate::solver::{ar_fit_or_identity, fit_lasso_path, lambda_max, EstimatorKind};
use crate::whiten::WhiteningOperator;

/// Constants entering the theoretical penalty and bound formulas. None of
/// them is pinned numerically by the theory, so they are configuration with
/// default 1 (and probability exponent 2); the closed-form penalties are a
/// diagnostic, not the default tuner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants {
    /// Sub-Gaussian product constant K.
    pub k: f64,
    /// Absolute constant c.
    pub c: f64,
    /// Probability exponent tau, > 1.
    pub tau: f64,
    /// Constant C of the AR(1) relative-error bound.
    pub c_prop3: f64,
}

impl Default for TheoryConstants {
    fn default() -> Self {
        Self {
            k: 1.0,
            c: 1.0,
            tau: 2.0,
            c_prop3: 1.0,
        }
    }
}

impl TheoryConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !(self.c > 0.0) || !(self.c_prop3 > 0.0) {
            return Err(invalid("theory constants must be positive"));
        }
        if !(self.tau > 1.0) {
            return Err(invalid("tau must exceed 1"));
        }
        Ok(())
    }

    /// `sqrt(30) * 2^3 * (c kappa sigma_u^2)^{-1/2}`, the displayed form of
    /// the AR(1) error-bound constant.
    pub fn prop3_constant(c: f64, kappa: f64, sigma_u: f64) -> f64 {
        30.0_f64.sqrt() * 8.0 / (c * kappa * sigma_u * sigma_u).sqrt()
    }
}

/// `sqrt(ln r / n)` for n > 0, r > 1.
pub fn delta_scaling(n: f64, r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(invalid("r must exceed 1"));
    }
    delta_scaling_ln(n, r.ln())
}

/// Same scaling with the logarithm supplied directly, so powers like
/// `p^{s tau}` never have to be materialized.
pub(crate) fn delta_scaling_ln(n: f64, ln_r: f64) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(invalid("n must be positive and finite"));
    }
    if !(ln_r > 0.0) {
        return Err(invalid("r must exceed 1"));
    }
    Ok((ln_r / n).sqrt())
}

/// Closed-form penalty for the plain LASSO under AR(1) errors:
/// `(4K / sqrt(c)) * delta((1 - rho^2) n, p^tau)`. Grows with the
/// persistence of the errors through the effective sample size.
pub fn lambda_lasso_theoretical(
    consts: &TheoryConstants,
    n: f64,
    p: f64,
    rho: f64,
) -> Result<f64> {
    consts.validate()?;
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(invalid("rho must lie in (-1,1)"));
    }
    if !(p > 1.0) {
        return Err(invalid("p must exceed 1"));
    }
    let delta = delta_scaling_ln((1.0 - rho * rho) * n, consts.tau * p.ln())?;
    Ok(4.0 * consts.k / consts.c.sqrt() * delta)
}

/// Closed-form second-stage penalty for feasible GLS:
/// `(4 / sqrt(c)) * (1 + rho^2 C delta((1-rho^2) n, p^{s tau}))^{1/2}
///  * delta(n, p^tau)`.
pub fn lambda_fgls_theoretical(
    consts: &TheoryConstants,
    n: f64,
    p: f64,
    s: f64,
    rho: f64,
) -> Result<f64> {
    consts.validate()?;
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(invalid("rho must lie in (-1,1)"));
    }
    if !(p > 1.0) {
        return Err(invalid("p must exceed 1"));
    }
    if !(s >= 1.0) {
        return Err(invalid("s must be at least 1"));
    }
    let inner = delta_scaling_ln((1.0 - rho * rho) * n, s * consts.tau * p.ln())?;
    let inflation = (1.0 + rho * rho * consts.c_prop3 * inner).sqrt();
    let outer = delta_scaling_ln(n, consts.tau * p.ln())?;
    Ok(4.0 / consts.c.sqrt() * inflation * outer)
}

/// Outcome of a cross-validation sweep over a penalty grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    /// Grid in the order supplied by the caller.
    pub lambda_grid: Vec<f64>,
    /// Average held-out MSE per grid entry, same order.
    pub validation_mse: Vec<f64>,
    pub chosen_lambda: f64,
    /// Index of the chosen entry in the supplied grid (0-based).
    pub chosen_index: usize,
}

// Solver settings used inside cross-validation. Fold fits only rank
// penalties, so they run at a loose tolerance with a hard sweep cap; the
// final refit at the chosen penalty uses the caller's own configuration.
const CV_TOL: f64 = 1e-4;
const CV_MAX_SWEEPS: usize = 1_000;

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("penalty grid must be non-empty"));
    }
    if grid.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(invalid("penalty grid entries must be positive and finite"));
    }
    Ok(())
}

/// Indices that visit the grid from the largest penalty down, so path fits
/// can be warm-started regardless of the supplied order.
fn descending_order(grid: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|a, b| grid[*b].total_cmp(&grid[*a]));
    order
}

fn prediction_mse(x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>, beta: ArrayView1<'_, f64>) -> f64 {
    let resid = &y - &x.dot(&beta);
    resid.iter().map(|v| v * v).sum::<f64>() / y.len() as f64
}

/// Accumulate held-out MSE for one (train, validate) direction of a plain
/// LASSO problem, warm-starting along the descending grid.
fn accumulate_lasso_direction(
    train_x: ArrayView2<'_, f64>,
    train_y: ArrayView1<'_, f64>,
    val_x: ArrayView2<'_, f64>,
    val_y: ArrayView1<'_, f64>,
    grid: &[f64],
    order: &[usize],
    mse: &mut [f64],
) -> Result<()> {
    let lambdas: Vec<f64> = order.iter().map(|&i| grid[i]).collect();
    let fits = fit_lasso_path(train_x, train_y, &lambdas, CV_TOL, CV_MAX_SWEEPS)?;
    for (&idx, fit) in order.iter().zip(&fits) {
        mse[idx] += prediction_mse(val_x, val_y, fit.beta.view());
    }
    Ok(())
}

/// Accumulate one direction of the feasible-GLS criterion: a first-stage
/// LASSO on the raw training fold at each candidate penalty yields an AR
/// estimate; the full series is then whitened with it (the filter is causal,
/// so whitening before splitting keeps every boundary term) and the
/// second-stage fit and held-out MSE are both computed on whitened data.
fn accumulate_fgls_direction(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    train: std::ops::Range<usize>,
    val: std::ops::Range<usize>,
    grid: &[f64],
    order: &[usize],
    mse: &mut [f64],
) -> Result<()> {
    let lambdas: Vec<f64> = order.iter().map(|&i| grid[i]).collect();
    let train_x = x.slice(s![train.clone(), ..]);
    let train_y = y.slice(s![train.clone()]);
    let stage1 = fit_lasso_path(train_x, train_y, &lambdas, CV_TOL, CV_MAX_SWEEPS)?;
    let mut warm: Option<Array1<f64>> = None;
    for (&idx, first) in order.iter().zip(&stage1) {
        let resid = &train_y - &train_x.dot(&first.beta);
        let ar = ar_fit_or_identity(resid.view())?;
        let op = WhiteningOperator::new(ar.rho_used)?;
        let xw = op.apply_matrix(x);
        let yw = op.apply(y);
        let mut config = crate::solver::SolverConfig::new(grid[idx])
            .with_tol(CV_TOL)
            .with_max_sweeps(CV_MAX_SWEEPS);
        config.warm_start = warm.take();
        let fit = crate::solver::fit_lasso(
            xw.slice(s![train.clone(), ..]),
            yw.slice(s![train.clone()]),
            &config,
        )?;
        mse[idx] += prediction_mse(
            xw.slice(s![val.clone(), ..]),
            yw.slice(s![val.clone()]),
            fit.beta.view(),
        );
        warm = Some(fit.beta);
    }
    Ok(())
}

/// 2-fold cross-validation with temporal folds: the first and second halves
/// of the sample. Each grid entry is fitted on one half and scored by
/// prediction MSE on the other, in both directions; the two scores are
/// averaged. For the GLS and FGLS estimators both fitting and scoring happen
/// on whitened data. Ties in the criterion resolve toward the larger
/// penalty.
pub fn cv_two_fold(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    estimator: &EstimatorKind,
    grid: &[f64],
) -> Result<CvResult> {
    let n = x.nrows();
    if n < 4 {
        return Err(invalid("cross-validation needs at least 4 rows"));
    }
    if y.len() != n {
        return Err(crate::error::shape(format!(
            "y has length {}, X has {} rows",
            y.len(),
            n
        )));
    }
    validate_grid(grid)?;
    let order = descending_order(grid);
    let half = n / 2;
    let mut mse = vec![0.0; grid.len()];

    match estimator {
        EstimatorKind::Lasso => {
            cv_halves_plain(x, y, half, grid, &order, &mut mse)?;
        }
        EstimatorKind::GlsKnownRho(rho) => {
            let op = WhiteningOperator::new(*rho)?;
            let xw = op.apply_matrix(x);
            let yw = op.apply(y);
            cv_halves_plain(xw.view(), yw.view(), half, grid, &order, &mut mse)?;
        }
        EstimatorKind::Fgls => {
            accumulate_fgls_direction(x, y, 0..half, half..n, grid, &order, &mut mse)?;
            accumulate_fgls_direction(x, y, half..n, 0..half, grid, &order, &mut mse)?;
        }
    }
    for v in mse.iter_mut() {
        *v /= 2.0;
    }

    let mut chosen_index = 0;
    for i in 1..grid.len() {
        let better = mse[i] < mse[chosen_index]
            || (mse[i] == mse[chosen_index] && grid[i] > grid[chosen_index]);
        if better {
            chosen_index = i;
        }
    }
    Ok(CvResult {
        lambda_grid: grid.to_vec(),
        validation_mse: mse,
        chosen_lambda: grid[chosen_index],
        chosen_index,
    })
}

fn cv_halves_plain(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    half: usize,
    grid: &[f64],
    order: &[usize],
    mse: &mut [f64],
) -> Result<()> {
    let n = x.nrows();
    accumulate_lasso_direction(
        x.slice(s![..half, ..]),
        y.slice(s![..half]),
        x.slice(s![half..n, ..]),
        y.slice(s![half..n]),
        grid,
        order,
        mse,
    )?;
    accumulate_lasso_direction(
        x.slice(s![half..n, ..]),
        y.slice(s![half..n]),
        x.slice(s![..half, ..]),
        y.slice(s![..half]),
        grid,
        order,
        mse,
    )
}

/// Log-spaced penalty grid from `||X'y||_inf / n` down three decades,
/// strictly decreasing. The first entry forces the all-zero solution.
pub fn default_grid(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    length: usize,
) -> Result<Vec<f64>> {
    if length < 2 {
        return Err(invalid("grid length must be at least 2"));
    }
    let top = lambda_max(x, y);
    if !(top > 0.0) || !top.is_finite() {
        return Err(degenerate(
            "largest penalty is zero; response is orthogonal to every column",
        ));
    }
    let ratio = 1e-3_f64.powf(1.0 / (length - 1) as f64);
    let mut grid = Vec::with_capacity(length);
    let mut value = top;
    for _ in 0..length {
        grid.push(value);
        value *= ratio;
    }
    Ok(grid)
}

pub const DEFAULT_GRID_LEN: usize = 50;

/// Penalty chosen by fitting on a hold-out dataset and minimizing the
/// coefficient error against the shared true vector. Only used to reproduce
/// the degradation experiment; real tuning never sees `beta0`.
pub fn oracle_holdout_lambda(
    train: &SimulatedDataset,
    holdout: &SimulatedDataset,
    grid: &[f64],
) -> Result<f64> {
    if train.x.ncols() != holdout.x.ncols() {
        return Err(invalid(format!(
            "datasets disagree on p: {} vs {}",
            train.x.ncols(),
            holdout.x.ncols()
        )));
    }
    if train.beta0 != holdout.beta0 {
        return Err(invalid("datasets must share the same true coefficients"));
    }
    validate_grid(grid)?;
    let order = descending_order(grid);
    let lambdas: Vec<f64> = order.iter().map(|&i| grid[i]).collect();
    let fits = fit_lasso_path(
        holdout.x.view(),
        holdout.y.view(),
        &lambdas,
        CV_TOL,
        CV_MAX_SWEEPS,
    )?;
    let mut best_lambda = lambdas[0];
    let mut best_err = f64::INFINITY;
    for (&lambda, fit) in lambdas.iter().zip(&fits) {
        let err = (&fit.beta - &holdout.beta0)
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        let better = err < best_err || (err == best_err && lambda > best_lambda);
        if better {
            best_err = err;
            best_lambda = lambda;
        }
    }
    Ok(best_lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{simulate_dataset, DgpConfig};
    use crate::solver::fit_lasso;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    #[test]
    fn delta_scaling_examples() {
        assert_close(delta_scaling(100.0, std::f64::consts::E).unwrap(), 0.1, 1e-14);
        assert_close(
            delta_scaling(25.0, std::f64::consts::E.powi(4)).unwrap(),
            0.4,
            1e-12,
        );
        assert!(delta_scaling(100.0, 1.0).is_err());
        assert!(delta_scaling(0.0, 2.0).is_err());
        // doubling n shrinks by sqrt(2)
        let a = delta_scaling(50.0, 7.0).unwrap();
        let b = delta_scaling(100.0, 7.0).unwrap();
        assert_close(a / b, 2.0_f64.sqrt(), 1e-12);
        // identity delta^2 * n = ln r
        let d = delta_scaling(37.0, 11.0).unwrap();
        assert_close(d * d * 37.0, 11.0_f64.ln(), 1e-12);
    }

    #[test]
    fn lambda_lasso_arithmetic() {
        let consts = TheoryConstants::default();
        let value =
            lambda_lasso_theoretical(&consts, 100.0, std::f64::consts::E, 0.0).unwrap();
        assert_close(value, 4.0 * (2.0_f64 / 100.0).sqrt(), 1e-12);
        assert_close(value, 0.565685424949238, 1e-12);
    }

    #[test]
    fn lambda_lasso_grows_with_persistence() {
        let consts = TheoryConstants::default();
        let at0 = lambda_lasso_theoretical(&consts, 200.0, 128.0, 0.0).unwrap();
        let at99 = lambda_lasso_theoretical(&consts, 200.0, 128.0, 0.99).unwrap();
        let a = (1.0 - 0.99_f64 * 0.99).powf(-0.5);
        assert_close(at99 / at0, a, 1e-9);
        assert!((at99 / at0 - 7.0888).abs() < 1e-3);

        let mut prev = 0.0;
        for &rho in &[0.0, 0.3, 0.6, 0.9, 0.99] {
            let v = lambda_lasso_theoretical(&consts, 200.0, 128.0, rho).unwrap();
            assert!(v > prev);
            prev = v;
        }
        // decreasing in n
        let small = lambda_lasso_theoretical(&consts, 100.0, 128.0, 0.5).unwrap();
        let large = lambda_lasso_theoretical(&consts, 400.0, 128.0, 0.5).unwrap();
        assert!(large < small);
    }

    #[test]
    fn lambda_fgls_arithmetic() {
        let consts = TheoryConstants {
            k: 1.0,
            c: 1.0,
            tau: 1.0 + 1e-12,
            c_prop3: 1.0,
        };
        // evaluated step by step with tau -> 1: inner = sqrt(1/75),
        // value = 4 (1 + 0.25 inner)^{1/2} * 0.1
        let value =
            lambda_fgls_theoretical(&consts, 100.0, std::f64::consts::E, 1.0, 0.5).unwrap();
        let inner = (1.0_f64 / 75.0).sqrt();
        let expect = 4.0 * (1.0 + 0.25 * inner).sqrt() * 0.1;
        assert_close(value, expect, 1e-9);
        assert_close(value, 0.40573262, 1e-6);

        // rho = 0: inflation factor is exactly 1
        let flat = lambda_fgls_theoretical(&consts, 100.0, std::f64::consts::E, 1.0, 0.0).unwrap();
        assert_close(flat, 0.4, 1e-9);
    }

    #[test]
    fn prop3_constant_closed_form() {
        let c = TheoryConstants::prop3_constant(1.0, 1.0, 1.0);
        assert_close(c, 30.0_f64.sqrt() * 8.0, 1e-12);
        // quadrupling kappa halves the constant
        let smaller = TheoryConstants::prop3_constant(1.0, 4.0, 1.0);
        assert_close(c / smaller, 2.0, 1e-12);

        let bad = TheoryConstants {
            tau: 1.0,
            ..TheoryConstants::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fgls_inflation_shrinks_monotonically_in_n() {
        let consts = TheoryConstants::default();
        let mut prev = f64::INFINITY;
        for &n in &[50.0, 100.0, 400.0, 1600.0, 6400.0] {
            // the outer scaling cancels in the ratio, leaving the inflation factor
            let with = lambda_fgls_theoretical(&consts, n, 128.0, 4.0, 0.9).unwrap();
            let base = lambda_fgls_theoretical(&consts, n, 128.0, 4.0, 0.0).unwrap();
            let inflation = with / base;
            assert!(inflation >= 1.0);
            assert!(inflation <= prev);
            prev = inflation;
        }
    }

    fn random_problem(n: usize, p: usize, seed: u64) -> (Array2<f64>, Array1<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
        let y = Array1::from_shape_fn(n, |_| rng.sample::<f64, _>(StandardNormal));
        (x, y)
    }

    #[test]
    fn default_grid_shape() {
        let (x, y) = random_problem(20, 4, 1);
        let grid = default_grid(x.view(), y.view(), 2).unwrap();
        let top = lambda_max(x.view(), y.view());
        assert_close(grid[0], top, 1e-15);
        assert_close(grid[1], 1e-3 * top, 1e-12);

        let grid = default_grid(x.view(), y.view(), 10).unwrap();
        assert_eq!(grid.len(), 10);
        for w in grid.windows(2) {
            assert!(w[1] < w[0]);
            assert_close(w[1] / w[0], 1e-3_f64.powf(1.0 / 9.0), 1e-12);
        }
        // first entry forces the zero solution
        let fit = fit_lasso(x.view(), y.view(), &crate::solver::SolverConfig::new(grid[0])).unwrap();
        assert!(fit.beta.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn default_grid_degenerate() {
        let x = Array2::zeros((6, 2));
        let y = Array1::from_vec(vec![1.0; 6]);
        assert!(matches!(
            default_grid(x.view(), y.view(), 5),
            Err(crate::error::Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn cv_forced_choice_and_small_n() {
        let (x, y) = random_problem(8, 3, 2);
        let result = cv_two_fold(x.view(), y.view(), &EstimatorKind::Lasso, &[0.5]).unwrap();
        assert_eq!(result.chosen_index, 0);
        assert_eq!(result.chosen_lambda, 0.5);

        let (x, y) = random_problem(3, 2, 3);
        assert!(cv_two_fold(x.view(), y.view(), &EstimatorKind::Lasso, &[0.5]).is_err());
    }

    #[test]
    fn cv_prefers_large_lambda_on_pure_noise() {
        let mut wins = 0;
        for seed in 0..200 {
            let mut config = DgpConfig::baseline(40, 8, 0.0, 1000 + seed);
            config.s = 0;
            let data = simulate_dataset(&config).unwrap();
            let top = lambda_max(data.x.view(), data.y.view());
            let grid = [top, 1e-3 * top];
            let result =
                cv_two_fold(data.x.view(), data.y.view(), &EstimatorKind::Lasso, &grid).unwrap();
            if result.chosen_index == 0 {
                wins += 1;
            }
        }
        assert!(wins > 100, "large lambda won only {wins}/200 runs");
    }

    #[test]
    fn cv_mse_decreases_near_top_on_noiseless_data() {
        let mut config = DgpConfig::baseline(60, 10, 0.0, 77);
        config.s = 3;
        let mut data = simulate_dataset(&config).unwrap();
        data.y = data.x.dot(&data.beta0);
        let grid = default_grid(data.x.view(), data.y.view(), 12).unwrap();
        let result =
            cv_two_fold(data.x.view(), data.y.view(), &EstimatorKind::Lasso, &grid).unwrap();
        for w in result.validation_mse[..4].windows(2) {
            assert!(w[1] < w[0], "mse not decreasing at the top of the grid");
        }
    }

    #[test]
    fn cv_choice_invariant_under_grid_permutation() {
        let mut config = DgpConfig::baseline(40, 6, 0.5, 5);
        config.s = 2;
        let data = simulate_dataset(&config).unwrap();
        let grid = default_grid(data.x.view(), data.y.view(), 8).unwrap();
        let forward =
            cv_two_fold(data.x.view(), data.y.view(), &EstimatorKind::Lasso, &grid).unwrap();
        let mut reversed = grid.clone();
        reversed.reverse();
        let backward =
            cv_two_fold(data.x.view(), data.y.view(), &EstimatorKind::Lasso, &reversed).unwrap();
        assert_eq!(forward.chosen_lambda, backward.chosen_lambda);
        assert_eq!(
            backward.chosen_index,
            reversed
                .iter()
                .position(|v| *v == backward.chosen_lambda)
                .unwrap()
        );
    }

    #[test]
    fn cv_gls_zero_rho_matches_lasso() {
        let mut config = DgpConfig::baseline(40, 6, 0.0, 6);
        config.s = 2;
        let data = simulate_dataset(&config).unwrap();
        let grid = default_grid(data.x.view(), data.y.view(), 6).unwrap();
        let plain =
            cv_two_fold(data.x.view(), data.y.view(), &EstimatorKind::Lasso, &grid).unwrap();
        let gls = cv_two_fold(
            data.x.view(),
            data.y.view(),
            &EstimatorKind::GlsKnownRho(0.0),
            &grid,
        )
        .unwrap();
        assert_eq!(plain.chosen_lambda, gls.chosen_lambda);
        for (a, b) in plain.validation_mse.iter().zip(&gls.validation_mse) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn cv_fgls_runs_and_is_deterministic() {
        let config = DgpConfig::baseline(60, 10, 0.9, 7);
        let data = simulate_dataset(&config).unwrap();
        let grid = default_grid(data.x.view(), data.y.view(), 6).unwrap();
        let a = cv_two_fold(data.x.view(), data.y.view(), &EstimatorKind::Fgls, &grid).unwrap();
        let b = cv_two_fold(data.x.view(), data.y.view(), &EstimatorKind::Fgls, &grid).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_holdout_examples() {
        let mut config = DgpConfig::baseline(50, 8, 0.0, 8);
        config.s = 2;
        let train = simulate_dataset(&config).unwrap();
        config.seed = 9;
        let holdout = simulate_dataset(&config).unwrap();
        // datasets share beta0 only if the coefficient draw matches; rebuild
        // the holdout around the training coefficients instead.
        let mut holdout = holdout;
        holdout.beta0 = train.beta0.clone();
        holdout.y = holdout.x.dot(&holdout.beta0) + &holdout.epsilon;

        assert_eq!(
            oracle_holdout_lambda(&train, &holdout, &[0.25]).unwrap(),
            0.25
        );

        // noiseless: tiny penalty wins
        let mut noiseless = holdout.clone();
        noiseless.y = noiseless.x.dot(&noiseless.beta0);
        let grid = [1.0, 0.1, 1e-5];
        let chosen = oracle_holdout_lambda(&train, &noiseless, &grid).unwrap();
        assert_eq!(chosen, 1e-5);

        // mismatched p
        let mut other = DgpConfig::baseline(50, 9, 0.0, 10);
        other.s = 2;
        let wrong = simulate_dataset(&other).unwrap();
        assert!(oracle_holdout_lambda(&train, &wrong, &grid).is_err());
    }
}
