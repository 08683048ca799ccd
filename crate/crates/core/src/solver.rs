//! Cyclic coordinate descent for l1-penalized least squares, and the three
//! estimator pipelines built on it: plain LASSO, GLS-LASSO with a known AR
//! coefficient, and feasible GLS-LASSO with the coefficient estimated from
//! first-stage residuals.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{invalid, shape, Result};
use crate::whiten::{estimate_ar1, residuals, ArFitResult, WhiteningOperator};

/// Solver settings for one fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Penalty level, >= 0.
    pub lambda: f64,
    /// Convergence threshold on the largest coefficient change per sweep.
    pub tol: f64,
    pub max_sweeps: usize,
    pub warm_start: Option<Array1<f64>>,
}

impl SolverConfig {
    pub const DEFAULT_TOL: f64 = 1e-7;
    pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            tol: Self::DEFAULT_TOL,
            max_sweeps: Self::DEFAULT_MAX_SWEEPS,
            warm_start: None,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_sweeps(mut self, max_sweeps: usize) -> Self {
        self.max_sweeps = max_sweeps;
        self
    }

    pub fn with_warm_start(mut self, beta: Array1<f64>) -> Self {
        self.warm_start = Some(beta);
        self
    }

    fn validate(&self, p: usize) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(invalid("lambda must be non-negative and finite"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if self.max_sweeps == 0 {
            return Err(invalid("max_sweeps must be positive"));
        }
        if let Some(w) = &self.warm_start {
            if w.len() != p {
                return Err(shape(format!(
                    "warm start has length {}, X has {} columns",
                    w.len(),
                    p
                )));
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(invalid("warm start must be finite"));
            }
        }
        Ok(())
    }
}

/// A fitted coefficient vector with convergence metadata.
#[derive(Debug, Clone)]
pub struct LassoFit {
    pub beta: Array1<f64>,
    /// Full coordinate sweeps performed.
    pub sweeps: usize,
    pub converged: bool,
    /// `(1/2n) ||y - X beta||^2 + lambda ||beta||_1`, recomputed from the
    /// returned coefficients.
    pub objective: f64,
    /// Largest stationarity residual over coordinates: for active j,
    /// `|x_j' r / n - lambda sign(beta_j)|`; for inactive j the excess of
    /// `|x_j' r / n|` over lambda.
    pub kkt_violation: f64,
}

/// Which estimator pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorKind {
    Lasso,
    GlsKnownRho(f64),
    Fgls,
}

/// Proximal map of the absolute value: `sign(z) * max(|z| - t, 0)`.
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Design matrix packed column-major with cached column norms, so sweeps
/// run over contiguous slices.
struct PackedDesign {
    n: usize,
    p: usize,
    cols: Vec<f64>,
    /// `x_j' x_j / n` per column.
    col_norm: Vec<f64>,
}

impl PackedDesign {
    fn new(x: ArrayView2<'_, f64>) -> Self {
        let (n, p) = x.dim();
        let mut cols = vec![0.0; n * p];
        let mut col_norm = vec![0.0; p];
        for j in 0..p {
            let dst = &mut cols[j * n..(j + 1) * n];
            let mut sq = 0.0;
            for (t, v) in x.column(j).iter().enumerate() {
                dst[t] = *v;
                sq += v * v;
            }
            col_norm[j] = sq / n as f64;
        }
        Self { n, p, cols, col_norm }
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }
}

/// Largest `x_j' x_j / n` over columns; the natural scale for judging KKT
/// residuals of a converged fit.
pub fn max_column_scale(x: ArrayView2<'_, f64>) -> f64 {
    let n = x.nrows() as f64;
    let mut m = 0.0_f64;
    for j in 0..x.ncols() {
        let col = x.column(j);
        m = m.max(col.dot(&col) / n);
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
fn update_coord(
    design: &PackedDesign,
    beta: &mut [f64],
    resid: &mut [f64],
    lambda: f64,
    j: usize,
) -> f64 {
    let norm = design.col_norm[j];
    if norm <= 0.0 {
        // flat coordinate: only the penalty acts, pin to zero
        beta[j] = 0.0;
        return 0.0;
    }
    let col = design.col(j);
    let grad = dot(col, resid) / design.n as f64;
    let z = beta[j] * norm + grad;
    let updated = soft_threshold(z, lambda) / norm;
    let change = updated - beta[j];
    if change != 0.0 {
        axpy(-change, col, resid);
        beta[j] = updated;
    }
    change.abs()
}

/// One full cyclic sweep; returns the largest coefficient change.
fn sweep_full(design: &PackedDesign, beta: &mut [f64], resid: &mut [f64], lambda: f64) -> f64 {
    let mut max_change = 0.0_f64;
    for j in 0..design.p {
        max_change = max_change.max(update_coord(design, beta, resid, lambda, j));
    }
    max_change
}

/// One sweep restricted to the currently active coordinates.
fn sweep_active(design: &PackedDesign, beta: &mut [f64], resid: &mut [f64], lambda: f64) -> f64 {
    let mut max_change = 0.0_f64;
    for j in 0..design.p {
        if beta[j] != 0.0 {
            max_change = max_change.max(update_coord(design, beta, resid, lambda, j));
        }
    }
    max_change
}

fn fit_packed(
    design: &PackedDesign,
    y: &[f64],
    config: &SolverConfig,
) -> LassoFit {
    let n = design.n as f64;
    let mut beta: Vec<f64> = match &config.warm_start {
        Some(w) => w.to_vec(),
        None => vec![0.0; design.p],
    };
    // residual r = y - X beta, maintained across updates
    let mut resid = y.to_vec();
    for j in 0..design.p {
        if beta[j] != 0.0 {
            axpy(-beta[j], design.col(j), &mut resid);
        }
    }

    // Alternate one full sweep with sweeps over the active set until the
    // active set is stable, then confirm with the next full sweep. Only a
    // full sweep can declare convergence, so the certificate always covers
    // every coordinate.
    let mut sweeps = 0;
    let mut converged = false;
    'outer: while sweeps < config.max_sweeps {
        let max_change = sweep_full(design, &mut beta, &mut resid, config.lambda);
        sweeps += 1;
        if max_change < config.tol {
            converged = true;
            break;
        }
        loop {
            if sweeps >= config.max_sweeps {
                break 'outer;
            }
            let active_change = sweep_active(design, &mut beta, &mut resid, config.lambda);
            sweeps += 1;
            if active_change < config.tol {
                break;
            }
        }
    }

    // Recompute the residual exactly so the reported objective and KKT
    // residuals are functions of beta alone, not of accumulated updates.
    let mut exact = y.to_vec();
    for j in 0..design.p {
        if beta[j] != 0.0 {
            axpy(-beta[j], design.col(j), &mut exact);
        }
    }
    let l1: f64 = beta.iter().map(|v| v.abs()).sum();
    let objective = dot(&exact, &exact) / (2.0 * n) + config.lambda * l1;

    let mut kkt_violation = 0.0_f64;
    for j in 0..design.p {
        if design.col_norm[j] <= 0.0 {
            continue;
        }
        let grad = dot(design.col(j), &exact) / n;
        let viol = if beta[j] != 0.0 {
            (grad - config.lambda * beta[j].signum()).abs()
        } else {
            (grad.abs() - config.lambda).max(0.0)
        };
        kkt_violation = kkt_violation.max(viol);
    }

    LassoFit {
        beta: Array1::from_vec(beta),
        sweeps,
        converged,
        objective,
        kkt_violation,
    }
}

fn validate_inputs(x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> Result<()> {
    let (n, p) = x.dim();
    if n == 0 || p == 0 {
        return Err(invalid("design matrix must be non-empty"));
    }
    if y.len() != n {
        return Err(shape(format!("y has length {}, X has {} rows", y.len(), n)));
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(invalid("inputs must be finite"));
    }
    Ok(())
}

/// Minimize `(1/2n) ||y - X beta||^2 + lambda ||beta||_1` by cyclic
/// coordinate descent with residual maintenance.
///
/// Stops once the largest per-sweep coefficient change drops below
/// `config.tol`, or after `config.max_sweeps` sweeps; hitting the sweep cap
/// is reported through `converged = false`, not an error.
pub fn fit_lasso(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    config: &SolverConfig,
) -> Result<LassoFit> {
    validate_inputs(x, y)?;
    config.validate(x.ncols())?;
    let design = PackedDesign::new(x);
    let y_vec: Vec<f64> = y.to_vec();
    Ok(fit_packed(&design, &y_vec, config))
}

/// Warm-started fits along a descending penalty sequence. The design is
/// packed once and each fit starts from the previous solution. Entries of
/// `lambdas` must be non-negative; they are visited in the given order.
pub fn fit_lasso_path(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    lambdas: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<LassoFit>> {
    validate_inputs(x, y)?;
    if lambdas.is_empty() {
        return Err(invalid("lambda sequence must be non-empty"));
    }
    let design = PackedDesign::new(x);
    let y_vec: Vec<f64> = y.to_vec();
    let mut fits = Vec::with_capacity(lambdas.len());
    let mut warm: Option<Array1<f64>> = None;
    for &lambda in lambdas {
        let mut config = SolverConfig::new(lambda).with_tol(tol).with_max_sweeps(max_sweeps);
        config.warm_start = warm.take();
        config.validate(design.p)?;
        let fit = fit_packed(&design, &y_vec, &config);
        warm = Some(fit.beta.clone());
        fits.push(fit);
    }
    Ok(fits)
}

/// GLS-LASSO with a known AR coefficient: whiten `X` and `y` with the exact
/// filter, then run the plain solver on the transformed problem.
pub fn fit_gls_lasso(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    rho: f64,
    config: &SolverConfig,
) -> Result<LassoFit> {
    let op = WhiteningOperator::new(rho)?;
    let xw = op.apply_matrix(x);
    let yw = op.apply(y);
    fit_lasso(xw.view(), yw.view(), config)
}

/// Threshold below which first-stage residuals are treated as numerically
/// zero and feasible whitening falls back to the identity.
pub const FGLS_DEGENERATE_DENOM: f64 = 1e-12;

/// Feasible GLS-LASSO pipeline: first-stage LASSO, AR(1) coefficient from
/// its residuals (clamped), second-stage fit on data whitened with the
/// estimate. When the residuals are numerically zero the second stage runs
/// with an identity filter, which reduces it to the plain LASSO.
pub fn fit_fgls_lasso(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    stage1_config: &SolverConfig,
    stage2_config: &SolverConfig,
) -> Result<(LassoFit, ArFitResult)> {
    let n = x.nrows();
    if n < 2 {
        return Err(invalid("FGLS needs at least 2 observations"));
    }
    let stage1 = fit_lasso(x, y, stage1_config)?;
    let resid = residuals(y, x, stage1.beta.view())?;
    let ar = ar_fit_or_identity(resid.view())?;
    let fit = fit_gls_lasso(x, y, ar.rho_used, stage2_config)?;
    Ok((fit, ar))
}

/// AR(1) estimate with the degenerate-residual fallback used by FGLS.
pub fn ar_fit_or_identity(resid: ArrayView1<'_, f64>) -> Result<ArFitResult> {
    let n = resid.len();
    if n < 2 {
        return Err(invalid("AR(1) estimation needs at least 2 residuals"));
    }
    let denom: f64 = resid.iter().take(n - 1).map(|v| v * v).sum();
    if denom < FGLS_DEGENERATE_DENOM * n as f64 {
        return Ok(ArFitResult::identity(n - 1));
    }
    estimate_ar1(resid)
}

/// Value of the penalized objective at an arbitrary coefficient vector.
pub fn lasso_objective(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    beta: ArrayView1<'_, f64>,
    lambda: f64,
) -> f64 {
    let n = x.nrows() as f64;
    let resid = &y - &x.dot(&beta);
    let rss: f64 = resid.iter().map(|v| v * v).sum();
    rss / (2.0 * n) + lambda * beta.iter().map(|v| v.abs()).sum::<f64>()
}

/// `||X' y||_inf / n`, the smallest penalty that forces the all-zero
/// solution.
pub fn lambda_max(x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> f64 {
    let n = x.nrows() as f64;
    let mut m = 0.0_f64;
    for j in 0..x.ncols() {
        m = m.max((x.column(j).dot(&y) / n).abs());
    }
    m
}
