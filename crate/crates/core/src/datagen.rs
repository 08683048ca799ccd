//! Synthetic regression problems with Gaussian designs and AR(1) errors.
//!
//! Every draw goes through an explicit random stream, so a dataset is fully
//! determined by its configuration and seed no matter where it is generated.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// How the first error term is initialized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitMode {
    /// `Var[eps_1] = sigma_u^2 / (1 - rho^2)`, so the series is stationary.
    Stationary,
    /// `Var[eps_1]` fixed to the given value; the variance then drifts
    /// toward the stationary level as t grows.
    FixedVariance(f64),
}

/// Row covariance of the design matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignCov {
    Identity,
    /// Diagonal covariance; one positive variance per column.
    Diagonal(Vec<f64>),
}

/// Parameters of the data-generating process.
#[derive(Debug, Clone, PartialEq)]
pub struct DgpConfig {
    pub n: usize,
    pub p: usize,
    /// Number of nonzero coefficients.
    pub s: usize,
    /// AR(1) coefficient of the error process, |rho| < 1.
    pub rho: f64,
    /// Innovation standard deviation.
    pub sigma_u: f64,
    pub init_mode: InitMode,
    pub design_cov: DesignCov,
    /// Magnitude of each nonzero coefficient (signs are random).
    pub beta_magnitude: f64,
    pub seed: u64,
}

impl DgpConfig {
    /// Configuration with identity design, stationary unit-variance errors
    /// and `s = floor(p / 10)` nonzero coefficients of magnitude one.
    pub fn baseline(n: usize, p: usize, rho: f64, seed: u64) -> Self {
        Self {
            n,
            p,
            s: p / 10,
            rho,
            sigma_u: 1.0,
            init_mode: InitMode::Stationary,
            design_cov: DesignCov::Identity,
            beta_magnitude: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("n must be at least 2"));
        }
        if self.p == 0 {
            return Err(invalid("p must be positive"));
        }
        if self.s > self.p {
            return Err(invalid(format!("s = {} exceeds p = {}", self.s, self.p)));
        }
        if !self.rho.is_finite() || self.rho.abs() >= 1.0 {
            return Err(invalid("rho must lie in (-1,1)"));
        }
        if !(self.sigma_u > 0.0) {
            return Err(invalid("sigma_u must be positive"));
        }
        if !(self.beta_magnitude > 0.0) {
            return Err(invalid("beta_magnitude must be positive"));
        }
        if let InitMode::FixedVariance(v1) = self.init_mode {
            if !(v1 > 0.0) {
                return Err(invalid("initial variance must be positive"));
            }
        }
        if let DesignCov::Diagonal(values) = &self.design_cov {
            if values.len() != self.p {
                return Err(invalid(format!(
                    "diagonal covariance has {} entries, expected p = {}",
                    values.len(),
                    self.p
                )));
            }
            if values.iter().any(|v| !(*v > 0.0)) {
                return Err(invalid("diagonal covariance entries must be positive"));
            }
        }
        Ok(())
    }
}

/// One simulated regression problem.
#[derive(Debug, Clone)]
pub struct SimulatedDataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub beta0: Array1<f64>,
    /// Sorted 0-based indices of the nonzero coefficients.
    pub support: Vec<usize>,
    /// AR errors, `y - X beta0`.
    pub epsilon: Array1<f64>,
    /// Innovations driving the error recursion.
    pub u: Array1<f64>,
}

/// Draw a coefficient vector with exactly `s` nonzero entries of the given
/// magnitude at uniformly random positions, each with an independent fair
/// sign. Returns the vector and its sorted support.
pub fn make_beta0<R: Rng>(
    p: usize,
    s: usize,
    magnitude: f64,
    rng: &mut R,
) -> Result<(Array1<f64>, Vec<usize>)> {
    if s > p {
        return Err(invalid(format!("s = {s} exceeds p = {p}")));
    }
    if !(magnitude > 0.0) {
        return Err(invalid("magnitude must be positive"));
    }
    let mut support: Vec<usize> = rand::seq::index::sample(rng, p, s).into_vec();
    support.sort_unstable();
    let mut beta = Array1::zeros(p);
    for &j in &support {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        beta[j] = sign * magnitude;
    }
    Ok((beta, support))
}

/// Simulate the error process `eps_t = rho * eps_{t-1} + u_t` with Gaussian
/// innovations of standard deviation `sigma_u`. Returns `(epsilon, u)`.
///
/// The first term is `eps_1 = scale * u_1` where `scale` reproduces the
/// requested initial variance, so the whitening filter applied with the true
/// `rho` recovers `(sqrt(1-rho^2) * eps_1, u_2, ..., u_n)` exactly.
pub fn simulate_ar1_noise<R: Rng>(
    n: usize,
    rho: f64,
    sigma_u: f64,
    init_mode: InitMode,
    rng: &mut R,
) -> Result<(Array1<f64>, Array1<f64>)> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(invalid("rho must lie in (-1,1)"));
    }
    if !(sigma_u > 0.0) {
        return Err(invalid("sigma_u must be positive"));
    }
    let first_scale = match init_mode {
        InitMode::Stationary => (1.0 - rho * rho).powf(-0.5),
        InitMode::FixedVariance(v1) => {
            if !(v1 > 0.0) {
                return Err(invalid("initial variance must be positive"));
            }
            v1.sqrt() / sigma_u
        }
    };
    let mut u = Array1::zeros(n);
    for t in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        u[t] = sigma_u * z;
    }
    let mut eps = Array1::zeros(n);
    eps[0] = first_scale * u[0];
    for t in 1..n {
        eps[t] = rho * eps[t - 1] + u[t];
    }
    Ok((eps, u))
}

/// Simulate a full dataset from its own seed.
pub fn simulate_dataset(config: &DgpConfig) -> Result<SimulatedDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    simulate_dataset_with_rng(config, &mut rng)
}

/// Simulate a dataset from an externally owned stream. The Monte Carlo
/// harness uses this with per-replication substreams; the draw order is
/// fixed (coefficients, then design row-major, then noise).
pub fn simulate_dataset_with_rng<R: Rng>(
    config: &DgpConfig,
    rng: &mut R,
) -> Result<SimulatedDataset> {
    config.validate()?;
    let (beta0, support) = make_beta0(config.p, config.s, config.beta_magnitude, rng)?;

    let col_scale: Option<Vec<f64>> = match &config.design_cov {
        DesignCov::Identity => None,
        DesignCov::Diagonal(values) => Some(values.iter().map(|v| v.sqrt()).collect()),
    };
    let mut x = Array2::zeros((config.n, config.p));
    for t in 0..config.n {
        for j in 0..config.p {
            let z: f64 = rng.sample(StandardNormal);
            x[(t, j)] = match &col_scale {
                None => z,
                Some(scale) => scale[j] * z,
            };
        }
    }

    let (epsilon, u) =
        simulate_ar1_noise(config.n, config.rho, config.sigma_u, config.init_mode, rng)?;
    let y = x.dot(&beta0) + &epsilon;
    Ok(SimulatedDataset {
        x,
        y,
        beta0,
        support,
        epsilon,
        u,
    })
}
