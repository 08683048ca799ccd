//! Shared helpers for the integration suites: an exhaustive reference
//! solver for tiny l1 problems and a few statistics utilities. Everything
//! here is independent of the solver paths under test.

use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Penalized objective evaluated directly.
pub fn objective(x: &Array2<f64>, y: &Array1<f64>, beta: &Array1<f64>, lambda: f64) -> f64 {
    let n = x.nrows() as f64;
    let resid = y - &x.dot(beta);
    resid.iter().map(|v| v * v).sum::<f64>() / (2.0 * n)
        + lambda * beta.iter().map(|v| v.abs()).sum::<f64>()
}

/// Gauss-Jordan solve of a k x k system in place; returns false on a
/// (numerically) singular pivot.
fn solve_dense(a: &mut [f64], rhs: &mut [f64], k: usize) -> bool {
    for col in 0..k {
        let mut pivot = col;
        for row in col + 1..k {
            if a[row * k + col].abs() > a[pivot * k + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * k + col].abs() < 1e-12 {
            return false;
        }
        if pivot != col {
            for j in 0..k {
                a.swap(col * k + j, pivot * k + j);
            }
            rhs.swap(col, pivot);
        }
        let diag = a[col * k + col];
        for j in 0..k {
            a[col * k + j] /= diag;
        }
        rhs[col] /= diag;
        for row in 0..k {
            if row == col {
                continue;
            }
            let factor = a[row * k + col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..k {
                a[row * k + j] -= factor * a[col * k + j];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    true
}

/// Exhaustive l1 reference solver: enumerate every sign pattern in
/// {-1, 0, +1}^p, solve the stationarity equations of its active set, and
/// keep the candidate with the smallest true objective. The global optimum
/// is a stationary point of its own pattern, so it is always among the
/// candidates.
pub fn lasso_bruteforce(x: &Array2<f64>, y: &Array1<f64>, lambda: f64) -> Array1<f64> {
    let (n, p) = x.dim();
    assert!(p <= 8, "reference solver is exponential in p");
    let nf = n as f64;
    let mut best_obj = f64::INFINITY;
    let mut best = Array1::zeros(p);

    let total = 3usize.pow(p as u32);
    for code in 0..total {
        let mut signs = vec![0i8; p];
        let mut c = code;
        for s in signs.iter_mut() {
            *s = match c % 3 {
                0 => 0,
                1 => 1,
                _ => -1,
            };
            c /= 3;
        }
        let active: Vec<usize> = (0..p).filter(|j| signs[*j] != 0).collect();
        let mut beta = Array1::zeros(p);
        if !active.is_empty() {
            let k = active.len();
            let mut gram = vec![0.0; k * k];
            let mut rhs = vec![0.0; k];
            for (r, &jr) in active.iter().enumerate() {
                for (cc, &jc) in active.iter().enumerate() {
                    gram[r * k + cc] = x.column(jr).dot(&x.column(jc));
                }
                rhs[r] = x.column(jr).dot(y) - nf * lambda * signs[jr] as f64;
            }
            if !solve_dense(&mut gram, &mut rhs, k) {
                continue;
            }
            for (r, &j) in active.iter().enumerate() {
                beta[j] = rhs[r];
            }
        }
        let obj = objective(x, y, &beta, lambda);
        if obj < best_obj {
            best_obj = obj;
            best = beta;
        }
    }
    best
}

/// Standard-normal matrix and vector from a seeded stream.
pub fn gaussian_instance(n: usize, p: usize, seed: u64) -> (Array2<f64>, Array1<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
    let y = Array1::from_shape_fn(n, |_| rng.sample::<f64, _>(StandardNormal));
    (x, y)
}

/// Lag-1 sample autocorrelation.
pub fn lag1_autocorr(series: ArrayView1<'_, f64>) -> f64 {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 0..n {
        let d = series[t] - mean;
        den += d * d;
        if t > 0 {
            num += d * (series[t - 1] - mean);
        }
    }
    num / den
}

/// Median of a slice (not in place).
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}
