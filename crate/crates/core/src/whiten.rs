//! AR(1) whitening: the causal filter that maps an autocorrelated error
//! series back to its innovations, plus the least-squares estimator of the
//! autoregressive coefficient from residuals.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{degenerate, invalid, shape, Result};

/// Clamp bound for the estimated AR coefficient. Whitening needs |rho| < 1,
/// while the raw least-squares estimate can land on or beyond the unit root
/// in small samples.
pub const RHO_CAP: f64 = 0.999;

/// Causal AR(1) whitening filter.
///
/// Applied to a series v it produces `(first_scale * v_1, v_2 - rho * v_1,
/// ..., v_n - rho * v_{n-1})`, where `first_scale = sqrt(1 - rho^2)` undoes
/// the stationary variance of the first observation. Its dense form is lower
/// bidiagonal: diagonal `(first_scale, 1, ..., 1)`, first subdiagonal `-rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhiteningOperator {
    rho: f64,
    first_scale: f64,
}

impl WhiteningOperator {
    /// Build the filter for a given AR coefficient. Fails unless |rho| < 1.
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(invalid("rho must lie in (-1,1)"));
        }
        Ok(Self {
            rho,
            first_scale: (1.0 - rho * rho).sqrt(),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `sqrt(1 - rho^2)`, the scale applied to the first observation.
    pub fn first_scale(&self) -> f64 {
        self.first_scale
    }

    /// Whiten a series in O(n).
    pub fn apply(&self, v: ArrayView1<'_, f64>) -> Array1<f64> {
        let n = v.len();
        let mut out = Array1::zeros(n);
        if n == 0 {
            return out;
        }
        out[0] = self.first_scale * v[0];
        for t in 1..n {
            out[t] = v[t] - self.rho * v[t - 1];
        }
        out
    }

    /// Whiten every column of a matrix (each column is a time series).
    pub fn apply_matrix(&self, m: ArrayView2<'_, f64>) -> Array2<f64> {
        let (n, p) = m.dim();
        let mut out = Array2::zeros((n, p));
        if n == 0 {
            return out;
        }
        for j in 0..p {
            out[(0, j)] = self.first_scale * m[(0, j)];
        }
        for t in 1..n {
            for j in 0..p {
                out[(t, j)] = m[(t, j)] - self.rho * m[(t - 1, j)];
            }
        }
        out
    }

    /// Materialize the n x n filter matrix (for tests and diagnostics).
    pub fn dense(&self, n: usize) -> Array2<f64> {
        let mut r = Array2::zeros((n, n));
        if n == 0 {
            return r;
        }
        r[(0, 0)] = self.first_scale;
        for t in 1..n {
            r[(t, t)] = 1.0;
            r[(t, t - 1)] = -self.rho;
        }
        r
    }
}

/// Dense stationary AR(1) Cholesky factor: lower triangular with first
/// column `a * rho^{t-1}` and remaining columns `rho^{t-j}`, where
/// `a = (1 - rho^2)^{-1/2}`. It is the exact inverse of the whitening filter.
pub fn stationary_cholesky(n: usize, rho: f64) -> Result<Array2<f64>> {
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(invalid("rho must lie in (-1,1)"));
    }
    let a = (1.0 - rho * rho).powf(-0.5);
    let mut psi = Array2::zeros((n, n));
    for t in 0..n {
        psi[(t, 0)] = a * rho.powi(t as i32);
        for j in 1..=t {
            psi[(t, j)] = rho.powi((t - j) as i32);
        }
    }
    Ok(psi)
}

/// Least-squares AR(1) fit from a residual series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArFitResult {
    /// Unconstrained estimate `sum e_{t-1} e_t / sum e_{t-1}^2`.
    pub rho_raw: f64,
    /// `rho_raw` clamped into [-RHO_CAP, RHO_CAP].
    pub rho_used: f64,
    /// Number of lagged products, n - 1.
    pub n_terms: usize,
    pub clamped: bool,
}

impl ArFitResult {
    /// Identity fallback used when the residual series is too small to
    /// carry any AR information.
    pub fn identity(n_terms: usize) -> Self {
        Self {
            rho_raw: 0.0,
            rho_used: 0.0,
            n_terms,
            clamped: false,
        }
    }
}

/// Estimate the AR(1) coefficient of a residual series by least squares
/// over lags t = 2..n, clamping the result into (-1, 1).
pub fn estimate_ar1(residuals: ArrayView1<'_, f64>) -> Result<ArFitResult> {
    let n = residuals.len();
    if n < 2 {
        return Err(invalid("AR(1) estimation needs at least 2 residuals"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 1..n {
        num += residuals[t - 1] * residuals[t];
        den += residuals[t - 1] * residuals[t - 1];
    }
    if den == 0.0 {
        return Err(degenerate(
            "all lagged residuals are zero; AR(1) coefficient is unidentified",
        ));
    }
    let rho_raw = num / den;
    let clamped = rho_raw.abs() > RHO_CAP;
    let rho_used = rho_raw.clamp(-RHO_CAP, RHO_CAP);
    Ok(ArFitResult {
        rho_raw,
        rho_used,
        n_terms: n - 1,
        clamped,
    })
}

/// Elementwise regression residuals `y - X beta`.
pub fn residuals(
    y: ArrayView1<'_, f64>,
    x: ArrayView2<'_, f64>,
    beta: ArrayView1<'_, f64>,
) -> Result<Array1<f64>> {
    let (n, p) = x.dim();
    if y.len() != n {
        return Err(shape(format!("y has length {}, X has {} rows", y.len(), n)));
    }
    if beta.len() != p {
        return Err(shape(format!(
            "beta has length {}, X has {} columns",
            beta.len(),
            p
        )));
    }
    Ok(&y - &x.dot(&beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    #[test]
    fn identity_filter_at_rho_zero() {
        let op = WhiteningOperator::new(0.0).unwrap();
        assert_eq!(op.first_scale(), 1.0);
        let v = array![1.5, -2.0, 0.25];
        let w = op.apply(v.view());
        for (a, b) in v.iter().zip(w.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn first_scale_matches_closed_form() {
        let op = WhiteningOperator::new(0.5).unwrap();
        assert_close(op.first_scale(), 0.8660254037844386, 1e-12);
        assert_close(op.first_scale() * op.first_scale() + 0.25, 1.0, 1e-12);
    }

    #[test]
    fn apply_two_point_example() {
        let op = WhiteningOperator::new(0.5).unwrap();
        let out = op.apply(array![2.0, 3.0].view());
        assert_close(out[0], 1.7320508075688772, 1e-9);
        assert_close(out[1], 2.0, 1e-12);
    }

    #[test]
    fn rejects_unit_root() {
        assert!(WhiteningOperator::new(1.0).is_err());
        assert!(WhiteningOperator::new(-1.0).is_err());
        assert!(WhiteningOperator::new(f64::NAN).is_err());
        assert!(stationary_cholesky(4, 1.0).is_err());
    }

    #[test]
    fn dense_filter_inverts_cholesky() {
        let n = 6;
        for &rho in &[-0.9, -0.5, 0.0, 0.5, 0.9, 0.99] {
            let r = WhiteningOperator::new(rho).unwrap().dense(n);
            let psi = stationary_cholesky(n, rho).unwrap();
            let prod = r.dot(&psi);
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_close(prod[(i, j)], expect, 1e-10);
                }
            }
        }
    }

    #[test]
    fn whitening_recovers_innovations() {
        // epsilon built by the AR recursion from known innovations; the
        // filter must return (a^{-1} eps_1, u_2, ..., u_n) exactly.
        let rho = 0.8_f64;
        let u = array![0.3, -1.1, 0.7, 0.2, -0.5];
        let a = (1.0 - rho * rho).powf(-0.5);
        let mut eps = Array1::zeros(u.len());
        eps[0] = a * u[0];
        for t in 1..u.len() {
            eps[t] = rho * eps[t - 1] + u[t];
        }
        let op = WhiteningOperator::new(rho).unwrap();
        let w = op.apply(eps.view());
        assert_close(w[0], eps[0] / a, 1e-12);
        for t in 1..u.len() {
            assert_close(w[t], u[t], 1e-12);
        }
    }

    #[test]
    fn estimate_ar1_hand_examples() {
        let r = estimate_ar1(array![1.0, 0.0, 1.0, 0.0].view()).unwrap();
        assert_eq!(r.rho_raw, 0.0);
        assert!(!r.clamped);
        assert_eq!(r.n_terms, 3);

        let r = estimate_ar1(array![2.0, 1.0, -1.0, -2.0].view()).unwrap();
        assert_close(r.rho_raw, 0.5, 1e-15);
        assert_eq!(r.rho_used, 0.5);

        let r = estimate_ar1(array![1.0, 2.0, 3.0, 4.0].view()).unwrap();
        assert_close(r.rho_raw, 20.0 / 14.0, 1e-15);
        assert!(r.clamped);
        assert_eq!(r.rho_used, RHO_CAP);
    }

    #[test]
    fn estimate_ar1_degenerate_and_short() {
        assert!(matches!(
            estimate_ar1(array![0.0, 0.0, 0.0, 5.0].view()),
            Err(crate::error::Error::DegenerateInput(_))
        ));
        assert!(estimate_ar1(array![1.0].view()).is_err());
    }

    #[test]
    fn residuals_examples() {
        let x = array![[1.0, 2.0], [0.5, -1.0], [3.0, 0.0]];
        let y = array![1.0, 2.0, 3.0];
        let zero = Array1::zeros(2);
        let r = residuals(y.view(), x.view(), zero.view()).unwrap();
        for (a, b) in r.iter().zip(y.iter()) {
            assert_close(*a, *b, 1e-15);
        }

        let beta = array![2.0, -0.5];
        let fitted = x.dot(&beta);
        let r = residuals(fitted.view(), x.view(), beta.view()).unwrap();
        for v in r.iter() {
            assert_close(*v, 0.0, 1e-12);
        }

        // dense oracle on a tiny instance
        let beta = array![0.3, 1.2];
        let r = residuals(y.view(), x.view(), beta.view()).unwrap();
        for t in 0..3 {
            let expect = y[t] - (x[(t, 0)] * beta[0] + x[(t, 1)] * beta[1]);
            assert_close(r[t], expect, 1e-12);
        }

        assert!(residuals(y.view(), x.view(), array![1.0].view()).is_err());
        assert!(residuals(array![1.0].view(), x.view(), beta.view()).is_err());
    }

    #[test]
    fn estimate_ar1_consistency_improves_with_n() {
        use crate::datagen::{simulate_ar1_noise, InitMode};
        use rand::SeedableRng;

        let rho = 0.9;
        let mut medians = Vec::new();
        for &n in &[100usize, 500, 2000] {
            let mut errs = Vec::new();
            for seed in 0..200u64 {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1000 + seed);
                let (eps, _) =
                    simulate_ar1_noise(n, rho, 1.0, InitMode::Stationary, &mut rng).unwrap();
                let fit = estimate_ar1(eps.view()).unwrap();
                errs.push((fit.rho_raw - rho).abs() / rho);
            }
            errs.sort_by(|a, b| a.total_cmp(b));
            medians.push(0.5 * (errs[99] + errs[100]));
        }
        assert!(
            medians[0] > medians[1] && medians[1] > medians[2],
            "relative-error medians not decreasing: {medians:?}"
        );
    }

    proptest! {
        #[test]
        fn dense_inverse_identity(rho in -0.995f64..0.995, n in 1usize..12) {
            let r = WhiteningOperator::new(rho).unwrap().dense(n);
            let psi = stationary_cholesky(n, rho).unwrap();
            let prod = r.dot(&psi);
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((prod[(i, j)] - expect).abs() < 1e-9);
                }
            }
        }
    }
}
