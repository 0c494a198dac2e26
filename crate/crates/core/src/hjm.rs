//! No-arbitrage checks on integrated forward variance `G(x, theta, z)`, the
//! degree bound for bond-price models, and the power/call replication identities.

use std::f64::consts::PI;
use std::sync::Arc;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::quad::{integrate, integrate_upper};
use crate::vol::{horner, VolEngine};

/// Relative finite-difference step.
pub const FD_STEP: f64 = 1e-5;

/// `(x, theta, z) -> G`.
pub type GFunction = Arc<dyn Fn(f64, f64, f64) -> Result<f64> + Send + Sync>;

/// Factor dynamics with the integrated forward variance they are meant to support.
#[derive(Clone)]
pub struct ForwardVarianceSpec {
    pub a: Polynomial,
    pub b2: Polynomial,
    pub bh: Polynomial,
    pub h2: Polynomial,
    pub g: GFunction,
}

impl std::fmt::Debug for ForwardVarianceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ForwardVarianceSpec")
            .field("a", &self.a)
            .field("b2", &self.b2)
            .field("bh", &self.bh)
            .field("h2", &self.h2)
            .finish_non_exhaustive()
    }
}

impl ForwardVarianceSpec {
    pub fn new(a: Polynomial, b2: Polynomial, bh: Polynomial, h2: Polynomial, g: GFunction) -> Self {
        Self { a, b2, bh, h2, g }
    }

    pub fn eval_g(&self, x: f64, theta: f64, z: f64) -> Result<f64> {
        (self.g)(x, theta, z)
    }

    /// Constant forward variance: `G = sigma2 x` under any factor dynamics.
    pub fn black_scholes(sigma2: f64, a: Polynomial, b2: Polynomial, bh: Polynomial) -> Self {
        Self::new(a, b2, bh, Polynomial::from(vec![sigma2]), Arc::new(move |x, _, _| Ok(sigma2 * x)))
    }

    /// `G = -2/(theta(1-theta)) log(sum k_i(x, theta) z^i)` from a solved vol model.
    pub fn from_engine(engine: Arc<VolEngine>) -> Self {
        let spec = engine.spec();
        let f = |p: &crate::poly::RatPoly| p.to_f64();
        let (a, b2, bh, h2) = (f(spec.a()), f(spec.b2()), f(spec.bh()), f(spec.h2()));
        let g: GFunction = Arc::new(move |x, theta, z| {
            let theta = engine.spec().theta_from_f64(theta)?;
            let k = engine.solve_k(theta, x)?;
            let level = horner(k.as_slice(), z);
            if !(level > 0.0) {
                return Err(Error::NonPositivePrice { price: level, ttm: x, z });
            }
            let t = theta.value();
            Ok(-2.0 / (t * (1.0 - t)) * level.ln())
        });
        Self::new(a, b2, bh, h2, g)
    }
}

fn step(v: f64) -> f64 {
    FD_STEP * v.abs().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Partials {
    gx: f64,
    gz: f64,
    gzz: f64,
}

fn partials(spec: &ForwardVarianceSpec, x: f64, theta: f64, z: f64) -> Result<Partials> {
    let (hx, hz) = (step(x), step(z));
    let g = |x, z| spec.eval_g(x, theta, z);
    let gx = (g(x + hx, z)? - g(x - hx, z)?) / (2.0 * hx);
    let (up, mid, down) = (g(x, z + hz)?, g(x, z)?, g(x, z - hz)?);
    Ok(Partials { gx, gz: (up - down) / (2.0 * hz), gzz: (up - 2.0 * mid + down) / (hz * hz) })
}

/// `G_x - [b2/2 (G_zz - theta(1-theta)/2 G_z^2) + (theta bh + a) G_z + h2]`.
pub fn pointwise_drift_residual(spec: &ForwardVarianceSpec, x: f64, theta: f64, z: f64) -> Result<f64> {
    let p = partials(spec, x, theta, z)?;
    let c = 0.5 * theta * (1.0 - theta);
    let rhs = 0.5 * spec.b2.eval_f64(z) * (p.gzz - c * p.gz * p.gz)
        + (theta * spec.bh.eval_f64(z) + spec.a.eval_f64(z)) * p.gz
        + spec.h2.eval_f64(z);
    Ok(p.gx - rhs)
}

/// Largest residual over a sample batch and the sample attaining it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub check: String,
    pub max: f64,
    pub argmax: Vec<f64>,
    pub n_samples: usize,
}

impl ResidualReport {
    fn from_residuals(check: &str, samples: Vec<Vec<f64>>, residuals: Vec<f64>) -> Self {
        let (mut max, mut argmax) = (0.0, Vec::new());
        for (s, r) in samples.into_iter().zip(&residuals) {
            // NaN must surface rather than lose every comparison
            if r.abs() > max || r.is_nan() || argmax.is_empty() {
                max = r.abs();
                argmax = s;
                if r.is_nan() {
                    break;
                }
            }
        }
        Self { check: check.to_string(), max, argmax, n_samples: residuals.len() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Drift condition residual over `(x, theta, z)` samples.
pub fn drift_residual(spec: &ForwardVarianceSpec, samples: &[(f64, f64, f64)]) -> Result<ResidualReport> {
    let residuals =
        samples.par_iter().map(|&(x, t, z)| pointwise_drift_residual(spec, x, t, z)).collect::<Result<Vec<f64>>>()?;
    let points = samples.iter().map(|&(x, t, z)| vec![x, t, z]).collect();
    Ok(ResidualReport::from_residuals("drift", points, residuals))
}

/// `|dG/dx(0, theta, z) - h2(z)|` over `(theta, z)` samples, using a one-sided stencil at `x = 0`.
pub fn spot_variance_check(spec: &ForwardVarianceSpec, samples: &[(f64, f64)]) -> Result<ResidualReport> {
    let h = FD_STEP;
    let residuals = samples
        .par_iter()
        .map(|&(t, z)| {
            let g = |x| spec.eval_g(x, t, z);
            let gx = (-3.0 * g(0.0)? + 4.0 * g(h)? - g(2.0 * h)?) / (2.0 * h);
            Ok(gx - spec.h2.eval_f64(z))
        })
        .collect::<Result<Vec<f64>>>()?;
    let points = samples.iter().map(|&(t, z)| vec![t, z]).collect();
    Ok(ResidualReport::from_residuals("spot-variance", points, residuals))
}

/// Whether an arbitrage-free bond-price model of order `n` can carry a `b2` of degree `deg_b2`.
///
/// The top coefficient generator entry grows like `b2 n^2 z^(2n-2)` and must stay in `F_n`.
pub fn max_degree_feasible(n: usize, deg_b2: usize) -> bool {
    deg_b2 + 2 * n <= n + 2
}

/// Default tolerance of the replication quadratures.
pub const REPLICATION_TOL: f64 = 1e-12;

/// `theta(1-theta) int_0^inf min(s, K) K^(theta-2) dK`, which equals `s^theta`.
pub fn replicate_power_from_calls(s: f64, theta: f64) -> Result<f64> {
    replicate_power_from_calls_tol(s, theta, REPLICATION_TOL)
}

/// As [`replicate_power_from_calls`] with an explicit relative tolerance.
pub fn replicate_power_from_calls_tol(s: f64, theta: f64, tol: f64) -> Result<f64> {
    check_power_args(s, theta)?;
    if !(tol > 0.0) {
        return Err(Error::Param(format!("tolerance must be positive, got {tol}")));
    }
    let scale = s.powf(theta);
    // K = s e^-t below the split and K = s e^t above it
    let below = integrate_upper(|t| (-theta * t).exp(), 0.0, 1.0 / theta, tol, tol)?;
    let above = integrate_upper(|t| ((theta - 1.0) * t).exp(), 0.0, 1.0 / (1.0 - theta), tol, tol)?;
    Ok(theta * (1.0 - theta) * scale * (below.value + above.value))
}

fn check_power_args(s: f64, theta: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Param(format!("s must be positive, got {s}")));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Param(format!("theta must lie in (0, 1), got {theta}")));
    }
    Ok(())
}

/// Default truncation tolerance of [`replicate_min_from_power`].
pub const MIN_TAIL_TOL: f64 = 1e-4;

/// Bound on the neglected `|x| > x_max` part of the power-claim representation of `min(s, K)`.
pub fn min_from_power_tail(s: f64, strike: f64, theta: f64, x_max: f64) -> f64 {
    let log_moneyness = (s / strike).ln();
    let amplitude = strike * (s / strike).powf(theta) / PI;
    let plain = 1.0 / x_max;
    if log_moneyness == 0.0 {
        return amplitude * plain;
    }
    // one integration by parts on the oscillating factor
    amplitude * plain.min(2.0 / (log_moneyness.abs() * x_max * x_max))
}

/// `(1/2pi) int s^(theta+ix) K^(1-theta-ix) / ((x - i theta)(x + i(1-theta))) dx` truncated to `|x| <= x_max`.
pub fn replicate_min_from_power(s: f64, strike: f64, theta: f64, x_max: f64) -> Result<f64> {
    replicate_min_from_power_tol(s, strike, theta, x_max, MIN_TAIL_TOL)
}

pub fn replicate_min_from_power_tol(s: f64, strike: f64, theta: f64, x_max: f64, tail_tol: f64) -> Result<f64> {
    check_power_args(s, theta)?;
    if !(strike > 0.0 && strike.is_finite()) {
        return Err(Error::Param(format!("strike must be positive, got {strike}")));
    }
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::Param(format!("x_max must be positive, got {x_max}")));
    }
    let tail = min_from_power_tail(s, strike, theta, x_max);
    if tail > tail_tol {
        return Err(Error::Truncation { tail, tol: tail_tol });
    }
    let log_moneyness = (s / strike).ln();
    let amplitude = strike * (s / strike).powf(theta);
    let re = |x: f64| {
        let phase = Complex64::from_polar(1.0, x * log_moneyness);
        let denom = Complex64::new(x, -theta) * Complex64::new(x, 1.0 - theta);
        (phase / denom).re
    };
    // the integrand is conjugate-symmetric, so integrate the real part over [0, x_max] twice
    let mut total = 0.0;
    let (mut lo, mut hi) = (0.0, 1.0f64.min(x_max));
    // pieces of at most 16 periods keep every piece within the subdivision budget
    let period = if log_moneyness == 0.0 { f64::INFINITY } else { 2.0 * PI / log_moneyness.abs() };
    loop {
        let pieces = ((hi - lo) / (16.0 * period)).ceil().max(1.0);
        let width = (hi - lo) / pieces;
        for j in 0..pieces as usize {
            let a = lo + width * j as f64;
            let b = if j + 1 == pieces as usize { hi } else { a + width };
            total += integrate(re, a, b, 1e-13, 1e-12)?.value;
        }
        if hi >= x_max {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(x_max);
    }
    Ok(amplitude * total / PI)
}

/// Integrated forward variance of a Heston-type model, `G = A(x, theta) z + B(x, theta)`,
/// from the Riccati system the drift condition reduces to:
///
/// `A' = 1 + (theta rho sigma - kappa) A - theta(1-theta)/4 sigma^2 A^2`, `B' = kappa m A`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HestonOracle {
    pub kappa: f64,
    pub mean: f64,
    pub sigma: f64,
    pub rho: f64,
    /// RK4 steps per evaluation.
    pub steps: usize,
}

impl HestonOracle {
    pub fn new(kappa: f64, mean: f64, sigma: f64, rho: f64) -> Result<Self> {
        if !(kappa >= 0.0 && mean >= 0.0 && sigma >= 0.0 && rho.abs() <= 1.0) {
            return Err(Error::Param(format!(
                "need kappa, mean, sigma >= 0 and |rho| <= 1, got {kappa}, {mean}, {sigma}, {rho}"
            )));
        }
        Ok(Self { kappa, mean, sigma, rho, steps: 2000 })
    }

    /// `(A(x), B(x))` by classical Runge–Kutta from zero.
    pub fn solve(&self, x: f64, theta: f64) -> (f64, f64) {
        let c = 0.25 * theta * (1.0 - theta) * self.sigma * self.sigma;
        let lin = theta * self.rho * self.sigma - self.kappa;
        let rhs = |a: f64| (1.0 + lin * a - c * a * a, self.kappa * self.mean * a);
        let h = x / self.steps as f64;
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..self.steps {
            let k1 = rhs(a);
            let k2 = rhs(a + 0.5 * h * k1.0);
            let k3 = rhs(a + 0.5 * h * k2.0);
            let k4 = rhs(a + h * k3.0);
            a += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            b += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        (a, b)
    }

    /// Factor drift `kappa(m - z)`, `b2 = sigma^2 z`, `bh = rho sigma z`, `h2 = z`.
    pub fn spec(self) -> ForwardVarianceSpec {
        let a = Polynomial::from(vec![self.kappa * self.mean, -self.kappa]);
        let b2 = Polynomial::from(vec![0.0, self.sigma * self.sigma]);
        let bh = Polynomial::from(vec![0.0, self.rho * self.sigma]);
        let h2 = Polynomial::from(vec![0.0, 1.0]);
        ForwardVarianceSpec::new(
            a,
            b2,
            bh,
            h2,
            Arc::new(move |x, theta, z| {
                let (a, b) = self.solve(x, theta);
                Ok(a * z + b)
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_family, params, Family};
    use crate::model::ModelSpec;

    fn grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
    }

    #[test]
    fn black_scholes_is_exact_and_perturbation_is_caught() {
        let a = Polynomial::from(vec![0.3, -1.0]);
        let b2 = Polynomial::from(vec![0.0, 0.2]);
        let bh = Polynomial::from(vec![0.1]);
        let spec = ForwardVarianceSpec::black_scholes(0.04, a.clone(), b2.clone(), bh.clone());
        let samples: Vec<_> = grid(5, 0.1, 3.0).map(|x| (x, 0.3, 0.2 + x / 10.0)).collect();
        assert!(drift_residual(&spec, &samples).unwrap().max < 1e-12);
        assert!(spot_variance_check(&spec, &[(0.3, 0.2), (0.7, 0.5)]).unwrap().max < 1e-12);

        let eps = 1e-3;
        let bumped = ForwardVarianceSpec::new(
            a.clone(),
            b2,
            bh.clone(),
            spec.h2.clone(),
            Arc::new(move |x, _, z| Ok(0.04 * x + eps * z)),
        );
        for &(x, t, z) in &samples {
            let r = pointwise_drift_residual(&bumped, x, t, z).unwrap();
            let expected = -(t * bh.eval_f64(z) + a.eval_f64(z)) * eps;
            assert!((r - expected).abs() < 1e-8, "{r} vs {expected}");
        }
    }

    #[test]
    fn perturbed_h2_shows_in_spot_variance() {
        let zero = Polynomial::from(vec![0.0]);
        let mut spec = ForwardVarianceSpec::black_scholes(0.04, zero.clone(), zero.clone(), zero);
        spec.h2 = Polynomial::from(vec![0.04 + 2.5e-3]);
        let r = spot_variance_check(&spec, &[(0.5, 0.1)]).unwrap();
        assert!((r.max - 2.5e-3).abs() < 1e-10, "{}", r.max);
    }

    #[test]
    fn heston_oracle_satisfies_both_conditions() {
        let spec = HestonOracle::new(1.5, 0.04, 0.5, -0.7).unwrap().spec();
        let samples: Vec<_> = grid(6, 0.2, 4.0).zip(grid(6, 0.1, 0.9)).map(|(x, t)| (x, t, 0.02 + 0.01 * x)).collect();
        let rep = drift_residual(&spec, &samples).unwrap();
        assert!(rep.max <= 1e-5, "{rep:?}");
        let rep = spot_variance_check(&spec, &[(0.2, 0.03), (0.5, 0.09), (0.9, 0.01)]).unwrap();
        assert!(rep.max <= 1e-5, "{rep:?}");
    }

    #[test]
    fn riccati_reduces_to_closed_form_without_vol_of_vol() {
        // sigma = 0: A = (1 - e^-kx)/k
        let o = HestonOracle::new(2.0, 0.05, 0.0, 0.0).unwrap();
        let (a, b) = o.solve(1.5, 0.4);
        let exact_a = (1.0 - (-3.0f64).exp()) / 2.0;
        let exact_b = 2.0 * 0.05 * (1.5 - exact_a) / 2.0;
        assert!((a - exact_a).abs() < 1e-13 && (b - exact_b).abs() < 1e-13, "{a} {b}");
    }

    #[test]
    fn degree_bound() {
        assert!(max_degree_feasible(1, 0));
        assert!(max_degree_feasible(2, 0));
        assert!(!max_degree_feasible(3, 0));
        assert!(max_degree_feasible(1, 1) && max_degree_feasible(2, 0) && !max_degree_feasible(2, 1));
        for d in 0..6 {
            for n in 1..20 {
                assert!(max_degree_feasible(n, d) || !max_degree_feasible(n + 1, d));
            }
        }
    }

    #[test]
    fn power_replication_examples() {
        assert!((replicate_power_from_calls(1.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((replicate_power_from_calls(4.0, 0.5).unwrap() - 2.0).abs() < 1e-12);
        assert!(replicate_power_from_calls(1.0, 1.0).is_err());
        assert!(replicate_power_from_calls(0.0, 0.5).is_err());
    }

    #[test]
    fn min_replication_examples() {
        for (s, k, want) in [(1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (0.5, 1.0, 0.5)] {
            let v = replicate_min_from_power(s, k, 0.5, 1e4).unwrap();
            assert!((v - want).abs() < 1e-4, "s={s}, K={k}: {v}");
        }
    }

    #[test]
    fn min_replication_rejects_short_truncation() {
        assert!(matches!(replicate_min_from_power(1.0, 1.0, 0.5, 10.0), Err(Error::Truncation { .. })));
    }

    #[test]
    fn vol_engine_solution_satisfies_drift_condition() {
        let p = params(&[
            ("N", "10"),
            ("h0", "0.01"),
            ("alpha1", "0.02"),
            ("alpha2", "0.2"),
            ("beta", "0.5"),
            ("gamma", "0.1"),
        ])
        .unwrap();
        let ModelSpec::Vol(spec) = build_family(Family::Vol6, &p).unwrap() else { unreachable!() };
        let engine = Arc::new(VolEngine::new(spec).unwrap());
        let fv = ForwardVarianceSpec::from_engine(engine);
        let samples: Vec<_> = (1..10).map(|i| (0.1 * i as f64, i as f64 / 10.0, 0.01 * i as f64)).collect();
        let rep = drift_residual(&fv, &samples).unwrap();
        assert!(rep.max <= 1e-5, "{rep:?}");
        let rep = spot_variance_check(&fv, &[(0.3, 0.05), (0.5, 0.01)]).unwrap();
        assert!(rep.max <= 1e-5, "{rep:?}");
    }

    #[test]
    fn report_points_at_worst_sample() {
        let rep = ResidualReport::from_residuals("t", vec![vec![1.0], vec![2.0], vec![3.0]], vec![0.1, -0.5, 0.2]);
        assert_eq!((rep.max, rep.argmax.clone()), (0.5, vec![2.0]));
        assert!(rep.to_json().contains("\"argmax\""));
    }
}
