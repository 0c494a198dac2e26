//! Stationary laws of the factor diffusion.
//!
//! A zero-flux solution of `-(g a)' + 1/2 (g b^2)'' = 0` is the speed density
//! `g(y) ∝ exp(int 2a/b^2) / b^2(y)`. For Family 2 the change of variable
//! `X = 1/R` turns it into `f_X(x) = C x exp(-alpha beta (x - 1/beta)^2)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::RateModelSpec;
use crate::poly::Polynomial;
use crate::quad::{gk15, integrate_range};
use crate::sim::{normal_cdf, PathSet};

type LogDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const NORM_TOL: f64 = 1e-12;
const GRID_POINTS: usize = 1024;

/// A normalized density on an interval, held as an unnormalized log-density.
#[derive(Clone)]
pub struct Density {
    lo: f64,
    hi: f64,
    log_unnorm: LogDensity,
    mode: f64,
    scale: f64,
    norm_const: f64,
    cdf_grid: Vec<(f64, f64)>,
}

impl std::fmt::Debug for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Density")
            .field("support", &(self.lo, self.hi))
            .field("mode", &self.mode)
            .field("scale", &self.scale)
            .field("norm_const", &self.norm_const)
            .finish()
    }
}

/// Interior point at parameter `u` in (0, 1) for the given support and scale.
fn map_unit(lo: f64, hi: f64, center: f64, scale: f64, u: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => lo + (hi - lo) * u,
        (true, false) => lo + scale * u / (1.0 - u),
        (false, true) => hi - scale * (1.0 - u) / u,
        (false, false) => {
            let v = 2.0 * u - 1.0;
            center + scale * v / (1.0 - v.abs())
        }
    }
}

impl Density {
    /// Build from a log-density; `log_unnorm` may be `-inf` but never NaN inside the support.
    pub fn from_log(lo: f64, hi: f64, log_unnorm: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Param(format!("empty support ({lo}, {hi})")));
        }
        let raw: LogDensity = Arc::new(log_unnorm);

        // locate the mode on a coarse mapped grid, then refine by golden section
        let center = if lo.is_finite() && hi.is_finite() { 0.5 * (lo + hi) } else { 0.0 };
        let probe = |u: f64| map_unit(lo, hi, center, 1.0, u);
        let us: Vec<f64> = (1..GRID_POINTS).map(|j| j as f64 / GRID_POINTS as f64).collect();
        let values: Vec<f64> = us.iter().map(|&u| raw(probe(u))).collect();
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Param("log-density is NaN inside the support".into()));
        }
        let best = (0..values.len()).fold(0, |b, j| if values[j] > values[b] { j } else { b });
        if !values[best].is_finite() {
            return Err(Error::Divergence(format!("log-density is {} at its grid maximum", values[best])));
        }
        let (mut a, mut b) = (probe(us[best.saturating_sub(1)]), probe(us[(best + 1).min(us.len() - 1)]));
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let c = b - golden * (b - a);
            let d = a + golden * (b - a);
            if raw(c) >= raw(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let mode = 0.5 * (a + b);
        let peak = raw(mode).max(values[best]);

        // distance from the mode at which the density has dropped by e^2
        let below: Vec<f64> =
            us.iter().zip(&values).filter(|(_, v)| **v < peak - 2.0).map(|(&u, _)| (probe(u) - mode).abs()).collect();
        let scale = below.into_iter().fold(f64::INFINITY, f64::min);
        let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };

        let shifted = {
            let raw = Arc::clone(&raw);
            Arc::new(move |y: f64| raw(y) - peak) as LogDensity
        };
        let mut density = Self { lo, hi, log_unnorm: shifted, mode, scale, norm_const: f64::NAN, cdf_grid: Vec::new() };
        let total = integrate_range(|y| density.unnorm(y), lo, hi, mode, scale, 0.0, NORM_TOL)?;
        if !(total.value > 0.0) || !total.value.is_finite() {
            return Err(Error::Divergence(format!("normalization integral is {}", total.value)));
        }
        density.norm_const = total.value;
        density.cdf_grid = density.build_grid()?;
        Ok(density)
    }

    fn build_grid(&self) -> Result<Vec<(f64, f64)>> {
        let mut grid = Vec::with_capacity(GRID_POINTS);
        let ys: Vec<f64> = (1..GRID_POINTS).map(|j| self.grid_point(j as f64 / GRID_POINTS as f64)).collect();
        let mut acc = self.tail_below(ys[0])?;
        grid.push((ys[0], acc.clamp(0.0, 1.0)));
        for w in ys.windows(2) {
            acc += self.panel(w[0], w[1]);
            let prev = grid.last().map_or(0.0, |g: &(f64, f64)| g.1);
            grid.push((w[1], acc.clamp(prev, 1.0)));
        }
        Ok(grid)
    }

    fn grid_point(&self, u: f64) -> f64 {
        let scale = match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, false) => (self.mode - self.lo).max(self.scale),
            (false, true) => (self.hi - self.mode).max(self.scale),
            _ => self.scale,
        };
        map_unit(self.lo, self.hi, self.mode, scale, u)
    }

    /// Probability mass below `y`, by direct quadrature.
    fn tail_below(&self, y: f64) -> Result<f64> {
        let r = integrate_range(|t| self.pdf(t), self.lo, y, self.mode.min(y), self.scale, 1e-15, 1e-13)?;
        Ok(r.value)
    }

    fn tail_above(&self, y: f64) -> Result<f64> {
        let r = integrate_range(|t| self.pdf(t), y, self.hi, self.mode.max(y), self.scale, 1e-15, 1e-13)?;
        Ok(r.value)
    }

    /// Mass between two nearby points; adaptive when one rule is not enough.
    fn panel(&self, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        let mut f = |t: f64| self.pdf(t);
        let (v, e) = gk15(&mut f, a, b);
        if e <= 1e-15 + 1e-13 * v.abs() {
            return v;
        }
        crate::quad::integrate(f, a, b, 1e-16, 1e-13).map_or(v, |r| r.value)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
    pub fn mode(&self) -> f64 {
        self.mode
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    /// Integral of the stored unnormalized density.
    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }
    pub fn cdf_grid(&self) -> &[(f64, f64)] {
        &self.cdf_grid
    }

    /// Unnormalized density, equal to 1 at the mode and 0 off the open support.
    pub fn unnorm(&self, y: f64) -> f64 {
        if !(y > self.lo && y < self.hi) {
            return 0.0;
        }
        (self.log_unnorm)(y).exp()
    }

    pub fn pdf(&self, y: f64) -> f64 {
        self.unnorm(y) / self.norm_const
    }

    /// Re-quadrature of the normalized density; 1 up to quadrature error.
    pub fn total_mass(&self) -> Result<f64> {
        Ok(integrate_range(|y| self.pdf(y), self.lo, self.hi, self.mode, self.scale, 0.0, NORM_TOL)?.value)
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y <= self.lo {
            return 0.0;
        }
        if y >= self.hi {
            return 1.0;
        }
        let idx = self.cdf_grid.partition_point(|g| g.0 <= y);
        let value = if idx == 0 {
            self.tail_below(y).unwrap_or(0.0)
        } else {
            let (y0, f0) = self.cdf_grid[idx - 1];
            if idx == self.cdf_grid.len() {
                1.0 - self.tail_above(y).unwrap_or(0.0)
            } else {
                f0 + self.panel(y0, y)
            }
        };
        value.clamp(0.0, 1.0)
    }

    /// Inverse CDF by bisection inside the bracketing grid cell.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let idx = self.cdf_grid.partition_point(|g| g.1 <= p);
        let (mut a, mut b) = if idx == 0 {
            let b = self.cdf_grid[0].0;
            let mut a = b - self.scale;
            while a > self.lo && self.cdf(a) > p {
                a -= 2.0 * (b - a);
            }
            (a.max(self.lo), b)
        } else if idx == self.cdf_grid.len() {
            let a = self.cdf_grid[idx - 1].0;
            let mut b = a + self.scale;
            while b < self.hi && self.cdf(b) < p {
                b += 2.0 * (b - a);
            }
            (a, b.min(self.hi))
        } else {
            (self.cdf_grid[idx - 1].0, self.cdf_grid[idx].0)
        };
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.cdf(m) < p {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// `(y, pdf, cdf)` rows on the tabulation grid.
    pub fn table(&self) -> Vec<[f64; 3]> {
        self.cdf_grid.iter().map(|&(y, c)| [y, self.pdf(y), c]).collect()
    }
}

/// `log(1/b^2) + int 2a/b^2`, exact when `b^2` is a single monomial.
fn speed_log_density(a: &Polynomial, b2: &Polynomial, reference: f64) -> Box<dyn Fn(f64) -> f64 + Send + Sync> {
    let b2c = b2.coeffs().to_vec();
    let nonzero: Vec<usize> = (0..b2c.len()).filter(|&i| b2c[i] != 0.0).collect();
    let b2p = b2.clone();
    if let [m] = nonzero[..] {
        // 2a / (c z^m) is a Laurent polynomial with a closed-form antiderivative
        let c = b2c[m];
        let terms: Vec<(i64, f64)> = a
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, ai)| (i as i64 - m as i64, 2.0 * ai / c))
            .filter(|(_, w)| *w != 0.0)
            .collect();
        return Box::new(move |y: f64| {
            let integral: f64 = terms
                .iter()
                .map(|&(p, w)| if p == -1 { w * y.abs().ln() } else { w * y.powi((p + 1) as i32) / (p + 1) as f64 })
                .sum();
            integral - b2p.eval_f64(y).ln()
        });
    }
    let a = a.clone();
    Box::new(move |y: f64| {
        let ratio = |t: f64| 2.0 * a.eval_f64(t) / b2p.eval_f64(t);
        let (lo, hi, sign) = if y >= reference { (reference, y, 1.0) } else { (y, reference, -1.0) };
        // roundoff near a root of b2 can stall a tight request; relax once before giving up
        let integral = crate::quad::integrate(ratio, lo, hi, 1e-14, 1e-12)
            .or_else(|_| crate::quad::integrate(ratio, lo, hi, 1e-12, 1e-9))
            .map_or(f64::NAN, |r| r.value);
        sign * integral - b2p.eval_f64(y).ln()
    })
}

/// Speed-measure density of `dZ = a dt + sqrt(b2) dW` on `support`.
pub fn stationary_density_from(a: &Polynomial, b2: &Polynomial, support: (f64, f64)) -> Result<Density> {
    let (lo, hi) = support;
    if !(lo < hi) {
        return Err(Error::Param(format!("empty support ({lo}, {hi})")));
    }
    let center = if lo.is_finite() && hi.is_finite() { 0.5 * (lo + hi) } else { 0.0 };
    for j in 1..256 {
        let y = map_unit(lo, hi, center, 1.0, j as f64 / 256.0);
        if !(b2.eval_f64(y) > 0.0) {
            return Err(Error::NegativeDiffusion(y));
        }
    }
    let reference = map_unit(lo, hi, center, 1.0, 0.5);
    let log = speed_log_density(a, b2, reference);
    Density::from_log(lo, hi, log)
}

pub fn stationary_density(spec: &RateModelSpec, support: (f64, f64)) -> Result<Density> {
    let (a, b2, _) = spec.float_polys();
    stationary_density_from(&a, &b2, support)
}

fn check_family2(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::Param(format!("alpha and beta must be positive, got {alpha}, {beta}")));
    }
    Ok(())
}

/// `f_X(x) ∝ x exp(-alpha beta (x - 1/beta)^2)` on `(0, inf)`, normalized by quadrature.
pub fn family2_x_density(alpha: f64, beta: f64) -> Result<Density> {
    check_family2(alpha, beta)?;
    let c = alpha * beta;
    let mu = 1.0 / beta;
    Density::from_log(0.0, f64::INFINITY, move |x: f64| x.ln() - c * (x - mu) * (x - mu))
}

/// `int_0^inf x exp(-alpha beta (x - 1/beta)^2) dx` in closed form.
pub fn family2_normalizer(alpha: f64, beta: f64) -> f64 {
    let c = alpha * beta;
    let mu = 1.0 / beta;
    (-alpha / beta).exp() / (2.0 * c) + mu * (std::f64::consts::PI / c).sqrt() * normal_cdf(mu * (2.0 * c).sqrt())
}

/// Mode of `f_X`, the positive root of `1/x - 2 alpha beta (x - 1/beta)`.
pub fn family2_x_mode(alpha: f64, beta: f64) -> f64 {
    (1.0 + (1.0 + 2.0 * beta / alpha).sqrt()) / (2.0 * beta)
}

/// `P[R <= r] = P[X >= 1/r]` in closed form.
pub fn family2_cdf(alpha: f64, beta: f64, r: f64) -> Result<f64> {
    check_family2(alpha, beta)?;
    if !(r > 0.0) {
        return Err(Error::Param(format!("rate level must be positive, got {r}")));
    }
    let c = alpha * beta;
    let mu = 1.0 / beta;
    let x = 1.0 / r;
    let gauss_tail = 0.5 * libm::erfc((x - mu) * c.sqrt());
    let upper = (-c * (x - mu) * (x - mu)).exp() / (2.0 * c) + mu * (std::f64::consts::PI / c).sqrt() * gauss_tail;
    Ok((upper / family2_normalizer(alpha, beta)).clamp(0.0, 1.0))
}

/// Largest `|-(g a)' + 1/2 (g b^2)''|` over `points`, by central differences.
pub fn fokker_planck_residual(d: &Density, a: &Polynomial, b2: &Polynomial, points: &[f64]) -> f64 {
    let flux = |y: f64| d.pdf(y) * a.eval_f64(y);
    let diff = |y: f64| d.pdf(y) * b2.eval_f64(y);
    points
        .iter()
        .map(|&y| {
            let h = 1e-4 * (y.abs() + 1e-2 * d.scale());
            let first = (flux(y + h) - flux(y - h)) / (2.0 * h);
            let second = (diff(y + h) - 2.0 * diff(y) + diff(y - h)) / (h * h);
            (-first + 0.5 * second).abs()
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov–Smirnov distance between `samples` and the CDF of `d`.
pub fn ks_statistic(samples: &[f64], d: &Density) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (i, &x) in sorted.iter().enumerate() {
        let f = match prev {
            Some((px, pf)) if px == x => pf,
            Some((px, pf)) if px > d.lo && x - px < d.scale() => (pf + d.panel(px, x)).clamp(0.0, 1.0),
            _ => d.cdf(x),
        };
        prev = Some((x, f));
        worst = worst.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    worst
}

/// KS distance of the recorded samples at or after `burn_in` from `d`.
pub fn ks_distance(paths: &PathSet, d: &Density, burn_in: f64) -> Result<f64> {
    let horizon = paths.meta().config.horizon;
    if !(horizon > burn_in) {
        return Err(Error::Config(format!("burn-in {burn_in} must be shorter than the horizon {horizon}")));
    }
    let samples = paths.samples_after(burn_in);
    Ok(ks_statistic(&samples, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_family, params, Family};
    use crate::model::ModelSpec;
    use crate::quad::integrate_upper;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn family2() -> RateModelSpec {
        match build_family(Family::Rate2, &params(&[("alpha", "0.1"), ("beta", "0.05")]).unwrap()).unwrap() {
            ModelSpec::Rate(s) => s,
            _ => unreachable!(),
        }
    }

    #[test]
    fn ou_gives_standard_normal() {
        let a = Polynomial::from(vec![0.0, -1.0]);
        let b2 = Polynomial::from(vec![2.0]);
        let d = stationary_density_from(&a, &b2, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        for y in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            let exact = (-y * y / 2.0f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((d.pdf(y) - exact).abs() < 1e-12, "y={y}");
            assert!((d.cdf(y) - normal_cdf(y)).abs() < 1e-11, "y={y}: {} vs {}", d.cdf(y), normal_cdf(y));
        }
        assert!(d.mode().abs() < 1e-6);
        assert!((d.quantile(0.975) - 1.959963984540054).abs() < 1e-9);
    }

    #[test]
    fn brownian_motion_has_no_stationary_law() {
        let a = Polynomial::from(vec![0.0]);
        let b2 = Polynomial::from(vec![1.0]);
        let err = stationary_density_from(&a, &b2, (f64::NEG_INFINITY, f64::INFINITY)).unwrap_err();
        assert!(matches!(err, Error::Divergence(_)), "{err}");
    }

    #[test]
    fn family2_matches_cubic_inverse_form() {
        let d = stationary_density(&family2(), (0.0, f64::INFINITY)).unwrap();
        let shape = |r: f64| r.powi(-3) * (2.0 * 0.1 / r - 0.005 / (r * r)).exp();
        let ratio = d.pdf(0.05) / shape(0.05);
        for r in [0.01, 0.03, 0.2, 1.0] {
            assert!((d.pdf(r) / shape(r) / ratio - 1.0).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn closed_form_normalizer_matches_quadrature_oracle() {
        for (alpha, beta) in [(0.1, 0.05), (1.0, 1.0), (0.3, 2.0), (5.0, 0.01)] {
            let oracle = integrate_upper(
                |x| x * (-alpha * beta * (x - 1.0 / beta) * (x - 1.0 / beta)).exp(),
                0.0,
                1.0 / beta,
                0.0,
                1e-13,
            )
            .unwrap()
            .value;
            let closed = family2_normalizer(alpha, beta);
            assert!((closed / oracle - 1.0).abs() < 1e-11, "({alpha},{beta}): {closed} vs {oracle}");
            let d = family2_x_density(alpha, beta).unwrap();
            // unnorm is scaled to 1 at the mode
            let peak = family2_x_mode(alpha, beta);
            let at_peak = peak * (-alpha * beta * (peak - 1.0 / beta).powi(2)).exp();
            assert!((d.norm_const() * at_peak / oracle - 1.0).abs() < 1e-10);
            assert!((d.total_mass().unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn family2_mode_is_the_stationary_point() {
        for (alpha, beta) in [(0.1, 0.05), (2.0, 0.5)] {
            let x = family2_x_mode(alpha, beta);
            assert!((1.0 / x - 2.0 * alpha * beta * (x - 1.0 / beta)).abs() < 1e-12);
            let d = family2_x_density(alpha, beta).unwrap();
            assert!((d.mode() - x).abs() < 1e-6 * x, "{} vs {x}", d.mode());
        }
        let d = family2_x_density(0.1, 0.05).unwrap();
        assert_eq!(d.pdf(0.0), 0.0);
        assert!(d.pdf(1e-12) < 1e-12);
    }

    #[test]
    fn closed_form_cdf_matches_direct_quadrature() {
        let (alpha, beta) = (0.1, 0.05);
        let c = family2_normalizer(alpha, beta);
        let fx = |x: f64| x * (-alpha * beta * (x - 1.0 / beta) * (x - 1.0 / beta)).exp() / c;
        for r in [0.01, 0.03, 0.05, 0.1, 0.5, 2.0] {
            let above = integrate_upper(fx, 1.0 / r, 1.0 / beta, 0.0, 1e-14).unwrap().value;
            let cdf = family2_cdf(alpha, beta, r).unwrap();
            assert!((cdf - above).abs() < 1e-12, "r={r}: {cdf} vs {above}");
        }
        assert!(family2_cdf(alpha, beta, 1e-6).unwrap() < 1e-12);
        assert!((family2_cdf(alpha, beta, 1e9).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_cdf_matches_rate_density() {
        let d = stationary_density(&family2(), (0.0, f64::INFINITY)).unwrap();
        for r in [0.01, 0.02, 0.05, 0.1, 0.3, 1.0] {
            let closed = family2_cdf(0.1, 0.05, r).unwrap();
            assert!((d.cdf(r) - closed).abs() < 1e-9, "r={r}: {} vs {closed}", d.cdf(r));
            let h = 1e-5 * r;
            let slope = (family2_cdf(0.1, 0.05, r + h).unwrap() - family2_cdf(0.1, 0.05, r - h).unwrap()) / (2.0 * h);
            assert!((slope / d.pdf(r) - 1.0).abs() < 1e-5, "r={r}");
        }
    }

    #[test]
    fn change_of_variables_is_consistent() {
        let fx = family2_x_density(0.1, 0.05).unwrap();
        let fr = stationary_density(&family2(), (0.0, f64::INFINITY)).unwrap();
        for j in 0..=50 {
            let r = 0.01 * (100f64).powf(j as f64 / 50.0);
            let pushed = fx.pdf(1.0 / r) / (r * r);
            assert!((pushed / fr.pdf(r) - 1.0).abs() < 1e-8, "r={r}");
        }
    }

    #[test]
    fn forward_equation_holds() {
        let spec = family2();
        let (a, b2, _) = spec.float_polys();
        let d = stationary_density(&spec, (0.0, f64::INFINITY)).unwrap();
        let points: Vec<f64> = (0..100).map(|j| d.quantile((j as f64 + 0.5) / 100.0)).collect();
        let peak = d.pdf(d.mode());
        assert!(fokker_planck_residual(&d, &a, &b2, &points) <= 1e-4 * peak);

        // non-monomial diffusion goes through the numerical antiderivative
        let a = Polynomial::from(vec![0.015, -0.5]);
        let b2 = Polynomial::from(vec![0.0, 0.0048, -0.14, 1.0]);
        let d = stationary_density_from(&a, &b2, (0.0, 0.06)).unwrap();
        assert!((d.total_mass().unwrap() - 1.0).abs() < 1e-8);
        let points: Vec<f64> = (0..100).map(|j| d.quantile((j as f64 + 0.5) / 100.0)).collect();
        let peak = d.pdf(d.mode());
        assert!(fokker_planck_residual(&d, &a, &b2, &points) <= 1e-4 * peak);
    }

    #[test]
    fn ks_of_exact_draws_is_small() {
        let d = family2_x_density(0.1, 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10_000;
        let draws: Vec<f64> = (0..n).map(|_| d.quantile(rng.random::<f64>())).collect();
        let ks = ks_statistic(&draws, &d);
        assert!(ks < 1.63 / (n as f64).sqrt(), "{ks}");
    }

    #[test]
    fn ks_of_constant_sample_is_large() {
        let d = family2_x_density(0.1, 0.05).unwrap();
        let ks = ks_statistic(&vec![d.quantile(0.5); 1000], &d);
        assert!((ks - 0.5).abs() < 1e-6, "{ks}");
        let ks = ks_statistic(&[1e6; 100], &d);
        assert!(ks > 0.999);
    }
}
