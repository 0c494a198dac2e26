//! Model specifications and the exact no-arbitrage coefficient constraints.
//!
//! A rate model prices bonds as `P = sum g_i(T-t) Z^i` with short rate `R(Z)`;
//! a vol model prices power options as `S^theta sum k_i(T-t, theta) Z^i` for
//! every `theta = i/N` on a grid. Both are consistent only when a handful of
//! linear identities among the polynomial coefficients hold exactly, so all
//! checks here run in rational arithmetic.

use std::fmt;

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, ratio};
use crate::poly::{Polynomial, RatPoly};

/// Number of uniform sample points used for sign checks on the domain.
pub const SIGN_SAMPLES: usize = 1024;

/// State space of the factor: a closed interval, half-line or the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    lo: Option<BigRational>,
    hi: Option<BigRational>,
}

impl Domain {
    pub fn new(lo: Option<BigRational>, hi: Option<BigRational>) -> Result<Self> {
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                return Err(Error::Param(format!(
                    "domain lower end {} exceeds upper end {}",
                    exact::format_rational(l),
                    exact::format_rational(h)
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(lo: BigRational, hi: BigRational) -> Result<Self> {
        Self::new(Some(lo), Some(hi))
    }

    pub fn half_line(lo: BigRational) -> Self {
        Self { lo: Some(lo), hi: None }
    }

    pub fn real_line() -> Self {
        Self { lo: None, hi: None }
    }

    pub fn lo(&self) -> Option<&BigRational> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&BigRational> {
        self.hi.as_ref()
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.as_ref().map_or(f64::NEG_INFINITY, exact::to_f64)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.as_ref().map_or(f64::INFINITY, exact::to_f64)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.lo_f64() && z <= self.hi_f64()
    }

    pub fn clamp(&self, z: f64) -> f64 {
        z.max(self.lo_f64()).min(self.hi_f64())
    }

    pub fn check(&self, z: f64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::Domain { z, domain: self.to_string() })
        }
    }

    /// Midpoint for bounded domains, else the finite end (or zero).
    pub fn midpoint(&self) -> f64 {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => exact::to_f64(&((l + h) / ratio(2, 1))),
            (Some(l), None) => exact::to_f64(l),
            (None, Some(h)) => exact::to_f64(h),
            (None, None) => 0.0,
        }
    }

    /// Exact sample points covering the domain. Unbounded ends are reached
    /// through the map `u -> u / (1 - u)`.
    pub fn sample_points(&self, count: usize) -> Vec<BigRational> {
        let last = (count.max(2) - 1) as i64;
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => (0..=last).map(|j| l + (h - l) * ratio(j, last)).collect(),
            (Some(l), None) => (0..=last).map(|j| l + ratio(j, last + 1 - j)).collect(),
            (None, Some(h)) => (0..=last).map(|j| h - ratio(j, last + 1 - j)).collect(),
            (None, None) => (0..=last)
                .map(|j| {
                    // v in (-1, 1), y = v / (1 - |v|)
                    let v = ratio(2 * j + 1, 2 * (last + 1)) * ratio(2, 1) - BigRational::one();
                    &v / (BigRational::one() - v.abs())
                })
                .collect(),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), exact::format_rational);
        let hi = self.hi.as_ref().map_or("inf".to_string(), exact::format_rational);
        let open_lo = if self.lo.is_some() { '[' } else { '(' };
        let close_hi = if self.hi.is_some() { ']' } else { ')' };
        write!(f, "{open_lo}{lo}, {hi}{close_hi}")
    }
}

fn check_degree(name: &str, p: &RatPoly, max: usize) -> Result<()> {
    match p.degree() {
        Some(degree) if degree > max => Err(Error::Degree { name: name.to_string(), degree, max }),
        _ => Ok(()),
    }
}

/// A sign-check point. Interior points are plain doubles, taken exactly, so
/// only the domain ends carry a rational that `to_f64` may round.
struct Sample {
    exact: Option<BigRational>,
    zf: f64,
}

impl Sample {
    fn end(z: &BigRational) -> Self {
        Self { zf: exact::to_f64(z), exact: Some(z.clone()) }
    }

    fn exact(&self) -> BigRational {
        match &self.exact {
            Some(z) => z.clone(),
            // finite doubles always convert
            None => exact::rational_from_f64(self.zf).unwrap_or_default(),
        }
    }
}

fn sign_samples(domain: &Domain) -> Vec<Sample> {
    let last = SIGN_SAMPLES - 1;
    let lf = domain.lo.as_ref().map(exact::to_f64);
    let hf = domain.hi.as_ref().map(exact::to_f64);
    // strictly inside even after the ends were rounded to doubles
    let inside = |z: f64| {
        z.is_finite()
            && lf.is_none_or(|l| z - l > 4.0 * f64::EPSILON * l.abs())
            && hf.is_none_or(|h| h - z > 4.0 * f64::EPSILON * h.abs())
    };
    let interior = (1..last).map(|j| {
        let (j, last) = (j as f64, last as f64);
        match (lf, hf) {
            (Some(l), Some(h)) => l + (h - l) * (j / last),
            (Some(l), None) => l + j / (last + 1.0 - j),
            (None, Some(h)) => h - j / (last + 1.0 - j),
            (None, None) => {
                let v = (2.0 * j + 1.0) / (last + 1.0) - 1.0;
                v / (1.0 - v.abs())
            }
        }
    });
    let mut samples: Vec<Sample> = domain.lo.iter().map(Sample::end).collect();
    samples.extend(interior.filter(|&z| inside(z)).map(|zf| Sample { exact: None, zf }));
    samples.extend(domain.hi.iter().map(Sample::end));
    samples
}

/// First sample where `p` is negative. Exact arithmetic only runs when the
/// floating-point value lies within its rounding bound of zero.
fn first_negative<'a>(p: &RatPoly, samples: &'a [Sample]) -> Option<&'a Sample> {
    let pf = p.to_f64();
    let abs = Polynomial::new(pf.coeffs().iter().map(|c| c.abs()).collect());
    let slack = 8.0 * (pf.coeffs().len() as f64 + 2.0) * f64::EPSILON;
    samples.iter().find(|s| {
        let value = pf.eval_f64(s.zf);
        let bound = slack * abs.eval_f64(s.zf.abs());
        if value > bound {
            false
        } else if value < -bound {
            true
        } else {
            p.eval(&s.exact()).is_negative()
        }
    })
}

fn check_nonnegative(p: &RatPoly, samples: &[Sample]) -> Result<()> {
    match first_negative(p, samples) {
        Some(s) => Err(Error::NegativeDiffusion(s.zf)),
        None => Ok(()),
    }
}

/// Polynomial bond-price model: `dZ = a(Z)dt + b(Z)dW`, `r = R(Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateModelSpec {
    n: usize,
    a: RatPoly,
    b2: RatPoly,
    r: RatPoly,
    domain: Domain,
    warnings: Vec<String>,
}

impl RateModelSpec {
    pub fn new(n: usize, a: RatPoly, b2: RatPoly, r: RatPoly, domain: Domain) -> Result<Self> {
        if n == 0 {
            return Err(Error::Param("bond-price degree n must be positive".into()));
        }
        check_degree("a", &a, 3)?;
        check_degree("b2", &b2, 4)?;
        check_degree("R", &r, 2)?;
        check_nonnegative(&b2, &sign_samples(&domain))?;
        Ok(Self { n, a, b2, r, domain, warnings: Vec::new() })
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warnings.push(warning.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn a(&self) -> &RatPoly {
        &self.a
    }
    pub fn b2(&self) -> &RatPoly {
        &self.b2
    }
    pub fn r(&self) -> &RatPoly {
        &self.r
    }
    pub fn domain(&self) -> &Domain {
        &self.domain
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Float copies of `(a, b2, R)` for numerical work.
    pub fn float_polys(&self) -> (Polynomial, Polynomial, Polynomial) {
        (self.a.to_f64(), self.b2.to_f64(), self.r.to_f64())
    }

    pub fn spot_rate(&self, z: f64) -> Result<f64> {
        self.domain.check(z)?;
        Ok(self.r.to_f64().eval_f64(z))
    }
}

/// A grid point `theta = i/N` of the vol family, `1 <= i <= N-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Theta {
    i: usize,
    big_n: usize,
}

impl Theta {
    pub fn new(i: usize, big_n: usize) -> Result<Self> {
        if big_n < 2 || i == 0 || i >= big_n {
            return Err(Error::Theta(format!("{i}/{big_n}")));
        }
        Ok(Self { i, big_n })
    }

    pub fn index(&self) -> usize {
        self.i
    }
    pub fn grid_size(&self) -> usize {
        self.big_n
    }
    pub fn value(&self) -> f64 {
        self.i as f64 / self.big_n as f64
    }
    pub fn exact(&self) -> BigRational {
        ratio(self.i as i64, self.big_n as i64)
    }
    /// `theta (theta - 1) / 2`, the coefficient multiplying `|h|^2`.
    pub fn variance_weight(&self) -> BigRational {
        let t = self.exact();
        &t * (&t - BigRational::one()) / ratio(2, 1)
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.i, self.big_n)
    }
}

/// Polynomial stochastic-volatility model on the grid `{i/N}`.
///
/// Only the scalar products `|h|^2`, `|b|^2` and `b.h` are stored; every
/// constraint and coefficient ODE depends on nothing else.
#[derive(Clone, Debug, PartialEq)]
pub struct VolModelSpec {
    big_n: usize,
    h2: RatPoly,
    b2: RatPoly,
    bh: RatPoly,
    a: RatPoly,
    nmap: Vec<usize>,
    domain: Domain,
}

impl VolModelSpec {
    /// `nmap[i - 1]` is the price-polynomial degree at `theta = i/N`.
    pub fn new(
        big_n: usize,
        h2: RatPoly,
        b2: RatPoly,
        bh: RatPoly,
        a: RatPoly,
        nmap: Vec<usize>,
        domain: Domain,
    ) -> Result<Self> {
        if big_n < 2 {
            return Err(Error::Param(format!("grid size N must be at least 2, got {big_n}")));
        }
        if nmap.len() != big_n - 1 {
            return Err(Error::Param(format!("nmap must list N-1 = {} degrees, got {}", big_n - 1, nmap.len())));
        }
        check_degree("h2", &h2, 2)?;
        check_degree("b2", &b2, 4)?;
        check_degree("a", &a, 3)?;
        // d(z, theta) = a + theta*bh stays in F_3 for every theta iff bh does.
        check_degree("bh", &bh, 3)?;
        let samples = sign_samples(&domain);
        check_nonnegative(&b2, &samples)?;
        check_nonnegative(&h2, &samples)?;
        // |b.h|^2 <= |b|^2 |h|^2, i.e. correlation within [-1, 1]
        let slack = &(&h2 * &b2) - &(&bh * &bh);
        if let Some(s) = first_negative(&slack, &samples) {
            let z = s.exact();
            let (h, b) = (exact::to_f64(&h2.eval(&z)), exact::to_f64(&b2.eval(&z)));
            let rho = exact::to_f64(&bh.eval(&z)) / (h * b).sqrt();
            return Err(Error::Correlation { rho, z: s.zf });
        }
        Ok(Self { big_n, h2, b2, bh, a, nmap, domain })
    }

    pub fn grid_size(&self) -> usize {
        self.big_n
    }
    pub fn h2(&self) -> &RatPoly {
        &self.h2
    }
    pub fn b2(&self) -> &RatPoly {
        &self.b2
    }
    pub fn bh(&self) -> &RatPoly {
        &self.bh
    }
    pub fn a(&self) -> &RatPoly {
        &self.a
    }
    pub fn nmap(&self) -> &[usize] {
        &self.nmap
    }
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn thetas(&self) -> impl Iterator<Item = Theta> + '_ {
        (1..self.big_n).map(|i| Theta { i, big_n: self.big_n })
    }

    pub fn theta(&self, i: usize) -> Result<Theta> {
        Theta::new(i, self.big_n)
    }

    /// Map a float onto the grid; anything not within rounding of `i/N` is rejected.
    pub fn theta_from_f64(&self, value: f64) -> Result<Theta> {
        let scaled = value * self.big_n as f64;
        let i = scaled.round();
        if !(scaled - i).abs().le(&(1e-9 * self.big_n as f64)) || i < 1.0 {
            return Err(Error::Theta(value.to_string()));
        }
        Theta::new(i as usize, self.big_n).map_err(|_| Error::Theta(value.to_string()))
    }

    pub fn n_theta(&self, theta: Theta) -> Result<usize> {
        self.check_theta(theta)?;
        Ok(self.nmap[theta.i - 1])
    }

    pub fn check_theta(&self, theta: Theta) -> Result<()> {
        if theta.big_n != self.big_n {
            return Err(Error::Theta(theta.to_string()));
        }
        Ok(())
    }

    /// `d(z, theta) = a(z) + theta * (b.h)(z)`.
    pub fn drift_theta(&self, theta: Theta) -> RatPoly {
        &self.a + &self.bh.scale(&theta.exact())
    }

    pub fn with_nmap(&self, nmap: Vec<usize>) -> Result<Self> {
        Self::new(
            self.big_n,
            self.h2.clone(),
            self.b2.clone(),
            self.bh.clone(),
            self.a.clone(),
            nmap,
            self.domain.clone(),
        )
    }
}

/// Either kind of model, as loaded from a model file.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Rate(RateModelSpec),
    Vol(VolModelSpec),
}

/// Constraint residuals at one grid point of a vol model.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaResiduals {
    pub theta: Theta,
    pub n_theta: usize,
    pub residuals: [BigRational; 3],
}

/// Exact residuals of the coefficient identities; satisfied iff all vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport {
    pub residuals: Vec<(String, BigRational)>,
    pub satisfied: bool,
    pub per_theta: Option<Vec<ThetaResiduals>>,
}

impl ConstraintReport {
    fn from_residuals(residuals: Vec<(String, BigRational)>, per_theta: Option<Vec<ThetaResiduals>>) -> Self {
        let satisfied = residuals.iter().all(|(_, r)| r.is_zero());
        Self { residuals, satisfied, per_theta }
    }

    /// Named residuals that are not zero.
    pub fn violations(&self) -> Vec<(&str, &BigRational)> {
        self.residuals.iter().filter(|(_, r)| !r.is_zero()).map(|(name, r)| (name.as_str(), r)).collect()
    }

    pub fn summary(&self) -> String {
        let parts: Vec<String> =
            self.violations().iter().map(|(name, r)| format!("{name}={}", exact::format_rational(r))).collect();
        if parts.is_empty() {
            "all residuals zero".into()
        } else {
            parts.join(", ")
        }
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `m (m-1) / 2` as a rational, for any signed `m`.
fn half_pair(m: i64) -> BigRational {
    ratio(m * (m - 1), 2)
}

/// The three top-coefficient identities shared by both model kinds.
///
/// `drift` plays the role of `a` (or `d(., theta)`) and `potential` the role
/// of `-R` (or `theta(theta-1)/2 |h|^2`).
fn top_coefficient_residuals(n: usize, drift: &RatPoly, b2: &RatPoly, potential: &RatPoly) -> [BigRational; 3] {
    let n = n as i64;
    let eq1 = int(n) * drift.coeff(3) + half_pair(n) * b2.coeff(4) + potential.coeff(2);
    // The z^{n+1} coefficient of the degree-(n-1) basis term; vacuous when n = 0.
    let eq2 = if n == 0 {
        BigRational::zero()
    } else {
        int(n - 1) * drift.coeff(3) + half_pair(n - 1) * b2.coeff(4) + potential.coeff(2)
    };
    let eq3 = int(n) * drift.coeff(2) + half_pair(n) * b2.coeff(3) + potential.coeff(1);
    [eq1, eq2, eq3]
}

pub fn check_rate_constraints(spec: &RateModelSpec) -> ConstraintReport {
    let [eq1, eq2, eq3] = top_coefficient_residuals(spec.n, &spec.a, &spec.b2, &(-&spec.r));
    ConstraintReport::from_residuals(
        vec![
            ("n*a3 + n(n-1)/2*b4 - R2".into(), eq1),
            ("(n-1)*a3 + (n-1)(n-2)/2*b4 - R2".into(), eq2),
            ("n*a2 + n(n-1)/2*b3 - R1".into(), eq3),
        ],
        None,
    )
}

pub fn check_vol_constraints(spec: &VolModelSpec) -> ConstraintReport {
    let mut residuals = Vec::new();
    let mut per_theta = Vec::new();
    for theta in spec.thetas() {
        let n = spec.nmap[theta.i - 1];
        let potential = spec.h2.scale(&theta.variance_weight());
        let res = top_coefficient_residuals(n, &spec.drift_theta(theta), &spec.b2, &potential);
        for (k, r) in res.iter().enumerate() {
            residuals.push((format!("eq{}@theta={theta}", k + 1), r.clone()));
        }
        per_theta.push(ThetaResiduals { theta, n_theta: n, residuals: res });
    }
    ConstraintReport::from_residuals(residuals, Some(per_theta))
}

/// `A_i(z) = a (z^i)' + b2/2 (z^i)'' - R z^i`, expanded symbolically.
pub fn compute_ai(spec: &RateModelSpec, i: usize) -> Result<RatPoly> {
    if i > spec.n {
        return Err(Error::Index { index: i, max: spec.n });
    }
    Ok(generator_image(i, &spec.a, &spec.b2, &(-&spec.r)))
}

/// `B_i(z, theta) = theta(theta-1)/2 |h|^2 z^i + d (z^i)' + |b|^2/2 (z^i)''`.
pub fn compute_bi(spec: &VolModelSpec, theta: Theta, i: usize) -> Result<RatPoly> {
    let n = spec.n_theta(theta)?;
    if i > n {
        return Err(Error::Index { index: i, max: n });
    }
    let potential = spec.h2.scale(&theta.variance_weight());
    Ok(generator_image(i, &spec.drift_theta(theta), &spec.b2, &potential))
}

/// Image of the monomial `z^i` under `drift d/dz + b2/2 d^2/dz^2 + potential`.
fn generator_image(i: usize, drift: &RatPoly, b2: &RatPoly, potential: &RatPoly) -> RatPoly {
    let basis = RatPoly::monomial(BigRational::one(), i);
    let first = &basis.derivative(1) * drift;
    let second = (&basis.derivative(2) * b2).scale(&ratio(1, 2));
    &(&first + &second) + &(&basis * potential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn poly(c: &[&str]) -> RatPoly {
        RatPoly::new(c.iter().map(|s| q(s)).collect())
    }

    fn family2(r: &[&str]) -> RateModelSpec {
        RateModelSpec::new(2, poly(&["0.005", "-0.1"]), poly(&["0", "0", "0", "1"]), poly(r), Domain::half_line(q("0")))
            .unwrap()
    }

    #[test]
    fn degree_bounds_are_enforced() {
        let err = RateModelSpec::new(
            2,
            poly(&["0"]),
            poly(&["0", "0", "0", "0", "0", "1"]),
            poly(&["0", "1"]),
            Domain::real_line(),
        )
        .unwrap_err();
        assert_eq!(err, Error::Degree { name: "b2".into(), degree: 5, max: 4 });
        assert!(RateModelSpec::new(
            2,
            poly(&["0", "0", "0", "0", "1"]),
            poly(&["1"]),
            poly(&["0"]),
            Domain::real_line()
        )
        .is_err());
        assert!(RateModelSpec::new(2, poly(&["0"]), poly(&["1"]), poly(&["0", "0", "0", "1"]), Domain::real_line())
            .is_err());
    }

    #[test]
    fn negative_diffusion_is_rejected() {
        // b2 = z on the whole line goes negative
        let err =
            RateModelSpec::new(1, poly(&["0"]), poly(&["0", "1"]), poly(&["0"]), Domain::real_line()).unwrap_err();
        assert!(matches!(err, Error::NegativeDiffusion(_)));
        // b2 = z(1 - z) is fine on [0, 1] with exact zeros at both ends
        let dom = Domain::interval(q("0"), q("1")).unwrap();
        assert!(RateModelSpec::new(1, poly(&["0"]), poly(&["0", "1", "-1"]), poly(&["0"]), dom).is_ok());
    }

    #[test]
    fn family2_with_perturbed_short_rate_fails_third_identity() {
        let report = check_rate_constraints(&family2(&["0", "1.1"]));
        assert!(!report.satisfied);
        assert!(report.residuals[0].1.is_zero());
        assert!(report.residuals[1].1.is_zero());
        assert_eq!(report.residuals[2].1, q("-0.1"));
        assert!(check_rate_constraints(&family2(&["0", "1"])).satisfied);
    }

    #[test]
    fn ai_low_orders() {
        let spec = family2(&["0", "1"]);
        assert_eq!(compute_ai(&spec, 0).unwrap(), -spec.r());
        let z = RatPoly::monomial(BigRational::one(), 1);
        assert_eq!(compute_ai(&spec, 1).unwrap(), spec.a() - &(&z * spec.r()));
        assert_eq!(compute_ai(&spec, 2).unwrap(), poly(&["0", "0.01", "-0.2"]));
        assert_eq!(compute_ai(&spec, 3), Err(Error::Index { index: 3, max: 2 }));
    }

    #[test]
    fn theta_grid_handling() {
        assert!(Theta::new(0, 4).is_err());
        assert!(Theta::new(4, 4).is_err());
        let t = Theta::new(1, 4).unwrap();
        assert_eq!(t.variance_weight(), q("-3/32"));
        let spec = VolModelSpec::new(
            4,
            poly(&["0.04"]),
            RatPoly::zero(),
            RatPoly::zero(),
            RatPoly::zero(),
            vec![0, 0, 0],
            Domain::real_line(),
        )
        .unwrap();
        assert_eq!(spec.theta_from_f64(0.5).unwrap(), Theta::new(2, 4).unwrap());
        assert!(spec.theta_from_f64(0.3).is_err());
        assert!(spec.theta_from_f64(1.0).is_err());
        assert!(spec.n_theta(Theta::new(1, 5).unwrap()).is_err());
    }

    #[test]
    fn correlation_bound_is_enforced() {
        let err = VolModelSpec::new(
            2,
            poly(&["1"]),
            poly(&["1"]),
            poly(&["2"]),
            RatPoly::zero(),
            vec![0],
            Domain::real_line(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Correlation { .. }));
    }

    #[test]
    fn domain_samples_cover_ends() {
        let d = Domain::interval(q("0"), q("2")).unwrap();
        let pts = d.sample_points(SIGN_SAMPLES);
        assert_eq!(pts.len(), SIGN_SAMPLES);
        assert_eq!(pts[0], q("0"));
        assert_eq!(pts[SIGN_SAMPLES - 1], q("2"));
        let half = Domain::half_line(q("1")).sample_points(16);
        assert!(half.windows(2).all(|w| w[0] < w[1]));
        assert!(half.iter().all(|p| *p >= q("1")));
        let line = Domain::real_line().sample_points(16);
        assert!(line.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Domain::half_line(q("0")).to_string(), "[0, inf)");
    }
}
