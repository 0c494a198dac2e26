//! Power-option coefficient functions `K(x, theta) = exp(S(theta) x) K(0)` for
//! every grid point of a polynomial stochastic-volatility model.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{check_vol_constraints, Theta, VolModelSpec};
use crate::term::{banded_generator, ExpCache, InformationMatrix};

/// Exact generator of the coefficient ODE at one `theta`.
pub fn build_theta_matrix(spec: &VolModelSpec, theta: Theta) -> Result<InformationMatrix> {
    let n = spec.n_theta(theta)?;
    let report = check_vol_constraints(spec);
    if let Some(bad) = report
        .per_theta
        .iter()
        .flatten()
        .find(|t| t.theta == theta && t.residuals.iter().any(|r| !num::Zero::is_zero(r)))
    {
        return Err(Error::Constraint(format!(
            "theta={}: residuals {:?}",
            bad.theta,
            bad.residuals.iter().map(crate::exact::format_rational).collect::<Vec<_>>()
        )));
    }
    Ok(theta_matrix_unchecked(spec, theta, n))
}

fn theta_matrix_unchecked(spec: &VolModelSpec, theta: Theta, n: usize) -> InformationMatrix {
    let potential = spec.h2().scale(&theta.variance_weight());
    banded_generator(n, &spec.drift_theta(theta), spec.b2(), &potential)
}

/// Solved coefficient functions at one grid point.
#[derive(Debug)]
pub struct ThetaSolution {
    theta: Theta,
    n_theta: usize,
    exact: InformationMatrix,
    s: DMatrix<f64>,
    cache: ExpCache,
}

impl ThetaSolution {
    pub fn new(spec: &VolModelSpec, theta: Theta) -> Result<Self> {
        let exact = build_theta_matrix(spec, theta)?;
        Ok(Self::from_matrix(theta, exact))
    }

    fn from_matrix(theta: Theta, exact: InformationMatrix) -> Self {
        let s = exact.to_f64();
        Self { theta, n_theta: exact.dim() - 1, exact, s, cache: ExpCache::default() }
    }

    pub fn theta(&self) -> Theta {
        self.theta
    }
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
    pub fn matrix(&self) -> &InformationMatrix {
        &self.exact
    }
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn exp_at(&self, x: f64) -> Result<Arc<DMatrix<f64>>> {
        self.cache.get_or_compute(&self.s, x)
    }

    /// `(k_0(x), .., k_n(x))`.
    pub fn solve_k(&self, x: f64) -> Result<DVector<f64>> {
        Ok(self.exp_at(x)?.column(0).into_owned())
    }

    /// `sum k_i(x) z^i`, the price of the power claim per unit `s^theta`.
    pub fn normalized_price(&self, x: f64, z: f64) -> Result<f64> {
        Ok(horner(self.solve_k(x)?.as_slice(), z))
    }

    /// `f(x, theta, z) = -2/(theta(1-theta)) d/dx log(sum k_i z^i)`.
    pub fn implied_forward_variance(&self, x: f64, z: f64) -> Result<f64> {
        let k = self.solve_k(x)?;
        let level = horner(k.as_slice(), z);
        if !(level > 0.0) {
            return Err(Error::NonPositivePrice { price: level, ttm: x, z });
        }
        let slope = horner((&self.s * &k).as_slice(), z);
        let t = self.theta.value();
        Ok(-2.0 / (t * (1.0 - t)) * slope / level)
    }
}

pub(crate) fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
}

/// All grid points of a vol model, solved independently.
#[derive(Debug)]
pub struct VolEngine {
    spec: VolModelSpec,
    solutions: Vec<ThetaSolution>,
}

impl VolEngine {
    pub fn new(spec: VolModelSpec) -> Result<Self> {
        let report = check_vol_constraints(&spec);
        if !report.satisfied {
            return Err(Error::Constraint(report.summary()));
        }
        let thetas: Vec<Theta> = spec.thetas().collect();
        let solutions = thetas
            .par_iter()
            .map(|&theta| {
                let n = spec.n_theta(theta)?;
                Ok(ThetaSolution::from_matrix(theta, theta_matrix_unchecked(&spec, theta, n)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { spec, solutions })
    }

    pub fn spec(&self) -> &VolModelSpec {
        &self.spec
    }

    pub fn solution(&self, theta: Theta) -> Result<&ThetaSolution> {
        self.spec.check_theta(theta)?;
        Ok(&self.solutions[theta.index() - 1])
    }

    pub fn solutions(&self) -> &[ThetaSolution] {
        &self.solutions
    }

    pub fn solve_k(&self, theta: Theta, x: f64) -> Result<DVector<f64>> {
        self.solution(theta)?.solve_k(x)
    }

    /// `s^theta sum k_i(ttm, theta) z^i`.
    pub fn power_price(&self, theta: Theta, ttm: f64, s: f64, z: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::Param(format!("stock price must be positive, got {s}")));
        }
        self.spec.domain().check(z)?;
        let sol = self.solution(theta)?;
        Ok(s.powf(theta.value()) * sol.normalized_price(ttm, z)?)
    }

    pub fn implied_forward_variance(&self, theta: Theta, x: f64, z: f64) -> Result<f64> {
        self.spec.domain().check(z)?;
        self.solution(theta)?.implied_forward_variance(x, z)
    }

    /// Prices at the two grid points bracketing an off-grid `theta`.
    pub fn bracketing_prices(&self, theta: f64, ttm: f64, s: f64, z: f64) -> Result<[(Theta, f64); 2]> {
        let big_n = self.spec.grid_size();
        let scaled = theta * big_n as f64;
        if !(scaled >= 1.0 && scaled <= (big_n - 1) as f64) {
            return Err(Error::Theta(theta.to_string()));
        }
        let lo = Theta::new((scaled.floor() as usize).min(big_n - 2).max(1), big_n)?;
        let hi = Theta::new(lo.index() + 1, big_n).unwrap_or(lo);
        Ok([(lo, self.power_price(lo, ttm, s, z)?), (hi, self.power_price(hi, ttm, s, z)?)])
    }

    /// `(theta, ttm, price, forward variance at x = 0)` rows, one per grid point and maturity.
    pub fn surface(&self, thetas: &[Theta], ttms: &[f64], s: f64, z: f64) -> Result<Vec<[f64; 4]>> {
        let rows: Vec<Result<Vec<[f64; 4]>>> = thetas
            .par_iter()
            .map(|&theta| {
                let f0 = self.implied_forward_variance(theta, 0.0, z)?;
                ttms.iter().map(|&t| Ok([theta.value(), t, self.power_price(theta, t, s, z)?, f0])).collect()
            })
            .collect();
        Ok(rows.into_iter().collect::<Result<Vec<_>>>()?.concat())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::family::{build_family, params, Family};
    use crate::model::{Domain, ModelSpec};
    use crate::poly::RatPoly;
    use num::BigRational;

    fn vol(family: Family, p: &[(&str, &str)]) -> VolModelSpec {
        match build_family(family, &params(p).unwrap()).unwrap() {
            ModelSpec::Vol(s) => s,
            _ => unreachable!(),
        }
    }

    fn example6_n2(d0: BigRational, d1: BigRational) -> VolModelSpec {
        VolModelSpec::new(
            2,
            RatPoly::new(vec![ratio(0, 1), ratio(8, 1)]),
            RatPoly::zero(),
            RatPoly::zero(),
            RatPoly::new(vec![d0, d1, ratio(1, 1)]),
            vec![1],
            Domain::half_line(ratio(0, 1)),
        )
        .unwrap()
    }

    #[test]
    fn example6_half_grid_matrix() {
        let (d0, d1) = (ratio(3, 7), ratio(-2, 5));
        let spec = example6_n2(d0.clone(), d1.clone());
        let m = build_theta_matrix(&spec, Theta::new(1, 2).unwrap()).unwrap();
        assert_eq!(m.rows(), &[vec![ratio(0, 1), d0], vec![ratio(-1, 1), d1]]);
    }

    #[test]
    fn example6_small_time_slope() {
        let spec = example6_n2(ratio(0, 1), ratio(1, 3));
        let sol = ThetaSolution::new(&spec, Theta::new(1, 2).unwrap()).unwrap();
        let x = 1e-6;
        let k = sol.solve_k(x).unwrap();
        assert!((k[0] - 1.0).abs() < 1e-11);
        assert!((k[1] + x).abs() < 1e-11);
    }

    #[test]
    fn constant_variance_is_black_scholes() {
        let spec = vol(Family::VolConstant, &[("N", "4"), ("sigma2", "0.04")]);
        let theta = Theta::new(2, 4).unwrap();
        let m = build_theta_matrix(&spec, theta).unwrap();
        assert_eq!(m.rows(), &[vec![ratio(-1, 200)]]);
        let engine = VolEngine::new(spec).unwrap();
        let p = engine.power_price(theta, 1.0, 1.0, 0.3).unwrap();
        assert!((p - (-0.005f64).exp()).abs() < 1e-15, "{p}");
        assert!((p - 0.995012).abs() < 1e-6);
        let k = engine.solve_k(theta, 2.5).unwrap();
        assert!((k[0] - (-0.125 * 0.04 * 2.5f64).exp()).abs() < 1e-15);
        for x in [0.0, 0.5, 3.0] {
            let f = engine.implied_forward_variance(theta, x, 0.1).unwrap();
            assert!((f - 0.04).abs() < 1e-14, "{f}");
        }
    }

    #[test]
    fn maturity_zero_returns_power_of_spot() {
        let spec = vol(
            Family::Vol7,
            &[
                ("N", "6"),
                ("c", "1"),
                ("h0", "0.01"),
                ("alpha1", "0.2"),
                ("alpha2", "0.9"),
                ("beta", "0.1"),
                ("gamma", "0.5"),
            ],
        );
        let engine = VolEngine::new(spec).unwrap();
        for theta in engine.spec().thetas().collect::<Vec<_>>() {
            let k0 = engine.solve_k(theta, 0.0).unwrap();
            assert_eq!(k0[0], 1.0);
            assert!(k0.iter().skip(1).all(|&v| v == 0.0));
            let p = engine.power_price(theta, 0.0, 2.0, 0.3).unwrap();
            assert_eq!(p, 2f64.powf(theta.value()));
        }
    }

    #[test]
    fn off_grid_theta_is_rejected() {
        let spec = vol(Family::VolConstant, &[("N", "4"), ("sigma2", "0.04")]);
        let engine = VolEngine::new(spec.clone()).unwrap();
        assert!(spec.theta_from_f64(0.3).is_err());
        assert!(engine.solution(Theta::new(1, 5).unwrap()).is_err());
        let [(lo, _), (hi, _)] = engine.bracketing_prices(0.3, 1.0, 1.0, 0.0).unwrap();
        assert_eq!((lo.index(), hi.index()), (1, 2));
        assert!(engine.bracketing_prices(0.1, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn wrong_degree_map_is_a_constraint_error() {
        let spec = vol(
            Family::Vol6,
            &[("N", "4"), ("h0", "0"), ("alpha1", "0.02"), ("alpha2", "0.06"), ("beta", "1"), ("gamma", "0.05")],
        );
        let mut nmap = spec.nmap().to_vec();
        nmap[1] += 1;
        let bad = spec.with_nmap(nmap).unwrap();
        assert!(VolEngine::new(bad.clone()).is_err());
        assert!(build_theta_matrix(&bad, Theta::new(2, 4).unwrap()).is_err());
        // other grid points are unaffected
        assert!(build_theta_matrix(&bad, Theta::new(1, 4).unwrap()).is_ok());
    }

    #[test]
    fn parallel_surface_matches_sequential() {
        let spec = vol(
            Family::Vol7,
            &[
                ("N", "10"),
                ("c", "0.01"),
                ("h0", "0.01"),
                ("alpha1", "0.02"),
                ("alpha2", "0.06"),
                ("beta", "0"),
                ("gamma", "0.05"),
            ],
        );
        let engine = VolEngine::new(spec.clone()).unwrap();
        let thetas: Vec<Theta> = spec.thetas().collect();
        let par = engine.surface(&thetas, &[0.5, 1.0], 1.0, 0.03).unwrap();
        let seq: Vec<[f64; 4]> = thetas
            .iter()
            .flat_map(|&t| {
                let sol = ThetaSolution::new(&spec, t).unwrap();
                let f0 = sol.implied_forward_variance(0.0, 0.03).unwrap();
                [0.5, 1.0].map(|x| [t.value(), x, sol.normalized_price(x, 0.03).unwrap(), f0])
            })
            .collect();
        assert_eq!(par, seq);
    }
}
