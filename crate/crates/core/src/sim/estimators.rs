use serde::Serialize;

use super::PathSet;
use crate::error::{Error, Result};
use crate::io::model_digest;
use crate::model::{ModelSpec, RateModelSpec};
use crate::term::TermStructure;

/// Leaf size of the pairwise reduction.
const BLOCK: usize = 64;

/// Pairwise sum over fixed blocks; the order depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

impl Estimate {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        // a deterministic integrand must give an exact estimate, not a rounded mean
        if let Some(&first) = values.first() {
            if values.iter().all(|&v| v == first) {
                return Self { estimate: first, std_error: 0.0, n_paths: n };
            }
        }
        let mean = pairwise_sum(values) / n as f64;
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        Self { estimate: mean, std_error: (var / n as f64).sqrt(), n_paths: n }
    }

    /// `(estimate - target) / std_error`; zero when both the gap and the error vanish.
    pub fn z_score(&self, target: f64) -> f64 {
        let gap = self.estimate - target;
        if gap == 0.0 {
            0.0
        } else {
            gap / self.std_error
        }
    }
}

fn check_digest(paths: &PathSet, spec: &RateModelSpec) -> Result<()> {
    let digest = model_digest(&ModelSpec::Rate(spec.clone()));
    if digest != paths.meta().spec_digest {
        return Err(Error::Config("path set was simulated from a different model".into()));
    }
    Ok(())
}

/// `E[exp(-int_0^T R(Z) ds)]` with the left-endpoint integral on the simulation grid.
pub fn mc_bond_price(paths: &PathSet, spec: &RateModelSpec, maturity: f64) -> Result<Estimate> {
    check_digest(paths, spec)?;
    let k = paths.time_index(maturity)?;
    let values: Vec<f64> = paths.int_r_at(k)?.iter().map(|i| (-i).exp()).collect();
    Ok(Estimate::from_samples(&values))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MartingaleReport {
    pub t: f64,
    pub maturity: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub z_score: f64,
}

/// Compares `E[exp(-int_0^t R) P(T - t, Z_t)]` with `P(T, z0)`.
pub fn mc_martingale_check(paths: &PathSet, ts: &TermStructure, t: f64, maturity: f64) -> Result<MartingaleReport> {
    if !(t >= 0.0 && t < maturity) {
        return Err(Error::Config(format!("need 0 <= t < T, got t={t}, T={maturity}")));
    }
    let k = paths.time_index(t)?;
    let discount = paths.int_r_at(k)?;
    let values = paths
        .z_at(k)
        .iter()
        .zip(discount)
        .map(|(&z, i)| Ok((-i).exp() * ts.bond_price(maturity - t, z)?))
        .collect::<Result<Vec<f64>>>()?;
    let est = Estimate::from_samples(&values);
    let analytic = ts.bond_price(maturity, paths.meta().z0)?;
    Ok(MartingaleReport {
        t,
        maturity,
        estimate: est.estimate,
        std_error: est.std_error,
        analytic,
        z_score: est.z_score(analytic),
    })
}

/// `E[S_T^theta]`.
pub fn mc_power_price(paths: &PathSet, theta: f64, maturity: f64) -> Result<Estimate> {
    let k = paths.time_index(maturity)?;
    let values: Vec<f64> = paths.s_at(k)?.iter().map(|s| s.powf(theta)).collect();
    Ok(Estimate::from_samples(&values))
}

/// `E[(S_T - K)^+]`.
pub fn mc_call_price(paths: &PathSet, strike: f64, maturity: f64) -> Result<Estimate> {
    if !(strike >= 0.0) {
        return Err(Error::Param(format!("strike must be non-negative, got {strike}")));
    }
    let k = paths.time_index(maturity)?;
    let values: Vec<f64> = paths.s_at(k)?.iter().map(|s| (s - strike).max(0.0)).collect();
    Ok(Estimate::from_samples(&values))
}
