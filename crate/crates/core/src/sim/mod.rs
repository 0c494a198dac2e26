//! Euler–Maruyama simulation of the factor diffusion and, for vol models, the stock.
//!
//! Every path draws from its own ChaCha stream `(seed, path index)`, so the
//! output does not depend on how rayon schedules the paths.

mod black_scholes;
mod estimators;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::model_digest;
use crate::model::{ModelSpec, VolModelSpec};
use crate::poly::Polynomial;

pub use black_scholes::{bs_call, implied_vol, normal_cdf};
pub use estimators::{
    mc_bond_price, mc_call_price, mc_martingale_check, mc_power_price, pairwise_sum, Estimate, MartingaleReport,
};

/// Upper bound on stored samples per array before a record stride is demanded.
const MAX_STORED: usize = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    EulerFullTruncation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub scheme: Scheme,
    /// Store every `record_every`-th grid point; the final step is always stored.
    pub record_every: usize,
}

impl SimConfig {
    pub fn new(n_paths: usize, dt: f64, horizon: f64, seed: u64) -> Result<Self> {
        let cfg = Self { n_paths, dt, horizon, seed, scheme: Scheme::EulerFullTruncation, record_every: 1 };
        // storage is checked once the record stride is known
        cfg.validate_grid()?;
        Ok(cfg)
    }

    pub fn with_record_every(mut self, stride: usize) -> Result<Self> {
        self.record_every = stride;
        self.validate()?;
        Ok(self)
    }

    /// Record stride that stores samples every `interval` time units.
    pub fn recording_interval(self, interval: f64) -> Result<Self> {
        let stride = (interval / self.dt).round();
        if !(stride >= 1.0) || ((stride * self.dt - interval).abs() > 1e-9 * interval) {
            return Err(Error::Config(format!("record interval {interval} is not a multiple of dt {}", self.dt)));
        }
        self.with_record_every(stride as usize)
    }

    /// Full check, including the storage bound of the recorded grid.
    pub fn validate(&self) -> Result<()> {
        self.validate_grid()?;
        let stored = self.recorded_steps().len().saturating_mul(self.n_paths);
        if stored > MAX_STORED {
            return Err(Error::Config(format!(
                "{stored} stored samples exceed the limit {MAX_STORED}; increase the record stride"
            )));
        }
        Ok(())
    }

    fn validate_grid(&self) -> Result<()> {
        if self.n_paths < 2 {
            return Err(Error::Config(format!("need at least 2 paths, got {}", self.n_paths)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!(
                "dt and horizon must be positive, got {} and {}",
                self.dt, self.horizon
            )));
        }
        if self.dt > self.horizon {
            return Err(Error::Config(format!("dt {} exceeds horizon {}", self.dt, self.horizon)));
        }
        let steps = (self.horizon / self.dt).round();
        if (steps * self.dt - self.horizon).abs() > 1e-9 * self.horizon {
            return Err(Error::Config(format!("horizon {} is not a multiple of dt {}", self.horizon, self.dt)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record stride must be positive".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    fn recorded_steps(&self) -> Vec<usize> {
        let n = self.n_steps();
        let mut steps: Vec<usize> = (0..=n).step_by(self.record_every).collect();
        if steps.last() != Some(&n) {
            steps.push(n);
        }
        steps
    }
}

/// Provenance attached to a simulated ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathMeta {
    pub config: SimConfig,
    pub spec_digest: String,
    pub z0: f64,
    pub s0: Option<f64>,
}

/// Simulated ensemble, stored time-major at the recorded grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSet {
    times: Vec<f64>,
    z: Vec<f64>,
    s: Option<Vec<f64>>,
    /// Left-endpoint `int_0^t R(Z) ds` on the fine grid, rate models only.
    int_r: Option<Vec<f64>>,
    violations: u64,
    meta: PathMeta,
}

impl PathSet {
    pub fn meta(&self) -> &PathMeta {
        &self.meta
    }
    pub fn n_paths(&self) -> usize {
        self.meta.config.n_paths
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn has_stock(&self) -> bool {
        self.s.is_some()
    }

    /// Index of a recorded time, within rounding of the grid.
    pub fn time_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.times.iter().position(|&u| (u - t).abs() <= tol).ok_or(Error::TimeNotRecorded(t))
    }

    fn column<'a>(&self, data: &'a [f64], k: usize) -> &'a [f64] {
        let n = self.n_paths();
        &data[k * n..(k + 1) * n]
    }

    /// Factor values of every path at recorded index `k`.
    pub fn z_at(&self, k: usize) -> &[f64] {
        self.column(&self.z, k)
    }

    pub fn s_at(&self, k: usize) -> Result<&[f64]> {
        let s = self.s.as_ref().ok_or(Error::MissingStock)?;
        Ok(self.column(s, k))
    }

    pub fn int_r_at(&self, k: usize) -> Result<&[f64]> {
        let r =
            self.int_r.as_ref().ok_or_else(|| Error::Config("path set was not simulated from a rate model".into()))?;
        Ok(self.column(r, k))
    }

    /// Trajectory of one path at the recorded times.
    pub fn path_z(&self, p: usize) -> Vec<f64> {
        (0..self.times.len()).map(|k| self.z_at(k)[p]).collect()
    }

    pub fn path_s(&self, p: usize) -> Option<Vec<f64>> {
        self.s.as_ref().map(|_| (0..self.times.len()).map(|k| self.s_at(k).unwrap()[p]).collect())
    }

    /// Steps whose unclamped Euler update left the domain.
    pub fn domain_violations(&self) -> u64 {
        self.violations
    }

    pub fn violation_rate(&self) -> f64 {
        self.violations as f64 / (self.meta.config.n_steps() as f64 * self.n_paths() as f64)
    }

    /// Every recorded factor sample at or after `burn_in`.
    pub fn samples_after(&self, burn_in: f64) -> Vec<f64> {
        let tol = 1e-9 * burn_in.abs().max(1.0);
        self.times
            .iter()
            .enumerate()
            .filter(|(_, &t)| t >= burn_in - tol)
            .flat_map(|(k, _)| self.z_at(k).iter().copied())
            .collect()
    }
}

struct Dynamics {
    a: Polynomial,
    b2: Polynomial,
    lo: f64,
    hi: f64,
    rate: Option<Polynomial>,
    stock: Option<StockDynamics>,
}

struct StockDynamics {
    h2: Polynomial,
    bh: Polynomial,
    s0: f64,
}

struct PathOut {
    z: Vec<f64>,
    s: Option<Vec<f64>>,
    int_r: Option<Vec<f64>>,
    violations: u64,
}

/// Driver correlation `bh / sqrt(h2 b2)`, zero where either variance vanishes.
fn correlation(h2: f64, b2: f64, bh: f64, z: f64) -> Result<f64> {
    let denom = h2 * b2;
    if !(denom > 0.0) {
        return Ok(0.0);
    }
    let rho = bh / denom.sqrt();
    if rho.abs() > 1.0 + 1e-12 {
        return Err(Error::Correlation { rho, z });
    }
    Ok(rho.clamp(-1.0, 1.0))
}

fn simulate_path(dyn_: &Dynamics, cfg: &SimConfig, recorded: &[usize], z0: f64, index: usize) -> Result<PathOut> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let sqrt_dt = cfg.dt.sqrt();
    let mut z = z0;
    let mut log_s = dyn_.stock.as_ref().map(|s| s.s0.ln());
    let mut int_r = 0.0;
    let mut out = PathOut {
        z: Vec::with_capacity(recorded.len()),
        s: dyn_.stock.as_ref().map(|_| Vec::with_capacity(recorded.len())),
        int_r: dyn_.rate.as_ref().map(|_| Vec::with_capacity(recorded.len())),
        violations: 0,
    };
    let mut next = recorded.iter().peekable();
    for step in 0..=cfg.n_steps() {
        if next.peek() == Some(&&step) {
            next.next();
            out.z.push(z);
            if let (Some(buf), Some(ls)) = (out.s.as_mut(), log_s) {
                buf.push(ls.exp());
            }
            if let Some(buf) = out.int_r.as_mut() {
                buf.push(int_r);
            }
        }
        if step == cfg.n_steps() {
            break;
        }
        let b2 = dyn_.b2.eval_f64(z).max(0.0);
        let dw1: f64 = rng.sample(StandardNormal);
        if let Some(r) = &dyn_.rate {
            int_r += r.eval_f64(z) * cfg.dt;
        }
        if let (Some(stock), Some(ls)) = (&dyn_.stock, log_s.as_mut()) {
            let dw2: f64 = rng.sample(StandardNormal);
            let h2 = stock.h2.eval_f64(z).max(0.0);
            let rho = correlation(h2, b2, stock.bh.eval_f64(z), z)?;
            let shock = rho * dw1 + (1.0 - rho * rho).sqrt() * dw2;
            *ls += -0.5 * h2 * cfg.dt + h2.sqrt() * sqrt_dt * shock;
        }
        let raw = z + dyn_.a.eval_f64(z) * cfg.dt + b2.sqrt() * sqrt_dt * dw1;
        if !(raw >= dyn_.lo && raw <= dyn_.hi) {
            out.violations += 1;
        }
        z = raw.clamp(dyn_.lo, dyn_.hi);
    }
    Ok(out)
}

fn run(dyn_: Dynamics, cfg: &SimConfig, z0: f64, digest: String) -> Result<PathSet> {
    cfg.validate()?;
    if !(z0 >= dyn_.lo && z0 <= dyn_.hi) {
        return Err(Error::Domain { z: z0, domain: format!("[{}, {}]", dyn_.lo, dyn_.hi) });
    }
    let recorded = cfg.recorded_steps();
    let outs = (0..cfg.n_paths)
        .into_par_iter()
        .map(|p| simulate_path(&dyn_, cfg, &recorded, z0, p))
        .collect::<Result<Vec<_>>>()?;

    let n_rec = recorded.len();
    let transpose = |get: &dyn Fn(&PathOut) -> &[f64]| -> Vec<f64> {
        let mut data = vec![0.0; n_rec * cfg.n_paths];
        for (p, out) in outs.iter().enumerate() {
            for (k, v) in get(out).iter().enumerate() {
                data[k * cfg.n_paths + p] = *v;
            }
        }
        data
    };
    let z = transpose(&|o| &o.z);
    let s = dyn_.stock.as_ref().map(|_| transpose(&|o| o.s.as_deref().unwrap()));
    let int_r = dyn_.rate.as_ref().map(|_| transpose(&|o| o.int_r.as_deref().unwrap()));
    let violations = outs.iter().map(|o| o.violations).sum();
    Ok(PathSet {
        times: recorded.iter().map(|&k| k as f64 * cfg.dt).collect(),
        z,
        s,
        int_r,
        violations,
        meta: PathMeta { config: cfg.clone(), spec_digest: digest, z0, s0: dyn_.stock.as_ref().map(|s| s.s0) },
    })
}

/// Factor paths; rate models also accumulate `int R(Z) dt`.
pub fn simulate_factor(spec: &ModelSpec, cfg: &SimConfig, z0: f64) -> Result<PathSet> {
    let (a, b2, domain, rate) = match spec {
        ModelSpec::Rate(s) => (s.a().to_f64(), s.b2().to_f64(), s.domain(), Some(s.r().to_f64())),
        ModelSpec::Vol(s) => (s.a().to_f64(), s.b2().to_f64(), s.domain(), None),
    };
    let dyn_ = Dynamics { a, b2, lo: domain.lo_f64(), hi: domain.hi_f64(), rate, stock: None };
    run(dyn_, cfg, z0, model_digest(spec))
}

/// Factor and stock driven by two Brownian motions with correlation `bh / sqrt(h2 b2)`.
pub fn simulate_joint(spec: &VolModelSpec, cfg: &SimConfig, z0: f64, s0: f64) -> Result<PathSet> {
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(Error::Config(format!("initial stock price must be positive, got {s0}")));
    }
    let domain = spec.domain();
    let dyn_ = Dynamics {
        a: spec.a().to_f64(),
        b2: spec.b2().to_f64(),
        lo: domain.lo_f64(),
        hi: domain.hi_f64(),
        rate: None,
        stock: Some(StockDynamics { h2: spec.h2().to_f64(), bh: spec.bh().to_f64(), s0 }),
    };
    run(dyn_, cfg, z0, model_digest(&ModelSpec::Vol(spec.clone())))
}
