use libm::erfc;

use crate::error::{Error, Result};

const VOL_LO: f64 = 1e-6;
const VOL_HI: f64 = 5.0;
/// The upper bracket is doubled up to this cap when a deep price needs more volatility.
const VOL_CAP: f64 = 1e4;

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Zero-rate Black–Scholes call.
pub fn bs_call(s0: f64, strike: f64, ttm: f64, sigma: f64) -> f64 {
    if strike <= 0.0 {
        return s0 - strike;
    }
    let sd = sigma * ttm.sqrt();
    if sd == 0.0 {
        return (s0 - strike).max(0.0);
    }
    let d1 = ((s0 / strike).ln() + 0.5 * sd * sd) / sd;
    s0 * normal_cdf(d1) - strike * normal_cdf(d1 - sd)
}

/// Volatility reproducing `call` under the zero-rate Black–Scholes formula.
pub fn implied_vol(call: f64, s0: f64, strike: f64, ttm: f64) -> Result<f64> {
    let lower = (s0 - strike).max(0.0);
    let upper = s0;
    if !(s0 > 0.0 && strike > 0.0 && ttm > 0.0) {
        return Err(Error::Param(format!("need positive s0, K and T, got {s0}, {strike}, {ttm}")));
    }
    if !(call > lower && call < upper) {
        return Err(Error::OutOfBounds { call, lower, upper });
    }
    let price = |v: f64| bs_call(s0, strike, ttm, v);
    let (mut lo, mut hi) = (VOL_LO, VOL_HI);
    while price(hi) < call {
        if hi >= VOL_CAP {
            return Err(Error::OutOfBounds { call, lower, upper });
        }
        lo = hi;
        hi *= 2.0;
    }
    if price(lo) > call {
        // below the smallest bracketed volatility
        return Err(Error::OutOfBounds { call, lower, upper });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if price(mid) < call {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
