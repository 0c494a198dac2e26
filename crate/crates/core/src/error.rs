use thiserror::Error;

/// Errors raised across model construction, solving, pricing and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} has degree {degree}, exceeding the maximum {max}")]
    Degree { name: String, degree: usize, max: usize },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("index {index} out of range 0..={max}")]
    Index { index: usize, max: usize },
    #[error("state {z} lies outside the model domain {domain}")]
    Domain { z: f64, domain: String },
    #[error("model violates the no-arbitrage coefficient constraints: {0}")]
    Constraint(String),
    #[error("theta {0} is not a grid point of the model's theta family")]
    Theta(String),
    #[error("matrix exponential overflow: scaled norm {0} is not representable")]
    Overflow(f64),
    #[error("polynomial price {price} is not positive at ttm={ttm}, z={z}")]
    NonPositivePrice { price: f64, ttm: f64, z: f64 },
    #[error("maturity must be strictly positive")]
    ZeroMaturity,
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("correlation {rho} outside [-1, 1] at z={z}")]
    Correlation { rho: f64, z: f64 },
    #[error("path set carries no stock prices")]
    MissingStock,
    #[error("time {0} is not on the recorded simulation grid")]
    TimeNotRecorded(f64),
    #[error("call price {call} violates the no-arbitrage bounds ({lower}, {upper})")]
    OutOfBounds { call: f64, lower: f64, upper: f64 },
    #[error("integral does not converge: {0}")]
    Divergence(String),
    #[error("estimated truncation tail {tail:e} exceeds tolerance {tol:e}")]
    Truncation { tail: f64, tol: f64 },
    #[error("diffusion coefficient b2 is negative at z={0}")]
    NegativeDiffusion(f64),
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("could not parse number {0:?}")]
    Number(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
