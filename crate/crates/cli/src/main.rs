//! `polyterm`: batch front end writing plot-ready CSV and JSON reports.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "polyterm", version, about = "Polynomial term-structure and stochastic-volatility models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the no-arbitrage coefficient constraints; exit 2 on violation.
    Validate(ModelArgs),
    /// Tabulate the coefficient functions g_i (rates) or k_i (vol).
    Solve(GridArgs),
    /// Bond prices (rates) or power-claim prices (vol) on a maturity grid.
    Price(GridArgs),
    /// Yield curve of a rate model.
    Yield(GridArgs),
    /// Euler paths of the factor, with the stock for vol models.
    Simulate(SimArgs),
    /// Stationary density and CDF of a rate model's factor.
    Stationary(ModelArgs),
    /// Power-claim price surface and forward variance of a vol model.
    PowerPrice(GridArgs),
    /// Monte Carlo call prices converted to Black-Scholes implied volatilities.
    ImpliedVol(ImpliedVolArgs),
    /// Forward-variance drift and spot-variance checks plus replication identities.
    VerifyHjm(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Model JSON file.
    #[arg(long)]
    pub model: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Maturities, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,3,5,7,10")]
    pub ttm_grid: Vec<f64>,
    /// Grid values of theta, comma separated; all grid points when omitted.
    #[arg(long, value_delimiter = ',')]
    pub theta_list: Vec<f64>,
    /// Initial factor value; the domain midpoint when omitted.
    #[arg(long)]
    pub z0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub dt: f64,
    /// Horizon.
    #[arg(long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    /// Time between stored samples; every step when omitted.
    #[arg(long)]
    pub record_every: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ImpliedVolArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub dt: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1")]
    pub ttm_grid: Vec<f64>,
    /// Strikes as multiples of s0.
    #[arg(long, value_delimiter = ',', default_value = "0.8,0.9,1,1.1,1.2")]
    pub moneyness: Vec<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Seed of the residual sample points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of residual sample points.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Largest maturity sampled.
    #[arg(long = "T", default_value_t = 2.0)]
    pub horizon: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
