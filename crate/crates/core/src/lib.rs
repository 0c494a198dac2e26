//! Arbitrage-free polynomial interest-rate and stochastic-volatility models.
//!
//! Bond prices are `P = sum g_i(T-t) Z^i` and power-option prices are
//! `S^theta sum k_i(T-t, theta) Z^i` for a scalar polynomial diffusion `Z`.
//! Coefficient constraints are checked in exact rational arithmetic; pricing,
//! simulation and quadrature run in `f64`.

pub mod error;
pub mod exact;
pub mod expm;
pub mod family;
pub mod hjm;
pub mod io;
pub mod model;
pub mod poly;
pub mod quad;
pub mod sim;
pub mod stationary;
pub mod term;
pub mod vol;

pub use error::{Error, Result};
pub use family::{build_family, Family, Params};
pub use hjm::{drift_residual, max_degree_feasible, spot_variance_check, ForwardVarianceSpec, ResidualReport};
pub use model::{
    check_rate_constraints, check_vol_constraints, compute_ai, compute_bi, ConstraintReport, Domain, ModelSpec,
    RateModelSpec, Theta, VolModelSpec,
};
pub use poly::{Polynomial, RatPoly};
pub use term::{build_information_matrix, spot_rate, InformationMatrix, TermStructure};
pub use vol::{build_theta_matrix, ThetaSolution, VolEngine};
