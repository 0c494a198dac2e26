//! Built-in parametric model families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{format_rational, ratio};
use crate::model::{Domain, ModelSpec, RateModelSpec, VolModelSpec};
use crate::poly::RatPoly;

/// Named family parameters, exact.
pub type Params = BTreeMap<String, BigRational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `dZ = aZ(Z-k)dt + sqrt(bZ(k-Z))dW`, `r = 2aZ`, on `[0, k]`.
    Rate1,
    /// `dZ = a(b-Z)dt + sqrt(Z^3)dW`, `r = Z`, on `[0, inf)`.
    Rate2,
    /// `dZ = a(b-Z)dt + sqrt(Z(k-Z)(l-Z))dW`, `r = Z`, on `[0, k]`.
    Rate3,
    /// Cubic drift, quartic variance, `r = Z^2`, on `[0, 2k]`.
    Rate4,
    /// `|h|^2 = 2N^2 z + h0`, `n(i/N) = i(N-i)`, factor on `[0, gamma]`.
    Vol6,
    /// `|h|^2 = cN^2 z + h0`, `n(i/N) = min(i, N-i)`, factor on `[0, gamma]`.
    Vol7,
    /// Constant variance `sigma2` with `n(theta) = 0` everywhere.
    VolConstant,
}

impl Family {
    pub const ALL: [Family; 7] =
        [Family::Rate1, Family::Rate2, Family::Rate3, Family::Rate4, Family::Vol6, Family::Vol7, Family::VolConstant];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rate1 => "rate-family-1",
            Family::Rate2 => "rate-family-2",
            Family::Rate3 => "rate-family-3",
            Family::Rate4 => "rate-family-4",
            Family::Vol6 => "vol-example-6",
            Family::Vol7 => "vol-example-7",
            Family::VolConstant => "vol-constant",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Rate1 => &["alpha", "beta", "k"],
            Family::Rate2 => &["alpha", "beta"],
            Family::Rate3 => &["alpha", "beta", "k", "l"],
            Family::Rate4 => &["alpha", "k"],
            Family::Vol6 => &["N", "h0", "alpha1", "alpha2", "beta", "gamma"],
            Family::Vol7 => &["N", "c", "h0", "alpha1", "alpha2", "beta", "gamma"],
            Family::VolConstant => &["N", "sigma2"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::Param(format!("unknown family {s:?}")))
    }
}

fn get<'a>(params: &'a Params, name: &str) -> Result<&'a BigRational> {
    params.get(name).ok_or_else(|| Error::Param(format!("missing parameter {name:?}")))
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Param(format!("parameter range violated: {what}")))
    }
}

fn grid_size(params: &Params) -> Result<usize> {
    let n = get(params, "N")?;
    require(n.is_integer() && *n >= ratio(2, 1), "N must be an integer >= 2")?;
    n.to_integer().to_usize().ok_or_else(|| Error::Param("N too large".into()))
}

fn poly(coeffs: Vec<BigRational>) -> RatPoly {
    RatPoly::new(coeffs)
}

fn zero() -> BigRational {
    BigRational::zero()
}

/// Expand a family into its polynomial model.
pub fn build_family(family: Family, params: &Params) -> Result<ModelSpec> {
    for key in params.keys() {
        if !family.param_names().contains(&key.as_str()) {
            return Err(Error::Param(format!("unexpected parameter {key:?} for {family}")));
        }
    }
    match family {
        Family::Rate1 => {
            let (alpha, beta, k) = (get(params, "alpha")?, get(params, "beta")?, get(params, "k")?);
            require(alpha.is_positive() && beta.is_positive() && k.is_positive(), "alpha, beta, k > 0")?;
            let a = poly(vec![zero(), -(alpha * k), alpha.clone()]);
            let b2 = poly(vec![zero(), beta * k, -beta.clone()]);
            let r = poly(vec![zero(), alpha * ratio(2, 1)]);
            let domain = Domain::interval(zero(), k.clone())?;
            Ok(ModelSpec::Rate(
                RateModelSpec::new(2, a, b2, r, domain)?
                    .with_warning("factor may be absorbed at a boundary of [0, k] in finite time"),
            ))
        }
        Family::Rate2 => {
            let (alpha, beta) = (get(params, "alpha")?, get(params, "beta")?);
            require(alpha.is_positive() && beta.is_positive(), "alpha, beta > 0")?;
            let a = poly(vec![alpha * beta, -alpha.clone()]);
            let b2 = RatPoly::monomial(BigRational::one(), 3);
            let r = RatPoly::monomial(BigRational::one(), 1);
            Ok(ModelSpec::Rate(RateModelSpec::new(2, a, b2, r, Domain::half_line(zero()))?))
        }
        Family::Rate3 => {
            let (alpha, beta) = (get(params, "alpha")?, get(params, "beta")?);
            let (k, l) = (get(params, "k")?, get(params, "l")?);
            require(alpha.is_positive(), "alpha > 0")?;
            require(beta.is_positive() && beta < k && k <= l, "0 < beta < k <= l")?;
            let a = poly(vec![alpha * beta, -alpha.clone()]);
            // z (k - z)(l - z)
            let b2 = poly(vec![zero(), k * l, -(k + l), BigRational::one()]);
            let r = RatPoly::monomial(BigRational::one(), 1);
            let domain = Domain::interval(zero(), k.clone())?;
            Ok(ModelSpec::Rate(RateModelSpec::new(2, a, b2, r, domain)?))
        }
        Family::Rate4 => {
            let (alpha, k) = (get(params, "alpha")?, get(params, "k")?);
            require(alpha.is_positive() && k.is_positive(), "alpha, k > 0")?;
            let m = k * ratio(2, 1) + alpha;
            let m2 = &m * &m;
            // (z - k)(z^2 - m^2)
            let a = poly(vec![k * &m2, -m2.clone(), -k.clone(), BigRational::one()]);
            // -z^3 (z - 2k)
            let b2 = poly(vec![zero(), zero(), zero(), k * ratio(2, 1), -BigRational::one()]);
            let r = RatPoly::monomial(BigRational::one(), 2);
            let domain = Domain::interval(zero(), k * ratio(2, 1))?;
            Ok(ModelSpec::Rate(RateModelSpec::new(2, a, b2, r, domain)?))
        }
        Family::Vol6 => {
            let big_n = grid_size(params)?;
            let (h0, beta, gamma) = (get(params, "h0")?, get(params, "beta")?, get(params, "gamma")?);
            let (alpha1, alpha2) = (get(params, "alpha1")?, get(params, "alpha2")?);
            require(!h0.is_negative(), "h0 >= 0")?;
            require(beta.is_positive(), "beta > 0")?;
            require(alpha1.is_positive() && alpha1 < gamma && gamma < alpha2, "0 < alpha1 < gamma < alpha2")?;
            let nn = BigRational::from_integer((big_n * big_n).into());
            let h2 = poly(vec![h0.clone(), nn * ratio(2, 1)]);
            // beta z (gamma - z)
            let b2 = poly(vec![zero(), beta * gamma, -beta.clone()]);
            // (z - alpha1)(z - alpha2)
            let a = poly(vec![alpha1 * alpha2, -(alpha1 + alpha2), BigRational::one()]);
            let nmap = (1..big_n).map(|i| i * (big_n - i)).collect();
            let domain = Domain::interval(zero(), gamma.clone())?;
            Ok(ModelSpec::Vol(VolModelSpec::new(big_n, h2, b2, RatPoly::zero(), a, nmap, domain)?))
        }
        Family::Vol7 => {
            let big_n = grid_size(params)?;
            let (c, h0) = (get(params, "c")?, get(params, "h0")?);
            let (beta, gamma) = (get(params, "beta")?, get(params, "gamma")?);
            let (alpha1, alpha2) = (get(params, "alpha1")?, get(params, "alpha2")?);
            require(c.is_positive(), "c > 0")?;
            require(!h0.is_negative(), "h0 >= 0")?;
            require(!beta.is_negative(), "beta >= 0")?;
            require(alpha1.is_positive() && alpha1 < gamma && gamma < alpha2, "0 < alpha1 < gamma < alpha2")?;
            let nn = BigRational::from_integer((big_n * big_n).into());
            let h2 = poly(vec![h0.clone(), c * nn]);
            // c z (z + beta)(gamma - z)
            let b2 = poly(vec![zero(), c * beta * gamma, c * (gamma - beta), -c.clone()]);
            // (N-1)c/2 (z - alpha1)(z - alpha2)
            let lead = c * BigRational::from_integer((big_n - 1).into()) / ratio(2, 1);
            let a = poly(vec![&lead * alpha1 * alpha2, -(&lead * (alpha1 + alpha2)), lead.clone()]);
            let nmap = (1..big_n).map(|i| i.min(big_n - i)).collect();
            let domain = Domain::interval(zero(), gamma.clone())?;
            Ok(ModelSpec::Vol(VolModelSpec::new(big_n, h2, b2, RatPoly::zero(), a, nmap, domain)?))
        }
        Family::VolConstant => {
            let big_n = grid_size(params)?;
            let sigma2 = get(params, "sigma2")?;
            require(!sigma2.is_negative(), "sigma2 >= 0")?;
            Ok(ModelSpec::Vol(VolModelSpec::new(
                big_n,
                RatPoly::constant(sigma2.clone()),
                RatPoly::zero(),
                RatPoly::zero(),
                RatPoly::zero(),
                vec![0; big_n - 1],
                Domain::real_line(),
            )?))
        }
    }
}

/// Convenience for building parameter maps from `(name, decimal)` pairs.
pub fn params(pairs: &[(&str, &str)]) -> Result<Params> {
    pairs.iter().map(|(k, v)| Ok((k.to_string(), crate::exact::parse_rational(v)?))).collect()
}

pub fn describe_params(params: &Params) -> String {
    params.iter().map(|(k, v)| format!("{k}={}", format_rational(v))).collect::<Vec<_>>().join(", ")
}
