//! Information matrix and the bond-price coefficient functions
//! `G(x) = exp(S x) G(0)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use num::{BigRational, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::expm::matrix_exponential;
use crate::model::{check_rate_constraints, RateModelSpec};
use crate::poly::RatPoly;

/// Exact `(n+1) x (n+1)` five-diagonal generator of the coefficient ODE.
#[derive(Clone, Debug, PartialEq)]
pub struct InformationMatrix {
    entries: Vec<Vec<BigRational>>,
}

impl InformationMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Entry `(i, j)` multiplies `g_j` in the equation for `g_i'`.
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| exact::to_f64(&self.entries[i][j]))
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Five-band generator for polynomial coefficients under
/// `drift d/dz + b2/2 d^2/dz^2 + potential`.
///
/// Row `m` collects everything landing on `z^m` from `g_{m-2} .. g_{m+2}`.
pub(crate) fn banded_generator(n: usize, drift: &RatPoly, b2: &RatPoly, potential: &RatPoly) -> InformationMatrix {
    let dim = n + 1;
    let mut entries = vec![vec![BigRational::zero(); dim]; dim];
    let pair = |m: i64| BigRational::new((m * (m - 1)).into(), 2.into());
    for (row, out) in entries.iter_mut().enumerate() {
        let m = row as i64;
        let bands = [
            (m + 2, pair(m + 2) * b2.coeff(0)),
            (m + 1, int(m + 1) * drift.coeff(0) + pair(m + 1) * b2.coeff(1)),
            (m, potential.coeff(0) + int(m) * drift.coeff(1) + pair(m) * b2.coeff(2)),
            (m - 1, potential.coeff(1) + int(m - 1) * drift.coeff(2) + pair(m - 1) * b2.coeff(3)),
            (m - 2, potential.coeff(2) + int(m - 2) * drift.coeff(3) + pair(m - 2) * b2.coeff(4)),
        ];
        for (col, value) in bands {
            if (0..dim as i64).contains(&col) {
                out[col as usize] = value;
            }
        }
    }
    InformationMatrix { entries }
}

pub fn build_information_matrix(spec: &RateModelSpec) -> Result<InformationMatrix> {
    let report = check_rate_constraints(spec);
    if !report.satisfied {
        return Err(Error::Constraint(report.summary()));
    }
    Ok(banded_generator(spec.n(), spec.a(), spec.b2(), &(-spec.r())))
}

/// Memoised `exp(S x)` keyed on the bit pattern of `x`.
#[derive(Debug, Default)]
pub(crate) struct ExpCache {
    map: Mutex<HashMap<u64, Arc<DMatrix<f64>>>>,
}

impl ExpCache {
    pub(crate) fn get_or_compute(&self, s: &DMatrix<f64>, x: f64) -> Result<Arc<DMatrix<f64>>> {
        let key = x.to_bits();
        if let Some(hit) = self.map.lock().expect("cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        // computed outside the lock; a racing duplicate computes the same value
        let value = Arc::new(matrix_exponential(s, x)?);
        self.map.lock().expect("cache poisoned").entry(key).or_insert_with(|| Arc::clone(&value));
        Ok(value)
    }

    pub(crate) fn len(&self) -> usize {
        self.map.lock().expect("cache poisoned").len()
    }
}

/// Solved polynomial bond-price model.
#[derive(Debug)]
pub struct TermStructure {
    spec: RateModelSpec,
    matrix: InformationMatrix,
    s: DMatrix<f64>,
    cache: ExpCache,
}

impl TermStructure {
    pub fn new(spec: RateModelSpec) -> Result<Self> {
        let matrix = build_information_matrix(&spec)?;
        let s = matrix.to_f64();
        Ok(Self { spec, matrix, s, cache: ExpCache::default() })
    }

    pub fn spec(&self) -> &RateModelSpec {
        &self.spec
    }

    pub fn information_matrix(&self) -> &InformationMatrix {
        &self.matrix
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn initial(&self) -> DVector<f64> {
        DVector::from_fn(self.s.nrows(), |i, _| if i == 0 { 1.0 } else { 0.0 })
    }

    pub fn exp_at(&self, x: f64) -> Result<Arc<DMatrix<f64>>> {
        self.cache.get_or_compute(&self.s, x)
    }

    pub fn cached_maturities(&self) -> usize {
        self.cache.len()
    }

    /// `(g_0(x), .., g_n(x))`, the first column of `exp(S x)`.
    pub fn solve_g(&self, x: f64) -> Result<DVector<f64>> {
        let e = self.exp_at(x)?;
        Ok(e.column(0).into_owned())
    }

    pub fn bond_price(&self, ttm: f64, z: f64) -> Result<f64> {
        self.spec.domain().check(z)?;
        let g = self.solve_g(ttm)?;
        Ok(g.iter().rev().fold(0.0, |acc, gi| acc * z + gi))
    }

    pub fn yield_curve(&self, ttm: f64, z: f64) -> Result<f64> {
        if !(ttm > 0.0) {
            return Err(Error::ZeroMaturity);
        }
        let price = self.bond_price(ttm, z)?;
        if !(price > 0.0) {
            return Err(Error::NonPositivePrice { price, ttm, z });
        }
        Ok(-price.ln() / ttm)
    }

    /// `(ttm, price, yield)` rows for a maturity grid.
    pub fn yield_table(&self, ttms: &[f64], z: f64) -> Result<Vec<[f64; 3]>> {
        ttms.iter().map(|&t| Ok([t, self.bond_price(t, z)?, self.yield_curve(t, z)?])).collect()
    }

    /// `(x, g_0(x), .., g_n(x))` rows.
    pub fn coefficient_table(&self, xs: &[f64]) -> Result<Vec<Vec<f64>>> {
        xs.iter()
            .map(|&x| {
                let mut row = vec![x];
                row.extend(self.solve_g(x)?.iter());
                Ok(row)
            })
            .collect()
    }
}

pub fn spot_rate(spec: &RateModelSpec, z: f64) -> Result<f64> {
    spec.spot_rate(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_rational, ratio};
    use crate::family::{build_family, params, Family};
    use crate::model::{compute_ai, Domain, ModelSpec};

    fn rate(family: Family, p: &[(&str, &str)]) -> RateModelSpec {
        match build_family(family, &params(p).unwrap()).unwrap() {
            ModelSpec::Rate(s) => s,
            _ => unreachable!(),
        }
    }

    fn family2() -> RateModelSpec {
        rate(Family::Rate2, &[("alpha", "0.1"), ("beta", "0.05")])
    }

    #[test]
    fn family2_matrix_matches_published_values() {
        let m = build_information_matrix(&family2()).unwrap();
        let expected = [
            [ratio(0, 1), ratio(1, 200), ratio(0, 1)],
            [ratio(-1, 1), ratio(-1, 10), ratio(1, 100)],
            [ratio(0, 1), ratio(-1, 1), ratio(-1, 5)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), &expected[i][j], "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn banding_agrees_with_generator_images() {
        let spec = rate(Family::Rate4, &[("alpha", "0.3"), ("k", "0.7")]);
        let m = build_information_matrix(&spec).unwrap();
        for i in 0..=spec.n() {
            let ai = compute_ai(&spec, i).unwrap();
            assert!(ai.in_fk(spec.n()));
            for row in 0..=spec.n() {
                assert_eq!(m.get(row, i), &ai.coeff(row));
            }
        }
    }

    #[test]
    fn constraint_violation_blocks_matrix() {
        let spec = RateModelSpec::new(
            2,
            family2().a().clone(),
            family2().b2().clone(),
            RatPoly::new(vec![ratio(0, 1), parse_rational("1.1").unwrap()]),
            Domain::half_line(ratio(0, 1)),
        )
        .unwrap();
        assert!(matches!(build_information_matrix(&spec), Err(Error::Constraint(_))));
        assert!(TermStructure::new(spec).is_err());
    }

    #[test]
    fn boundary_values() {
        let ts = TermStructure::new(family2()).unwrap();
        let g0 = ts.solve_g(0.0).unwrap();
        assert_eq!(g0.as_slice(), &[1.0, 0.0, 0.0]);
        for z in [0.0, 0.05, 3.0] {
            assert_eq!(ts.bond_price(0.0, z).unwrap(), 1.0);
        }
        assert!(matches!(ts.bond_price(1.0, -0.01), Err(Error::Domain { .. })));
        assert_eq!(ts.yield_curve(0.0, 0.05), Err(Error::ZeroMaturity));
    }

    #[test]
    fn short_maturity_expansion() {
        let ts = TermStructure::new(family2()).unwrap();
        let x = 1e-6;
        let g = ts.solve_g(x).unwrap();
        assert!((g[1] + x).abs() < 1e-10);
        let p = ts.bond_price(1e-4, 0.05).unwrap();
        assert!((p - 0.999995).abs() < 1e-8, "{p}");
        let y = ts.yield_curve(1e-4, 0.05).unwrap();
        assert!((y - 0.05).abs() < 1e-5, "{y}");
    }

    #[test]
    fn constant_short_rate_gives_flat_yield() {
        let c = ratio(3, 100);
        let spec =
            RateModelSpec::new(2, RatPoly::zero(), RatPoly::zero(), RatPoly::constant(c), Domain::real_line()).unwrap();
        let ts = TermStructure::new(spec).unwrap();
        for ttm in [0.1, 1.0, 7.5, 30.0] {
            for z in [-1.0, 0.0, 2.0] {
                let y = ts.yield_curve(ttm, z).unwrap();
                assert!((y - 0.03).abs() < 1e-13, "ttm={ttm} y={y}");
            }
        }
    }

    #[test]
    fn negative_price_is_an_error_not_clipped() {
        // Drift pushes out of [0, inf) at the boundary; the formal price turns negative.
        let spec = RateModelSpec::new(
            2,
            RatPoly::new(vec![ratio(-1, 2), ratio(0, 1), ratio(-1, 1)]),
            RatPoly::monomial(ratio(1, 1), 3),
            RatPoly::monomial(ratio(-1, 1), 1),
            Domain::half_line(ratio(0, 1)),
        )
        .unwrap();
        let ts = TermStructure::new(spec).unwrap();
        let p = ts.bond_price(3.0, 0.0).unwrap();
        assert!((p + 0.52313389).abs() < 1e-7, "{p}");
        let err = ts.yield_curve(3.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::NonPositivePrice { .. }), "{err}");
    }

    #[test]
    fn spot_rate_examples() {
        let f1 = rate(Family::Rate1, &[("alpha", "0.2"), ("beta", "0.3"), ("k", "0.5")]);
        assert_eq!(spot_rate(&f1, 0.0).unwrap(), 0.0);
        assert!((spot_rate(&f1, 0.5).unwrap() - 0.2).abs() < 1e-16);
        assert!(spot_rate(&f1, 0.6).is_err());
        assert_eq!(spot_rate(&family2(), 0.05).unwrap(), 0.05);
    }

    #[test]
    fn cache_reuses_maturities() {
        let ts = TermStructure::new(family2()).unwrap();
        for _ in 0..3 {
            ts.yield_table(&[0.5, 1.0, 2.0], 0.05).unwrap();
        }
        assert_eq!(ts.cached_maturities(), 3);
    }
}
