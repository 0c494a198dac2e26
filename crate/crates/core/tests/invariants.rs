use num::{BigInt, BigRational, One};
use polyterm::hjm::{
    max_degree_feasible, min_from_power_tail, replicate_min_from_power, replicate_power_from_calls,
    replicate_power_from_calls_tol,
};
use polyterm::io::{model_to_string, parse_model};
use polyterm::stationary::stationary_density;
use polyterm::{build_family, check_rate_constraints, Family, ModelSpec, Params, RateModelSpec, TermStructure};
use proptest::prelude::*;

fn milli(v: u32) -> BigRational {
    BigRational::new(BigInt::from(v), BigInt::from(1000))
}

fn params(pairs: &[(&str, u32)]) -> Params {
    pairs.iter().map(|&(name, v)| (name.to_string(), milli(v))).collect()
}

fn rate_params() -> impl Strategy<Value = (Family, Params)> {
    let pos = || 1u32..2000;
    prop_oneof![
        (pos(), pos(), pos()).prop_map(|(a, b, k)| (Family::Rate1, params(&[("alpha", a), ("beta", b), ("k", k)]))),
        (pos(), 1u32..300).prop_map(|(a, b)| (Family::Rate2, params(&[("alpha", a), ("beta", b)]))),
        (pos(), 1u32..300, 1u32..500, 0u32..500).prop_map(|(a, b, dk, dl)| {
            (Family::Rate3, params(&[("alpha", a), ("beta", b), ("k", b + dk), ("l", b + dk + dl)]))
        }),
        (1u32..1000, 1u32..1000).prop_map(|(a, k)| (Family::Rate4, params(&[("alpha", a), ("k", k)]))),
    ]
}

fn rate_spec(family: Family, params: &Params) -> RateModelSpec {
    match build_family(family, params).unwrap() {
        ModelSpec::Rate(spec) => spec,
        ModelSpec::Vol(_) => unreachable!("rate family built a vol model"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rate_families_satisfy_constraints((family, params) in rate_params()) {
        let spec = rate_spec(family, &params);
        prop_assert!(check_rate_constraints(&spec).satisfied);
    }

    #[test]
    fn bumping_the_top_rate_coefficient_breaks_constraints((family, params) in rate_params()) {
        let spec = rate_spec(family, &params);
        let mut r = spec.r().coeffs().to_vec();
        let top = r.len() - 1;
        r[top] += BigRational::one();
        let bumped = RateModelSpec::new(
            spec.n(),
            spec.a().clone(),
            spec.b2().clone(),
            polyterm::RatPoly::new(r),
            spec.domain().clone(),
        );
        if let Ok(bumped) = bumped {
            prop_assert!(!check_rate_constraints(&bumped).satisfied);
        }
    }

    #[test]
    fn model_text_round_trips((family, params) in rate_params()) {
        let spec = ModelSpec::Rate(rate_spec(family, &params));
        prop_assert_eq!(parse_model(&model_to_string(&spec)).unwrap(), spec);
    }

    #[test]
    fn short_end_yield_is_the_spot_rate((family, params) in rate_params(), u in 0.05f64..0.95) {
        let spec = rate_spec(family, &params);
        let (lo, hi) = (spec.domain().lo_f64(), spec.domain().hi_f64());
        let z = if hi.is_finite() { lo + (hi - lo) * u } else { lo + u / (1.0 - u) };
        let r = spec.spot_rate(z).unwrap();
        let ts = TermStructure::new(spec).unwrap();
        prop_assert!((ts.bond_price(0.0, z).unwrap() - 1.0).abs() < 1e-12);
        let h = 1e-6;
        let y = -ts.bond_price(h, z).unwrap().ln() / h;
        prop_assert!((y - r).abs() <= 1e-4 * (1.0 + r.abs()), "short yield {y} vs spot rate {r}");
    }

    #[test]
    fn stationary_cdf_is_monotone(alpha in 1u32..2000, beta in 1u32..300) {
        let spec = rate_spec(Family::Rate2, &params(&[("alpha", alpha), ("beta", beta)]));
        let density = stationary_density(&spec, (0.0, f64::INFINITY)).unwrap();
        let mut last = 0.0;
        for &(_, c) in density.cdf_grid() {
            prop_assert!(c >= last - 1e-15 && c <= 1.0 + 1e-12);
            last = c;
        }
    }

    #[test]
    fn power_claims_replicate_from_calls(s in 0.1f64..10.0, theta in 0.02f64..0.98) {
        let exact = s.powf(theta);
        let rep = replicate_power_from_calls(s, theta).unwrap();
        prop_assert!((rep - exact).abs() <= 1e-10 * exact);
    }

    #[test]
    fn refining_the_tolerance_never_hurts(s in 0.1f64..10.0, theta in 0.05f64..0.95, k in 2i32..12) {
        let exact = s.powf(theta);
        let tol = 10f64.powi(-k);
        let floor = 64.0 * f64::EPSILON * exact;
        let coarse = (replicate_power_from_calls_tol(s, theta, tol).unwrap() - exact).abs();
        let fine = (replicate_power_from_calls_tol(s, theta, tol / 2.0).unwrap() - exact).abs();
        prop_assert!(fine <= coarse.max(floor), "{fine} after {coarse}");
        prop_assert!(fine <= (tol / 2.0 * exact).max(floor), "{fine} above tolerance {}", tol / 2.0);
    }

    #[test]
    fn min_replicates_from_power_claims(s in 0.5f64..2.0, strike in 0.5f64..2.0, theta in 0.1f64..0.9) {
        let x_max = 1e5;
        let rep = replicate_min_from_power(s, strike, theta, x_max).unwrap();
        let tail = min_from_power_tail(s, strike, theta, x_max);
        prop_assert!((rep - s.min(strike)).abs() <= tail + 1e-9, "{rep} vs {}", s.min(strike));
    }

    #[test]
    fn degree_bound_is_monotone(n in 0usize..20, d in 0usize..8) {
        if max_degree_feasible(n, d + 1) {
            prop_assert!(max_degree_feasible(n, d));
        }
        if max_degree_feasible(n + 1, d) {
            prop_assert!(max_degree_feasible(n, d));
        }
    }
}
