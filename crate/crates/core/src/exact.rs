//! Exact conversions between decimal strings, binary floats and rationals.
//!
//! Model coefficients travel as decimal strings so that constraint checks see
//! the exact value the user wrote, not its nearest binary double.

use num::bigint::{BigInt, Sign};
use num::{BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parse `"-1.25e-3"`, `"7"`, `".5"` or `"1/200"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::Number(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let p: BigInt = num.trim().parse().map_err(|_| bad())?;
        let q: BigInt = den.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }

    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = body[pos + 1..].parse().map_err(|_| bad())?;
            (&body[..pos], exp)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let factor = num::pow::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= BigRational::from_integer(factor);
    } else {
        value /= BigRational::from_integer(factor);
    }
    Ok(if negative { -value } else { value })
}

/// Lossless text form: a terminating decimal when one exists, else `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    let numer = r.numer();
    let denom = r.denom();
    let (mut rest, mut twos, mut fives) = (denom.clone(), 0usize, 0usize);
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    while (&rest % &two).is_zero() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{numer}/{denom}");
    }
    let scale = twos.max(fives);
    let scaled = numer * num::pow::pow(BigInt::from(10u32), scale) / denom;
    let digits = scaled.abs().to_string();
    let sign = if scaled.sign() == Sign::Minus { "-" } else { "" };
    if scale == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{digits:0>width$}", width = scale + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - scale);
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// The exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Number(x.to_string()))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Shorthand for small exact constants `p/q`.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_forms() {
        assert_eq!(parse_rational("0.005").unwrap(), ratio(1, 200));
        assert_eq!(parse_rational("-1e-4").unwrap(), ratio(-1, 10_000));
        assert_eq!(parse_rational("1/200").unwrap(), ratio(1, 200));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("+12.50E1").unwrap(), ratio(125, 1));
        assert_eq!(parse_rational("3").unwrap(), ratio(3, 1));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1.2.3", "1e", "1/0", ".", "-", "0x10"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn formats_terminating_and_repeating() {
        assert_eq!(format_rational(&ratio(1, 200)), "0.005");
        assert_eq!(format_rational(&ratio(-3, 4)), "-0.75");
        assert_eq!(format_rational(&ratio(10, 1)), "10");
        assert_eq!(format_rational(&ratio(1, 3)), "1/3");
        assert_eq!(format_rational(&ratio(-1, 10_000)), "-0.0001");
        assert_eq!(format_rational(&BigRational::zero()), "0");
    }

    #[test]
    fn text_round_trip() {
        for (p, q) in [(1, 200), (-7, 3), (123_456, 1000), (1, 1 << 20), (0, 1)] {
            let r = ratio(p, q);
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
}
