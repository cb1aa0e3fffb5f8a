//! Exact rational numbers used for every probability in the crate.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Floating point values only enter through
//! [`from_f64_micro`], which rounds to the nearest multiple of `1e-6`.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number in reduced form.
pub type Rational = num_rational::BigRational;

/// Denominator used when converting floating point inputs.
pub const MICRO: i64 = 1_000_000;

/// `num / den` as a reduced rational. Panics on a zero denominator.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Rounds a float to the nearest multiple of `1/MICRO`.
pub fn from_f64_micro(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite number {x}")));
    }
    let scaled = (x * MICRO as f64).round();
    if scaled.abs() > 9.0e18 {
        return Err(Error::Parse(format!("number {x} out of range")));
    }
    Ok(q(scaled as i64, MICRO))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"3"`, `"-1/12"`, `"0.45"` or `"1e-3"` exactly.
///
/// Decimal and scientific forms are parsed digit-by-digit, never through a
/// float, so `"0.1"` is exactly `1/10`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse {s:?} as a rational number"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all).map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// `p/q` rendering (integers render without a denominator).
pub fn exact(x: &Rational) -> String {
    x.to_string()
}

/// Decimal rendering with 12 significant digits.
pub fn decimal12(x: &Rational) -> String {
    let v = to_f64(x);
    if v == 0.0 {
        return "0".to_string();
    }
    let mut out = String::new();
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let _ = write!(out, "{v:.decimals$}");
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    if out == "-0" {
        out = "0".to_string();
    }
    out
}

pub fn is_probability(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Dot product of two equally long slices.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_forms() {
        assert_eq!(parse_rational("1/12").unwrap(), q(1, 12));
        assert_eq!(parse_rational("0.45").unwrap(), q(9, 20));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational("2.5e-1").unwrap(), q(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn float_rounding_to_micro() {
        assert_eq!(from_f64_micro(0.3).unwrap(), q(3, 10));
        assert_eq!(from_f64_micro(1.0 / 12.0).unwrap(), q(83_333, 1_000_000));
        assert!(from_f64_micro(f64::NAN).is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal12(&q(1, 4)), "0.25");
        assert_eq!(decimal12(&q(1, 3)), "0.333333333333");
        assert_eq!(decimal12(&q(2, 3)), "0.666666666667");
        assert_eq!(decimal12(&zero()), "0");
        assert_eq!(decimal12(&int(1)), "1");
        assert_eq!(exact(&q(2, 4)), "1/2");
    }
}
