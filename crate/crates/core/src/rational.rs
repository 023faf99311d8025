//! Exact rational arithmetic.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with
//! a positive denominator. There is no rounding anywhere in this crate.

use alloc::string::String;
use alloc::string::ToString;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Arbitrary-precision rational number, always reduced, denominator > 0.
pub type Rational = num_rational::BigRational;

/// Shorthand for small rational constants in code and tests.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Error raised when a rational literal cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    input: String,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal: {:?}", self.input)
    }
}

impl core::error::Error for ParseRationalError {}

/// Parses `"p/q"`, integer, or decimal literals (`"0.75"`) exactly.
///
/// Decimal literals are converted without rounding, so `"0.1"` becomes
/// exactly 1/10.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    let err = || ParseRationalError {
        input: s.to_string(),
    };
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let sign = if int_part.trim_start().starts_with('-') {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let int_part: BigInt = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| err())?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits: BigInt = frac_part.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Ok(Rational::from_integer(int_part) + Rational::new(sign * digits, scale));
    }
    let int: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(int))
}
