//! Exact rational numbers and their textual forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational. Every probability in the crate is one of these.
pub type Rational = BigRational;

/// Maximum number of digits accepted after a decimal point.
pub const MAX_FRACTION_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty number")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("`{0}` has more than {MAX_FRACTION_DIGITS} fraction digits")]
    TooManyDigits(String),
}

/// Shorthand for building small literals.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Lowest-terms rendering: `p/q`, or just `p` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Parses `p/q`, an integer, or a decimal with at most nine fraction digits.
/// A leading `-` is accepted.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    if text.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let malformed = || RationalParseError::Malformed(text.to_string());
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        if !all_digits(num) || !all_digits(den) {
            return Err(malformed());
        }
        let den: BigInt = den.parse().map_err(|_| malformed())?;
        if den.is_zero() {
            return Err(RationalParseError::ZeroDenominator(text.to_string()));
        }
        Rational::new(num.parse().map_err(|_| malformed())?, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if !all_digits(whole) || !all_digits(frac) {
            return Err(malformed());
        }
        if frac.len() > MAX_FRACTION_DIGITS {
            return Err(RationalParseError::TooManyDigits(text.to_string()));
        }
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| malformed())?;
        Rational::new(digits, BigInt::from(10u64).pow(frac.len() as u32))
    } else {
        if !all_digits(body) {
            return Err(malformed());
        }
        Rational::from_integer(body.parse().map_err(|_| malformed())?)
    };
    Ok(if negative { -value } else { value })
}

/// `|a - b|`
pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}
