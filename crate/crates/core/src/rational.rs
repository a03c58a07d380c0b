//! Exact rational scalars.
//!
//! Every quantity in this crate (abscissae, values, slopes, scale factors and
//! invariant endpoints) is an arbitrary-precision rational kept in lowest terms
//! with a positive denominator. Floating point never enters a decision.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational in lowest terms.
pub type ExactRational = num_rational::BigRational;

/// Build `n/d` from machine integers. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

/// Build the integer `n` as a rational.
pub fn int(n: i64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

/// Error returned when a token is not a `p/q` or integer literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}` (expected `p/q` or an integer)")]
pub struct RationalParseError(pub String);

/// Parse `p/q` or `p`, with an optional leading sign on `p`.
///
/// Decimal points, exponents and whitespace are rejected.
pub fn parse_rational(text: &str) -> Result<ExactRational, RationalParseError> {
    let fail = || RationalParseError(text.to_string());
    let parse_int = |s: &str, allow_sign: bool| -> Option<BigInt> {
        let digits = match s.strip_prefix('-').or_else(|| s.strip_prefix('+')) {
            Some(rest) if allow_sign => rest,
            Some(_) => return None,
            None => s,
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        BigInt::from_str(s.trim_start_matches('+')).ok()
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let n = parse_int(n, true).ok_or_else(fail)?;
            let d = parse_int(d, false).ok_or_else(fail)?;
            if d.is_zero() {
                return Err(fail());
            }
            Ok(ExactRational::new(n, d))
        }
        None => parse_int(text, true)
            .map(ExactRational::from_integer)
            .ok_or_else(fail),
    }
}

/// Displays a rational as `p/q`, or `p` when the denominator is one.
pub struct Display<'a>(pub &'a ExactRational);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Shorthand for `Display(r).to_string()`.
pub fn show(r: &ExactRational) -> String {
    Display(r).to_string()
}

/// Exact `k`-th root of a positive rational, if it is itself rational.
pub fn exact_root(value: &ExactRational, k: u32) -> Option<ExactRational> {
    if !value.is_positive() || k == 0 {
        return None;
    }
    let n = value.numer().nth_root(k);
    let d = value.denom().nth_root(k);
    if n.pow(k) == *value.numer() && d.pow(k) == *value.denom() {
        Some(ExactRational::new(n, d))
    } else {
        None
    }
}

/// Integer power for a non-negative exponent.
pub fn pow(base: &ExactRational, exp: u32) -> ExactRational {
    num_traits::pow(base.clone(), exp as usize)
}

/// Smallest exponents `(a, b)` with `a, b <= cap` and `x^a == y^b`, for `x, y > 1`.
///
/// The scan walks both power sequences in increasing order, so it costs at
/// most `2 * cap` multiplications.
pub fn common_power(x: &ExactRational, y: &ExactRational, cap: u32) -> Option<(u32, u32)> {
    let one = ExactRational::one();
    if *x <= one || *y <= one {
        return None;
    }
    let (mut px, mut py) = (x.clone(), y.clone());
    let (mut a, mut b) = (1u32, 1u32);
    while a <= cap && b <= cap {
        match px.cmp(&py) {
            std::cmp::Ordering::Equal => return Some((a, b)),
            std::cmp::Ordering::Less => {
                px *= x;
                a += 1;
            }
            std::cmp::Ordering::Greater => {
                py *= y;
                b += 1;
            }
        }
    }
    None
}

/// Lossy conversion for display and numeric cross-checks only.
pub fn to_f64(r: &ExactRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
