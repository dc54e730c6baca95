//! Helpers for exact rational scalars.
//!
//! All quantities in this crate are `BigRational` (arbitrary-precision,
//! always reduced). Serialization uses the canonical `"p/q"` form, or a bare
//! integer string when the denominator is 1, which is exactly what
//! `Display`/`FromStr` on `Ratio` produce.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::InvalidInput("empty rational literal".into()));
    }
    s.parse::<BigRational>().map_err(|e| Error::InvalidInput(format!("bad rational {s:?}: {e}")))
}

/// Parses a rational and rejects negative values.
pub fn parse_nonneg_rational(s: &str) -> Result<BigRational> {
    let r = parse_rational(s)?;
    if r.is_negative() {
        return Err(Error::InvalidInput(format!("negative value {s:?} not allowed here")));
    }
    Ok(r)
}

/// Canonical string form: reduced, `"p/q"` or integer `"p"`.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// Least common multiple of the denominators of the given values.
/// Returns 1 for an empty slice.
pub fn lcm_of_denominators(values: &[BigRational]) -> BigInt {
    let mut l = BigInt::one();
    for v in values {
        l = l.lcm(v.denom());
    }
    l
}

/// True if `r` is an integer (denominator 1).
pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Floor of a nonnegative rational as a BigInt.
pub fn floor_int(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// The zero rational.
pub fn zero() -> BigRational {
    BigRational::zero()
}

/// The unit rational.
pub fn one() -> BigRational {
    BigRational::one()
}
