//! Exact rational arithmetic helpers.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. All comparisons and arithmetic are exact; this is
//! the coordinate type for every breakpoint, designated point, and tolerance
//! in the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

pub type Rational = BigRational;

/// `n/d` as a `Rational`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as a `Rational`.
pub fn rat_i(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `3^e` for a (possibly negative) exponent.
pub fn pow3(e: i64) -> Rational {
    pow_int(&rat_i(3), e)
}

/// `2^e` for a (possibly negative) exponent.
pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << (e as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

/// `b^e` with integer exponent, exact.
pub fn pow_int(b: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let mut acc = Rational::one();
    let mut base = b.clone();
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    if e > 0 {
        acc
    } else {
        acc.recip()
    }
}

/// Parses `"p/q"` or an integer string, accepting an optional sign.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    match t.parse::<BigRational>() {
        Ok(r) => Ok(r),
        Err(e) => Err(format!("invalid rational {t:?}: {e}")),
    }
}

/// Renders in the same format `parse_rational` accepts.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Absolute value.
pub fn rabs(r: &Rational) -> Rational {
    r.abs()
}

/// Approximate `f64` value (for reporting only, never for decisions).
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Out-of-range values only occur for extreme intermediate points;
        // saturate by sign.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Midpoint of two rationals.
pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / rat_i(2)
}

/// Number of bits needed to store numerator plus denominator; used to decide
/// when an exact value has grown too large to keep exact.
pub fn bit_size(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}
