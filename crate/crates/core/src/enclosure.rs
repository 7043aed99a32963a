//! Validated enclosures: rational intervals guaranteed to contain a real
//! value.
//!
//! An [`Enclosure`] is the crate's substitute for exact arithmetic on
//! irrational values. Affine operations are exact (zero-width in, zero-width
//! out); rational powers go through outward-rounded integer root extraction
//! to dyadic bounds, so the contract `lo <= true value <= hi` holds
//! unconditionally.

use crate::rational::{bit_size, midpoint, pow2, rat_i, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A closed rational interval `[lo, hi]` certified to contain a real value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    /// Zero-width enclosure of an exactly known value.
    pub fn exact(x: Rational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    /// Enclosure from ordered bounds. Panics if `lo > hi`.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "enclosure bounds out of order");
        Enclosure { lo, hi }
    }

    /// Hull of two enclosures.
    pub fn hull(a: &Enclosure, b: &Enclosure) -> Self {
        Enclosure {
            lo: a.lo.clone().min(b.lo.clone()),
            hi: a.hi.clone().max(b.hi.clone()),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        midpoint(&self.lo, &self.hi)
    }

    /// True when the enclosure pins down a single rational.
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// The exact value, when there is one.
    pub fn as_exact(&self) -> Option<&Rational> {
        if self.is_exact() {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Distance between enclosures as intervals; zero when they intersect.
    pub fn gap_to(&self, other: &Enclosure) -> Rational {
        if self.intersects(other) {
            Rational::zero()
        } else if self.hi < other.lo {
            &other.lo - &self.hi
        } else {
            &self.lo - &other.hi
        }
    }

    /// Distance from the enclosure to a point; zero when contained.
    pub fn dist_to_point(&self, x: &Rational) -> Rational {
        if self.contains(x) {
            Rational::zero()
        } else if x < &self.lo {
            &self.lo - x
        } else {
            x - &self.hi
        }
    }

    /// `self + x`, exact.
    pub fn shift(&self, x: &Rational) -> Enclosure {
        Enclosure {
            lo: &self.lo + x,
            hi: &self.hi + x,
        }
    }

    /// `self * c` for a nonzero rational, exact (flips bounds for `c < 0`).
    pub fn scale(&self, c: &Rational) -> Enclosure {
        if c.is_negative() {
            Enclosure {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Enclosure {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    /// Rounds the bounds outward onto the grid `2^-bits`, capping coefficient
    /// growth. Exact enclosures with small representations are left alone.
    pub fn round_outward(&self, bits: u64) -> Enclosure {
        if bit_size(&self.lo) <= 2 * bits && bit_size(&self.hi) <= 2 * bits {
            return self.clone();
        }
        Enclosure {
            lo: floor_to_grid(&self.lo, bits),
            hi: ceil_to_grid(&self.hi, bits),
        }
    }
}

impl std::fmt::Display for Enclosure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Largest multiple of `2^-bits` that is `<= x`.
pub fn floor_to_grid(x: &Rational, bits: u64) -> Rational {
    let scale = BigInt::one() << (bits as usize);
    let scaled = (x.numer() * &scale).div_floor(x.denom());
    Rational::new(scaled, scale)
}

/// Smallest multiple of `2^-bits` that is `>= x`.
pub fn ceil_to_grid(x: &Rational, bits: u64) -> Rational {
    let scale = BigInt::one() << (bits as usize);
    let scaled = (x.numer() * &scale).div_ceil(x.denom());
    Rational::new(scaled, scale)
}

/// Floor of the `q`-th root of a nonnegative rational: the largest integer
/// `n` with `n^q <= x`.
fn floor_root_rational(x: &Rational, q: u32) -> BigInt {
    debug_assert!(!x.is_negative());
    let whole = x.numer().div_floor(x.denom());
    let n = whole.nth_root(q);
    debug_assert!(num_traits::pow::pow(n.clone(), q as usize) <= whole);
    n
}

/// `x^(1/q)` for `x >= 0`, exact when `x` is a perfect `q`-th power of a
/// rational, otherwise a dyadic enclosure of width `<= 2^-bits`.
pub fn root_enclosure(x: &Rational, q: u32, bits: u64) -> Enclosure {
    debug_assert!(q >= 1);
    debug_assert!(!x.is_negative());
    if q == 1 || x.is_zero() || x.is_one() {
        return Enclosure::exact(x.clone());
    }
    // Perfect-power fast path: both numerator and denominator are q-th powers.
    let rn = x.numer().nth_root(q);
    let rd = x.denom().nth_root(q);
    if num_traits::pow::pow(rn.clone(), q as usize) == *x.numer()
        && num_traits::pow::pow(rd.clone(), q as usize) == *x.denom()
    {
        return Enclosure::exact(Rational::new(rn, rd));
    }
    // lo = floor(x^(1/q) * 2^bits) / 2^bits, hi = lo + 2^-bits.
    let scale = pow2(bits as i64 * q as i64);
    let n = floor_root_rational(&(x * &scale), q);
    let lo = Rational::new(n.clone(), BigInt::one() << (bits as usize));
    let hi = Rational::new(n + BigInt::one(), BigInt::one() << (bits as usize));
    Enclosure::new(lo, hi)
}

/// `x^e` for `x >= 0` and a positive rational exponent `e = p/q`; exact when
/// the root part resolves to a rational, otherwise an enclosure of width
/// `<= prec`.
///
/// The root is taken first and the integer power applied to the resulting
/// bounds, so intermediate values never blow up even for large `p`.
pub fn pow_enclosure(x: &Rational, e: &Rational, prec: &Rational) -> Enclosure {
    assert!(e.is_positive(), "power exponent must be positive");
    assert!(!x.is_negative(), "power base must be nonnegative");
    assert!(prec.is_positive());
    let p = e
        .numer()
        .to_u64()
        .expect("power exponent numerator out of range");
    let q = e
        .denom()
        .to_u32()
        .expect("power exponent denominator out of range");
    if x.is_zero() || x.is_one() {
        return Enclosure::exact(x.clone());
    }

    let mut bits = prec_bits(prec) + 8;
    loop {
        let root = root_enclosure(x, q, bits);
        if let Some(r) = root.as_exact() {
            // Keep modest exact powers exact; cap growth for huge exponents.
            if p <= 64 {
                return Enclosure::exact(crate::rational::pow_int(r, p as i64));
            }
        }
        let result = pow_pos_interval(&root, p, bits + 16);
        if result.is_exact() || result.width() <= *prec {
            return result;
        }
        bits = bits * 2 + 16;
    }
}

/// `[lo, hi]^p` for nonnegative bounds and `p >= 1`, with outward rounding to
/// keep mantissas near `bits`.
fn pow_pos_interval(e: &Enclosure, p: u64, bits: u64) -> Enclosure {
    if p == 1 {
        return e.clone();
    }
    let mut acc = Enclosure::exact(Rational::one());
    let mut base = e.clone();
    let mut n = p;
    while n > 0 {
        if n & 1 == 1 {
            acc = Enclosure::new(acc.lo() * base.lo(), acc.hi() * base.hi()).round_outward(bits);
        }
        n >>= 1;
        if n > 0 {
            base =
                Enclosure::new(base.lo() * base.lo(), base.hi() * base.hi()).round_outward(bits);
        }
    }
    acc
}

/// Number of fractional bits needed so that `2^-bits <= prec`.
pub fn prec_bits(prec: &Rational) -> u64 {
    let mut bits = 1u64;
    let mut grid = rat_i(1) / rat_i(2);
    while &grid > prec {
        grid = grid / rat_i(2);
        bits += 1;
        assert!(bits < 1 << 20, "precision request unreasonably small");
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{pow_int, rat};
    use proptest::prelude::*;

    #[test]
    fn grid_rounding_brackets_value() {
        let x = rat(7, 27);
        let lo = floor_to_grid(&x, 10);
        let hi = ceil_to_grid(&x, 10);
        assert!(lo <= x && x <= hi);
        assert!(&hi - &lo <= pow2(-10));
    }

    #[test]
    fn exact_roots_detected() {
        assert_eq!(
            root_enclosure(&rat(1, 8), 3, 40).as_exact(),
            Some(&rat(1, 2))
        );
        assert_eq!(
            root_enclosure(&rat(9, 4), 2, 40).as_exact(),
            Some(&rat(3, 2))
        );
    }

    #[test]
    fn cube_root_of_half_brackets_truth() {
        // Soundness is checkable exactly: cube the bounds back.
        let e = pow_enclosure(&rat(1, 2), &rat(1, 3), &pow2(-40));
        assert!(e.width() <= pow2(-40));
        assert!(pow_int(e.lo(), 3) <= rat(1, 2));
        assert!(pow_int(e.hi(), 3) >= rat(1, 2));
        // 2^(-1/3) ~ 0.7937
        assert!(e.lo() > &rat(79, 100) && e.hi() < &rat(80, 100));
    }

    #[test]
    fn large_numerator_exponent_stays_bounded() {
        // (1/2)^(4096/3): root first, then the big power.
        let e = pow_enclosure(&rat(1, 2), &rat(4096, 3), &pow2(-42));
        assert!(e.width() <= pow2(-42));
        assert!(e.hi() < &rat(1, 1000));
    }

    proptest! {
        #[test]
        fn root_enclosures_sound(n in 1u32..500, d in 1u32..500, q in 2u32..6) {
            let x = rat(n as i64, d as i64);
            let e = root_enclosure(&x, q, 30);
            prop_assert!(pow_int(e.lo(), q as i64) <= x);
            prop_assert!(pow_int(e.hi(), q as i64) >= x);
            prop_assert!(e.width() <= pow2(-30) + pow2(-60));
        }

        #[test]
        fn pow_monotone_in_base(a in 1u32..200, b in 1u32..200) {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let xa = rat(a as i64, 201);
            let xb = rat(b as i64, 201);
            let pa = pow_enclosure(&xa, &rat(1, 3), &pow2(-30));
            let pb = pow_enclosure(&xb, &rat(1, 3), &pow2(-30));
            // Order can only be attested up to enclosure overlap.
            prop_assert!(pa.lo() <= pb.hi());
        }
    }
}
