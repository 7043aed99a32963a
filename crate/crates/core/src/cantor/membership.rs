//! Exact membership decisions for rational points.
//!
//! The ternary expansion of a rational is eventually periodic, so
//! membership in the middle-thirds Cantor set is decidable: the expansion
//! either avoids the digit 1 forever (detected by cycle detection on the
//! remainders) or enters a removed middle third at some finite depth.

use super::address::{CantorAddress, GapId, Tail};
use super::CantorError;
use crate::rational::{rat, rat_i, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

/// Outcome of a membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// In the Cantor set, with its full address.
    InC(CantorAddress),
    /// In a removed gap, with the gap id and the affine-normalized
    /// coordinate of the point inside the open gap (in `(0, 1)`).
    InGap(GapId, Rational),
    /// Only produced by enclosure-valued queries that straddle structure
    /// finer than the requested depth.
    Undetermined,
}

/// Exact membership decision for a rational point of `[0, 1]`.
pub fn membership(x: &Rational) -> Result<Membership, CantorError> {
    if x.is_negative() || x > &rat_i(1) {
        return Err(CantorError::OutOfUnitInterval(x.clone()));
    }
    let mut digits: Vec<u8> = Vec::new();
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut u = x.clone();
    loop {
        if u.is_one() {
            // Remaining expansion is all twos.
            return Ok(Membership::InC(CantorAddress::new(digits, Tail::AllTwos)));
        }
        if u.is_zero() {
            return Ok(Membership::InC(CantorAddress::new(digits, Tail::AllZeros)));
        }
        if u == rat(1, 3) {
            // 0.1000... rewrites to 0.0(2): a gap left endpoint.
            digits.push(0);
            return Ok(Membership::InC(CantorAddress::new(digits, Tail::AllTwos)));
        }
        if u > rat(1, 3) && u < rat(2, 3) {
            let gap = GapId::new(digits);
            let local = (&u - rat(1, 3)) * rat_i(3);
            return Ok(Membership::InGap(gap, local));
        }
        if let Some(start) = seen.get(&u) {
            // Periodic tail from position `start`.
            let period = digits[*start..].to_vec();
            let prefix = digits[..*start].to_vec();
            return Ok(Membership::InC(CantorAddress::new(
                prefix,
                Tail::Periodic(period),
            )));
        }
        seen.insert(u.clone(), digits.len());
        if u < rat(1, 3) {
            digits.push(0);
            u *= rat_i(3);
        } else {
            digits.push(2);
            u = u * rat_i(3) - rat_i(2);
        }
    }
}

/// Membership for an interval query: `Undetermined` when the enclosure is
/// wider than `3^-depth` or straddles both set and gap structure at that
/// depth.
pub fn membership_enclosure(
    e: &crate::enclosure::Enclosure,
    depth: u32,
) -> Result<Membership, CantorError> {
    if let Some(x) = e.as_exact() {
        return membership(x);
    }
    let tol = crate::rational::pow3(-(depth as i64));
    if e.width() > tol {
        return Ok(Membership::Undetermined);
    }
    let mlo = membership(e.lo())?;
    let mhi = membership(e.hi())?;
    match (&mlo, &mhi) {
        (Membership::InGap(a, _), Membership::InGap(b, _)) if a == b => Ok(mlo),
        _ => Ok(Membership::Undetermined),
    }
}

/// Exact distance from a rational point of `[0, 1]` to the Cantor set. The
/// nearest set point is the point itself or a bounding gap endpoint.
pub fn distance_to_cantor(x: &Rational) -> Result<Rational, CantorError> {
    match membership(x)? {
        Membership::InC(_) => Ok(Rational::zero()),
        Membership::InGap(gap, _) => {
            let (lo, hi) = gap.interval();
            Ok((x - lo).min(hi - x))
        }
        Membership::Undetermined => unreachable!("exact query"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::pow3;

    #[test]
    fn quarter_is_in_c_with_periodic_address() {
        match membership(&rat(1, 4)).unwrap() {
            Membership::InC(a) => {
                assert_eq!(a, CantorAddress::parse("(02)").unwrap());
                assert_eq!(a.value(), rat(1, 4));
            }
            other => panic!("expected InC, got {other:?}"),
        }
    }

    #[test]
    fn half_is_in_the_first_gap() {
        match membership(&rat(1, 2)).unwrap() {
            Membership::InGap(gap, local) => {
                assert_eq!(gap, GapId::new(vec![]));
                assert_eq!(local, rat(1, 2));
            }
            other => panic!("expected InGap, got {other:?}"),
        }
    }

    #[test]
    fn gap_endpoint_gets_left_endpoint_address() {
        // 7/27 bounds the removed third (7/27, 8/27) on its left.
        match membership(&rat(7, 27)).unwrap() {
            Membership::InC(a) => {
                assert!(a.is_gap_left_endpoint());
                assert_eq!(a.value(), rat(7, 27));
                assert_eq!(a, CantorAddress::parse("020(2)").unwrap());
            }
            other => panic!("expected InC, got {other:?}"),
        }
    }

    #[test]
    fn terminal_points() {
        assert_eq!(
            membership(&rat_i(0)).unwrap(),
            Membership::InC(CantorAddress::zero())
        );
        assert_eq!(
            membership(&rat_i(1)).unwrap(),
            Membership::InC(CantorAddress::one())
        );
        assert!(membership(&rat(3, 2)).is_err());
        assert!(membership(&rat(-1, 2)).is_err());
    }

    #[test]
    fn address_value_round_trip_on_rationals_in_c() {
        // Every rational whose membership decision is InC must round-trip
        // through its address exactly.
        for (n, d) in [
            (1i64, 4i64),
            (1, 3),
            (2, 3),
            (1, 9),
            (7, 9),
            (3, 4),
            (1, 13),
            (7, 27),
            (8, 27),
            (1, 10),
        ] {
            let x = rat(n, d);
            if let Membership::InC(a) = membership(&x).unwrap() {
                assert_eq!(a.value(), x, "round trip failed for {n}/{d}");
            }
        }
    }

    #[test]
    fn distances_are_exact() {
        assert_eq!(distance_to_cantor(&rat(1, 2)).unwrap(), rat(1, 6));
        assert_eq!(distance_to_cantor(&rat(1, 4)).unwrap(), rat_i(0));
        assert_eq!(
            distance_to_cantor(&(rat(1, 3) + pow3(-10))).unwrap(),
            pow3(-10)
        );
    }

    #[test]
    fn enclosure_queries_respect_depth() {
        use crate::enclosure::Enclosure;
        let wide = Enclosure::new(rat(1, 3), rat(2, 3));
        assert_eq!(
            membership_enclosure(&wide, 4).unwrap(),
            Membership::Undetermined
        );
        let narrow = Enclosure::new(rat(40, 81), rat(41, 81));
        match membership_enclosure(&narrow, 3).unwrap() {
            Membership::InGap(g, _) => assert_eq!(g, GapId::new(vec![])),
            other => panic!("expected InGap, got {other:?}"),
        }
    }

    proptest::proptest! {
        /// Membership decisions are exact: set points round-trip through
        /// their address, gap points land inside their gap's interval with
        /// the matching local coordinate.
        #[test]
        fn membership_decision_is_exact(n in 0u32..10_000, d in 1u32..10_000) {
            proptest::prop_assume!(n <= d);
            let x = rat(n as i64, d as i64);
            match membership(&x).unwrap() {
                Membership::InC(a) => proptest::prop_assert_eq!(a.value(), x),
                Membership::InGap(gap, local) => {
                    let (lo, hi) = gap.interval();
                    proptest::prop_assert!(lo < x && x < hi);
                    proptest::prop_assert_eq!(&lo + local * (&hi - &lo), x);
                }
                Membership::Undetermined => proptest::prop_assert!(false),
            }
        }

        /// The distance to the set is witnessed by an actual set point and
        /// no set point is closer.
        #[test]
        fn distance_is_tight(n in 0u32..5_000, d in 1u32..5_000) {
            proptest::prop_assume!(n <= d);
            let x = rat(n as i64, d as i64);
            let dist = distance_to_cantor(&x).unwrap();
            if let Membership::InGap(gap, _) = membership(&x).unwrap() {
                let (lo, hi) = gap.interval();
                proptest::prop_assert!(dist == &x - &lo || dist == &hi - &x);
                proptest::prop_assert!(dist <= (&hi - &lo) / rat_i(2));
            } else {
                proptest::prop_assert_eq!(dist, Rational::zero());
            }
        }
    }
}
