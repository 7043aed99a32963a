//! Addresses of Cantor-set points and identifiers of removed gaps.

use super::CantorError;
use crate::rational::{pow3, pow_int, rat_i, Rational};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Tail of an eventually periodic ternary expansion over `{0, 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    AllZeros,
    AllTwos,
    /// Repeating word, canonical: minimal period, not all one digit.
    Periodic(Vec<u8>),
}

/// A point of the middle-thirds Cantor set: finite prefix over `{0, 2}`
/// followed by a tail. Addresses denote exactly the reals `Σ dᵢ 3^-i` with
/// digits in `{0, 2}`; the canonical form makes the representation unique.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CantorAddress {
    prefix: Vec<u8>,
    tail: Tail,
}

impl CantorAddress {
    /// Builds and canonicalizes. Digits must be 0 or 2.
    pub fn new(prefix: Vec<u8>, tail: Tail) -> CantorAddress {
        debug_assert!(prefix.iter().all(|d| *d == 0 || *d == 2));
        if let Tail::Periodic(p) = &tail {
            debug_assert!(!p.is_empty());
            debug_assert!(p.iter().all(|d| *d == 0 || *d == 2));
        }
        let mut a = CantorAddress { prefix, tail };
        a.canonicalize();
        a
    }

    pub fn zero() -> CantorAddress {
        CantorAddress {
            prefix: Vec::new(),
            tail: Tail::AllZeros,
        }
    }

    pub fn one() -> CantorAddress {
        CantorAddress {
            prefix: Vec::new(),
            tail: Tail::AllTwos,
        }
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    fn canonicalize(&mut self) {
        if let Tail::Periodic(p) = &self.tail {
            if p.iter().all(|d| *d == 0) {
                self.tail = Tail::AllZeros;
            } else if p.iter().all(|d| *d == 2) {
                self.tail = Tail::AllTwos;
            } else {
                // Minimal period.
                let p = p.clone();
                let n = p.len();
                let minimal = (1..=n)
                    .find(|k| n % k == 0 && p.chunks(*k).all(|c| c == &p[..*k]))
                    .unwrap();
                let mut period = p[..minimal].to_vec();
                // Absorb: rotate the period while the prefix ends with its
                // last digit, shortening the prefix.
                while let Some(&last) = self.prefix.last() {
                    if period.last() == Some(&last) {
                        self.prefix.pop();
                        period.rotate_right(1);
                    } else {
                        break;
                    }
                }
                self.tail = Tail::Periodic(period);
                return;
            }
        }
        match self.tail {
            Tail::AllZeros => {
                while self.prefix.last() == Some(&0) {
                    self.prefix.pop();
                }
            }
            Tail::AllTwos => {
                while self.prefix.last() == Some(&2) {
                    self.prefix.pop();
                }
            }
            Tail::Periodic(_) => unreachable!(),
        }
    }

    /// The digit at 1-based position `i` of the expansion.
    pub fn digit(&self, i: usize) -> u8 {
        debug_assert!(i >= 1);
        if i <= self.prefix.len() {
            return self.prefix[i - 1];
        }
        match &self.tail {
            Tail::AllZeros => 0,
            Tail::AllTwos => 2,
            Tail::Periodic(p) => p[(i - 1 - self.prefix.len()) % p.len()],
        }
    }

    /// Exact value `Σ dᵢ 3^-i`.
    pub fn value(&self) -> Rational {
        let mut v = Rational::zero();
        for (i, d) in self.prefix.iter().enumerate() {
            if *d == 2 {
                v += rat_i(2) * pow3(-(i as i64 + 1));
            }
        }
        let shift = pow3(-(self.prefix.len() as i64));
        match &self.tail {
            Tail::AllZeros => {}
            Tail::AllTwos => v += shift,
            Tail::Periodic(p) => {
                let mut unit = Rational::zero();
                for (i, d) in p.iter().enumerate() {
                    if *d == 2 {
                        unit += rat_i(2) * pow3(-(i as i64 + 1));
                    }
                }
                // unit * (1 + 3^-k + 3^-2k + ...) = unit / (1 - 3^-k)
                let k = p.len() as i64;
                v += shift * unit / (Rational::one() - pow3(-k));
            }
        }
        v
    }

    /// Whether the tail is all twos: the point bounds a gap on its right
    /// (or is 1).
    pub fn is_gap_left_endpoint(&self) -> bool {
        self.tail == Tail::AllTwos && !self.prefix.is_empty()
    }

    /// Whether the tail is all zeros: the point bounds a gap on its left
    /// (or is 0).
    pub fn is_gap_right_endpoint(&self) -> bool {
        self.tail == Tail::AllZeros && !self.prefix.is_empty()
    }

    /// Endpoints of gaps plus the two terminal points.
    pub fn is_isolated_side(&self) -> bool {
        self.tail == Tail::AllZeros || self.tail == Tail::AllTwos
    }

    /// Parses `PREFIX` or `PREFIX(PERIOD)` over `{0, 2}`; an absent or empty
    /// period means a tail of zeros, period `2` a tail of twos.
    pub fn parse(s: &str) -> Result<CantorAddress, CantorError> {
        let bad = |m: &str| CantorError::BadAddressText(s.to_string(), m.to_string());
        let (prefix_str, period_str) = match s.find('(') {
            Some(i) => {
                if !s.ends_with(')') {
                    return Err(bad("missing closing parenthesis"));
                }
                (&s[..i], &s[i + 1..s.len() - 1])
            }
            None => (s, ""),
        };
        let digits = |t: &str| -> Result<Vec<u8>, CantorError> {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '2' => Ok(2u8),
                    _ => Err(bad("digits must be 0 or 2")),
                })
                .collect()
        };
        let prefix = digits(prefix_str)?;
        let tail = if period_str.is_empty() {
            Tail::AllZeros
        } else {
            Tail::Periodic(digits(period_str)?)
        };
        Ok(CantorAddress::new(prefix, tail))
    }
}

impl fmt::Display for CantorAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.prefix {
            write!(f, "{d}")?;
        }
        match &self.tail {
            Tail::AllZeros => Ok(()),
            Tail::AllTwos => write!(f, "(2)"),
            Tail::Periodic(p) => {
                write!(f, "(")?;
                for d in p {
                    write!(f, "{d}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for CantorAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialOrd for CantorAddress {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CantorAddress {
    /// Lexicographic on the digit expansion, which matches real order.
    fn cmp(&self, other: &Self) -> Ordering {
        let horizon = self.prefix.len().max(other.prefix.len())
            + period_len(&self.tail) * period_len(&other.tail)
            + 2;
        for i in 1..=horizon {
            match self.digit(i).cmp(&other.digit(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

fn period_len(t: &Tail) -> usize {
    match t {
        Tail::Periodic(p) => p.len(),
        _ => 1,
    }
}

/// Identifier of a removed middle third: the gap of generation
/// `len(word) + 1` inside the block addressed by `word`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GapId {
    word: Vec<u8>,
}

impl GapId {
    pub fn new(word: Vec<u8>) -> GapId {
        debug_assert!(word.iter().all(|d| *d == 0 || *d == 2));
        GapId { word }
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn generation(&self) -> usize {
        self.word.len() + 1
    }

    /// Value of the block prefix `Σ dᵢ 3^-i`.
    fn block_lo(&self) -> Rational {
        CantorAddress::new(self.word.clone(), Tail::AllZeros).value()
    }

    /// Open interval `(left, right)` of the removed third.
    pub fn interval(&self) -> (Rational, Rational) {
        let lo = self.block_lo();
        let w = pow3(-(self.word.len() as i64 + 1));
        (&lo + &w, lo + pow_int(&rat_i(2), 1) * w)
    }

    /// Left endpoint address: `word · 0 · (2)`.
    pub fn left_endpoint(&self) -> CantorAddress {
        let mut p = self.word.clone();
        p.push(0);
        CantorAddress::new(p, Tail::AllTwos)
    }

    /// Right endpoint address: `word · 2 · (0)`.
    pub fn right_endpoint(&self) -> CantorAddress {
        let mut p = self.word.clone();
        p.push(2);
        CantorAddress::new(p, Tail::AllZeros)
    }
}

impl fmt::Display for GapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gap[")?;
        for d in &self.word {
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for GapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn values_of_basic_addresses() {
        assert_eq!(CantorAddress::zero().value(), rat_i(0));
        assert_eq!(CantorAddress::one().value(), rat_i(1));
        // 1/3 = 0.0(2), 2/3 = 0.2, 1/4 = 0.(02), 7/27 = 0.020(2)
        assert_eq!(CantorAddress::parse("0(2)").unwrap().value(), rat(1, 3));
        assert_eq!(CantorAddress::parse("2").unwrap().value(), rat(2, 3));
        assert_eq!(CantorAddress::parse("(02)").unwrap().value(), rat(1, 4));
        assert_eq!(CantorAddress::parse("020(2)").unwrap().value(), rat(7, 27));
    }

    #[test]
    fn canonicalization_merges_equivalent_forms() {
        // 0 + repeating(20) == repeating(02) shifted: same digit stream.
        let a = CantorAddress::new(vec![0], Tail::Periodic(vec![2, 0]));
        let b = CantorAddress::new(vec![], Tail::Periodic(vec![0, 2]));
        assert_eq!(a, b);
        assert_eq!(a.value(), rat(1, 4));
        // Trailing zeros and twos are absorbed by tails.
        let c = CantorAddress::new(vec![0, 2, 0, 0], Tail::AllZeros);
        assert_eq!(c.prefix(), &[0, 2]);
        let d = CantorAddress::new(vec![0, 2, 2], Tail::AllTwos);
        assert_eq!(d.prefix(), &[0]);
        // Non-minimal periods are reduced.
        let e = CantorAddress::new(vec![], Tail::Periodic(vec![0, 2, 0, 2]));
        assert_eq!(e, b);
    }

    #[test]
    fn order_matches_value_order() {
        let addrs = [
            CantorAddress::zero(),
            CantorAddress::parse("00(2)").unwrap(),
            CantorAddress::parse("(02)").unwrap(),
            CantorAddress::parse("0(2)").unwrap(),
            CantorAddress::parse("2").unwrap(),
            CantorAddress::parse("20(2)").unwrap(),
            CantorAddress::one(),
        ];
        for i in 0..addrs.len() {
            for j in 0..addrs.len() {
                assert_eq!(
                    addrs[i].cmp(&addrs[j]),
                    addrs[i].value().cmp(&addrs[j].value()),
                    "order mismatch between {} and {}",
                    addrs[i],
                    addrs[j]
                );
            }
        }
    }

    #[test]
    fn gap_intervals_and_endpoints() {
        let g = GapId::new(vec![]);
        assert_eq!(g.interval(), (rat(1, 3), rat(2, 3)));
        assert_eq!(g.left_endpoint().value(), rat(1, 3));
        assert_eq!(g.right_endpoint().value(), rat(2, 3));
        let g = GapId::new(vec![2]);
        assert_eq!(g.interval(), (rat(7, 9), rat(8, 9)));
        assert_eq!(g.generation(), 2);
    }

    #[test]
    fn display_parse_round_trip() {
        for s in ["0(2)", "2", "(02)", "020(2)", "", "(2)"] {
            let a = CantorAddress::parse(s).unwrap();
            let b = CantorAddress::parse(&a.to_string()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn parse_rejects_bad_digits() {
        assert!(CantorAddress::parse("01").is_err());
        assert!(CantorAddress::parse("0(1)").is_err());
        assert!(CantorAddress::parse("0(2").is_err());
    }
}
