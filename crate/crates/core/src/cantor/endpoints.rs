//! The countable enumeration of gap left endpoints and the quadruple index.
//!
//! Left endpoints are ranked by gap generation, then left to right within a
//! generation. Quadruples `(p1, p2, p1*, p2*)` of left endpoints with
//! `p1 < p2` and `p1* < p2*` (as points) are enumerated by ascending
//! rank-sum, ties broken lexicographically on the rank tuple; the 1-based
//! position in that enumeration is the quadruple's index. Both directions
//! are computed by counting, not scanning, so indices in the millions are
//! cheap.

use super::address::{CantorAddress, Tail};
use super::CantorError;
use crate::rational::Rational;
use std::sync::Mutex;

/// A quadruple of gap left endpoints with `p1 < p2` and `p1s < p2s` as
/// points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadIndex {
    pub p1: CantorAddress,
    pub p2: CantorAddress,
    pub p1s: CantorAddress,
    pub p2s: CantorAddress,
}

impl QuadIndex {
    pub fn new(
        p1: CantorAddress,
        p2: CantorAddress,
        p1s: CantorAddress,
        p2s: CantorAddress,
    ) -> Result<QuadIndex, CantorError> {
        for a in [&p1, &p2, &p1s, &p2s] {
            if !a.is_gap_left_endpoint() {
                return Err(CantorError::NotALeftEndpoint(a.to_string()));
            }
        }
        if p1 >= p2 || p1s >= p2s {
            return Err(CantorError::InvalidQuadruple(format!(
                "({p1}, {p2}, {p1s}, {p2s})"
            )));
        }
        Ok(QuadIndex { p1, p2, p1s, p2s })
    }
}

/// The `rank`-th gap left endpoint (1-based): generation ascending, then
/// left to right.
pub fn left_endpoint(rank: u64) -> CantorAddress {
    assert!(rank >= 1);
    let gen_bits = 63 - rank.leading_zeros() as u64; // floor(log2 rank)
    let index = rank - (1 << gen_bits);
    let mut prefix = Vec::with_capacity(gen_bits as usize + 1);
    for i in (0..gen_bits).rev() {
        prefix.push(if (index >> i) & 1 == 1 { 2 } else { 0 });
    }
    prefix.push(0);
    CantorAddress::new(prefix, Tail::AllTwos)
}

/// Inverse of [`left_endpoint`].
pub fn left_endpoint_rank(addr: &CantorAddress) -> Result<u64, CantorError> {
    if !addr.is_gap_left_endpoint() || addr.prefix().last() != Some(&0) {
        return Err(CantorError::NotALeftEndpoint(addr.to_string()));
    }
    let w = &addr.prefix()[..addr.prefix().len() - 1];
    let mut index: u64 = 0;
    for d in w {
        index = (index << 1) | u64::from(*d == 2);
    }
    Ok((1u64 << w.len()) + index)
}

/// Lazily extended table of left-endpoint values by rank, plus the pair and
/// tuple counting tables used by ranking.
struct QuadTables {
    /// `values[r - 1]` = value of the rank-`r` left endpoint.
    values: Vec<Rational>,
    /// `pairs[t]` = number of pairs `(r1, r2)` with `r1 + r2 = t` and
    /// `point(r1) < point(r2)`.
    pairs: Vec<u64>,
    /// `quads[s]` = number of admissible quadruples with rank-sum `s`.
    quads: Vec<u64>,
    /// `cumulative[s]` = admissible quadruples with rank-sum `<= s`.
    cumulative: Vec<u64>,
}

impl QuadTables {
    fn new() -> QuadTables {
        QuadTables {
            values: Vec::new(),
            pairs: vec![0, 0],
            quads: vec![0, 0, 0, 0],
            cumulative: vec![0, 0, 0, 0],
        }
    }

    fn value(&mut self, rank: u64) -> &Rational {
        while (self.values.len() as u64) < rank {
            let r = self.values.len() as u64 + 1;
            self.values.push(left_endpoint(r).value());
        }
        &self.values[(rank - 1) as usize]
    }

    fn less(&mut self, a: u64, b: u64) -> bool {
        self.value(a.max(b));
        self.values[(a - 1) as usize] < self.values[(b - 1) as usize]
    }

    /// Extends the counting tables through rank-sum `s`.
    fn extend_to(&mut self, s: usize) {
        while self.pairs.len() <= s {
            let t = self.pairs.len() as u64;
            let mut count = 0;
            for r1 in 1..t {
                if self.less(r1, t - r1) {
                    count += 1;
                }
            }
            self.pairs.push(count);
        }
        while self.quads.len() <= s {
            let q = self.quads.len();
            let mut count = 0u64;
            for sa in 2..=(q - 2) {
                count += self.pairs[sa] * self.pairs[q - sa];
            }
            self.quads.push(count);
            let prev = *self.cumulative.last().unwrap();
            self.cumulative.push(prev + count);
        }
    }
}

static TABLES: Mutex<Option<QuadTables>> = Mutex::new(None);

fn with_tables<T>(f: impl FnOnce(&mut QuadTables) -> T) -> T {
    let mut guard = TABLES.lock().unwrap();
    f(guard.get_or_insert_with(QuadTables::new))
}

/// 1-based position of `q` in the quadruple enumeration.
pub fn quad_rank(q: &QuadIndex) -> Result<u64, CantorError> {
    let a = left_endpoint_rank(&q.p1)?;
    let b = left_endpoint_rank(&q.p2)?;
    let c = left_endpoint_rank(&q.p1s)?;
    let d = left_endpoint_rank(&q.p2s)?;
    if q.p1 >= q.p2 || q.p1s >= q.p2s {
        return Err(CantorError::InvalidQuadruple(format!(
            "({}, {}, {}, {})",
            q.p1, q.p2, q.p1s, q.p2s
        )));
    }
    let s = a + b + c + d;
    Ok(with_tables(|t| {
        t.extend_to(s as usize);
        let mut pos = t.cumulative[s as usize - 1];
        // Tuples with the same sum, lexicographically smaller rank tuples.
        for r1 in 1..a {
            for r2 in 1..=(s - r1).saturating_sub(2) {
                if t.less(r1, r2) {
                    pos += t.pairs[(s - r1 - r2) as usize];
                }
            }
        }
        for r2 in 1..b {
            if s >= a + r2 + 2 && t.less(a, r2) {
                pos += t.pairs[(s - a - r2) as usize];
            }
        }
        let s34 = s - a - b;
        for r3 in 1..c {
            let r4 = s34 - r3;
            if r4 >= 1 && t.less(r3, r4) {
                pos += 1;
            }
        }
        pos + 1
    }))
}

/// The quadruple at 1-based position `n`.
pub fn quad_unrank(n: u64) -> QuadIndex {
    assert!(n >= 1);
    with_tables(|t| {
        let mut s = 4usize;
        loop {
            t.extend_to(s);
            if t.cumulative[s] >= n {
                break;
            }
            s += 1;
        }
        let mut remaining = n - t.cumulative[s - 1];
        let s = s as u64;
        // Walk r1, r2 counting completed pairs until the block containing
        // `remaining` is found, then walk r3 within it.
        for r1 in 1..=s {
            for r2 in 1..=s.saturating_sub(r1 + 2) {
                if !t.less(r1, r2) {
                    continue;
                }
                let block = t.pairs[(s - r1 - r2) as usize];
                if remaining > block {
                    remaining -= block;
                    continue;
                }
                let s34 = s - r1 - r2;
                for r3 in 1..s34 {
                    let r4 = s34 - r3;
                    if t.less(r3, r4) {
                        remaining -= 1;
                        if remaining == 0 {
                            return QuadIndex {
                                p1: left_endpoint(r1),
                                p2: left_endpoint(r2),
                                p1s: left_endpoint(r3),
                                p2s: left_endpoint(r4),
                            };
                        }
                    }
                }
                unreachable!("pair count table disagrees with walk");
            }
        }
        unreachable!("cumulative table disagrees with walk");
    })
}
