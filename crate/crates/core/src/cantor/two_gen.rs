//! The two-generator Cantor-preserving system on the unit interval.
//!
//! The generator `g` shifts the standard block decomposition one step to the
//! right, preserving positions. The generator `f` also shifts blocks right,
//! but routes through a subdivision of the central block and, on the upper
//! blocks, re-pins positions according to the quadruple enumeration — which
//! is what makes single orbits dense in the Cantor set. Block indices and
//! endpoints have closed forms, so words with huge generator powers evaluate
//! in time independent of the exponent through the coordinate evaluator.

use super::address::{CantorAddress, Tail};
use super::endpoints::{quad_rank, quad_unrank, QuadIndex};
use super::membership::{membership, Membership};
use super::split::{SplitHomeo, SplitHomeoSpec};
use super::CantorError;
use crate::homeo::{
    DomainKind, ExactWordEvaluator, Letter, MapError, MapRule, MapWord, Piece, PieceKind,
    PiecewiseMap,
};
use crate::enclosure::Enclosure;
use crate::rational::{pow3, rat, rat_i, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Region of the standard decomposition containing a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    /// Closed block `K_n`.
    K(i64),
    /// Open gap `J_n` between `K_n` and `K_{n+1}`.
    J(i64),
    /// Lower third of the central block.
    K0A,
    /// Removed middle of the central block.
    JStar,
    /// Upper third of the central block.
    K0B,
}

/// Location of a point: its region plus the local coordinate (position in
/// the region's scaled Cantor set for blocks, affine gap coordinate for
/// gaps), and the address form of the position when the point is in the
/// Cantor set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnCoordinate {
    pub region: Region,
    pub local: Rational,
    pub address: Option<CantorAddress>,
}

/// Position classification used by the density-witness recipe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnPosition {
    BlockMin,
    BlockMax,
    GapLeftEndpoint(CantorAddress),
    GapRightEndpoint(CantorAddress),
    TwoSided(CantorAddress),
}

/// Left edge of block `n`.
pub fn block_lo(n: i64) -> Rational {
    if n >= 1 {
        Rational::one() - pow3(-n)
    } else {
        rat_i(2) * pow3(n - 2)
    }
}

/// Right edge of block `n`.
pub fn block_hi(n: i64) -> Rational {
    if n >= 1 {
        Rational::one() - rat_i(2) * pow3(-(n + 1))
    } else {
        pow3(n - 1)
    }
}

/// Width of block `n`.
pub fn block_width(n: i64) -> Rational {
    if n >= 1 {
        pow3(-(n + 1))
    } else {
        pow3(n - 2)
    }
}

/// Whole-line coordinate of a point: block index plus position, or gap
/// index plus local coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Coord {
    Block(i64, Rational),
    Gap(i64, Rational),
    Zero,
    One,
}

impl Coord {
    pub(crate) fn value(&self) -> Rational {
        match self {
            Coord::Zero => Rational::zero(),
            Coord::One => Rational::one(),
            Coord::Block(n, p) => block_lo(*n) + p * block_width(*n),
            Coord::Gap(n, l) => {
                let lo = block_hi(*n);
                let hi = block_lo(n + 1);
                &lo + l * (hi - &lo)
            }
        }
    }
}

/// Floor of `log_3(x)` for positive rational `x`, by estimate plus exact
/// adjustment.
fn floor_log3(x: &Rational) -> i64 {
    debug_assert!(x.is_positive());
    let bits = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut e = (bits as f64 * 0.630_929_753_571_457_4).round() as i64;
    while pow3(e) > *x {
        e -= 1;
    }
    while pow3(e + 1) <= *x {
        e += 1;
    }
    e
}

/// Whole-line coordinate of `x` in `[0, 1]`.
pub(crate) fn coord_locate(x: &Rational) -> Result<Coord, MapError> {
    if x.is_negative() || x > &Rational::one() {
        return Err(MapError::OutOfDomain(x.clone()));
    }
    if x.is_zero() {
        return Ok(Coord::Zero);
    }
    if x.is_one() {
        return Ok(Coord::One);
    }
    let n = if x < &rat(2, 9) {
        // a_n <= x < a_{n+1} with a_n = 2*3^(n-2): 3^n <= 9x/2 < 3^(n+1)
        floor_log3(&(x * rat(9, 2)))
    } else if x > &rat(1, 3) && x < &rat(2, 3) {
        return Ok(Coord::Gap(0, (x - rat(1, 3)) * rat_i(3)));
    } else if x <= &rat(1, 3) {
        0
    } else {
        // 3^-(n+1) < 1 - x <= 3^-n
        let d = Rational::one() - x;
        let l = floor_log3(&d);
        -l - 1 + i64::from(pow3(l) == d)
    };
    let lo = block_lo(n);
    let hi = block_hi(n);
    debug_assert!(&lo <= x, "locate underflow at {x}: block {n}");
    if x <= &hi {
        Ok(Coord::Block(n, (x - lo) / block_width(n)))
    } else {
        let gap_hi = block_lo(n + 1);
        debug_assert!(x < &gap_hi);
        Ok(Coord::Gap(n, (x - &hi) / (gap_hi - &hi)))
    }
}

/// Shared cache of the per-block split homeomorphisms of `f`.
struct SplitCache {
    map: Mutex<HashMap<i64, Arc<SplitHomeo>>>,
}

impl SplitCache {
    fn get(&self, n: i64) -> Arc<SplitHomeo> {
        debug_assert!(n >= 1);
        let mut g = self.map.lock().unwrap();
        g.entry(n)
            .or_insert_with(|| {
                let QuadIndex { p1, p2, p1s, p2s } = quad_unrank(n as u64);
                let spec = SplitHomeoSpec {
                    source: (rat_i(0), rat_i(1)),
                    target: (rat_i(0), rat_i(1)),
                    pins: vec![(p1, p1s), (p2, p2s)],
                };
                Arc::new(SplitHomeo::build(spec).expect("quadruple pins are ordered"))
            })
            .clone()
    }
}

fn split_cache() -> &'static SplitCache {
    static CACHE: OnceLock<SplitCache> = OnceLock::new();
    CACHE.get_or_init(|| SplitCache {
        map: Mutex::new(HashMap::new()),
    })
}

/// One application of `f` in whole-line coordinates.
pub(crate) fn f_step(c: &Coord) -> Coord {
    match c {
        Coord::Zero => Coord::Zero,
        Coord::One => Coord::One,
        Coord::Block(n, p) => match *n {
            n if n <= -2 => Coord::Block(n + 1, p.clone()),
            -1 => Coord::Block(0, p / rat_i(3)),
            0 => {
                if p <= &rat(1, 3) {
                    Coord::Block(0, p + rat(2, 3))
                } else if p < &rat(2, 3) {
                    Coord::Gap(0, (p - rat(1, 3)) * rat_i(3))
                } else {
                    Coord::Block(1, p * rat_i(3) - rat_i(2))
                }
            }
            n => Coord::Block(
                n + 1,
                split_cache()
                    .get(n)
                    .unit_eval(p)
                    .expect("position in unit range"),
            ),
        },
        Coord::Gap(n, l) => match *n {
            -1 => Coord::Block(0, rat(1, 3) + l / rat_i(3)),
            n => Coord::Gap(n + 1, l.clone()),
        },
    }
}

/// One application of `f^-1` in whole-line coordinates.
pub(crate) fn f_step_inv(c: &Coord) -> Coord {
    match c {
        Coord::Zero => Coord::Zero,
        Coord::One => Coord::One,
        Coord::Block(n, p) => match *n {
            n if n <= -1 => Coord::Block(n - 1, p.clone()),
            0 => {
                if p <= &rat(1, 3) {
                    Coord::Block(-1, p * rat_i(3))
                } else if p < &rat(2, 3) {
                    Coord::Gap(-1, (p - rat(1, 3)) * rat_i(3))
                } else {
                    Coord::Block(0, p - rat(2, 3))
                }
            }
            1 => Coord::Block(0, (p + rat_i(2)) / rat_i(3)),
            n => Coord::Block(
                n - 1,
                split_cache()
                    .get(n - 1)
                    .unit_invert(p)
                    .expect("position in unit range"),
            ),
        },
        Coord::Gap(n, l) => match *n {
            0 => Coord::Block(0, rat(1, 3) + l / rat_i(3)),
            n => Coord::Gap(n - 1, l.clone()),
        },
    }
}

/// `g^k` in whole-line coordinates: a pure index shift.
pub(crate) fn g_step(c: &Coord, k: i64) -> Coord {
    match c {
        Coord::Zero => Coord::Zero,
        Coord::One => Coord::One,
        Coord::Block(n, p) => Coord::Block(n + k, p.clone()),
        Coord::Gap(n, l) => Coord::Gap(n + k, l.clone()),
    }
}

/// The block-shift generator: exact three-piece affine map preserving the
/// Cantor set and sending each block to the next.
pub fn build_g() -> PiecewiseMap {
    PiecewiseMap::new(
        "g",
        DomainKind::Interval01,
        vec![
            Piece::affine(rat_i(0), rat(2, 9), rat_i(3), rat_i(0)),
            Piece::affine(rat(2, 9), rat(1, 3), rat_i(1), rat(4, 9)),
            Piece::affine(rat(1, 3), rat_i(1), rat(1, 3), rat(2, 3)),
        ],
    )
}

/// Rule piece covering `[2/3, 1]`: block cascade driven by the quadruple
/// enumeration, lazily materializing one split homeomorphism per block.
struct UpperCascade;

impl MapRule for UpperCascade {
    fn describe(&self) -> String {
        "upper block cascade".into()
    }

    fn eval(&self, x: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        Ok(Enclosure::exact(
            f_step(&coord_locate(x)?).value(),
        ))
    }

    fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        Some(f_step(&coord_locate(x).ok()?).value())
    }

    fn invert(&self, y: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        if y < &rat(8, 9) {
            return Err(MapError::NotInImage(y.clone()));
        }
        Ok(Enclosure::exact(f_step_inv(&coord_locate(y)?).value()))
    }

    fn sample_breakpoints(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        let mut pts = Vec::new();
        for n in 1..=8 {
            for v in [block_lo(n), block_hi(n)] {
                if &v > lo && &v < hi {
                    pts.push(v);
                }
            }
        }
        pts
    }
}

/// The block-permuting generator: equal to `g` on the far lower blocks,
/// routes the central block through its own subdivision, and applies the
/// scheduled split homeomorphism on each upper block.
pub fn build_f() -> PiecewiseMap {
    PiecewiseMap::new(
        "f",
        DomainKind::Interval01,
        vec![
            Piece::affine(rat_i(0), rat(2, 27), rat_i(3), rat_i(0)),
            Piece::affine(rat(2, 27), rat(1, 9), rat_i(1), rat(4, 27)),
            Piece::affine(rat(1, 9), rat(2, 9), rat(1, 3), rat(2, 9)),
            Piece::affine(rat(2, 9), rat(7, 27), rat_i(1), rat(2, 27)),
            Piece::affine(rat(7, 27), rat(8, 27), rat_i(9), rat_i(-2)),
            Piece::affine(rat(8, 27), rat(1, 3), rat_i(3), rat(-2, 9)),
            Piece::affine(rat(1, 3), rat(2, 3), rat(1, 3), rat(2, 3)),
            Piece {
                lo: Some(rat(2, 3)),
                hi: Some(rat_i(1)),
                kind: PieceKind::Rule(Arc::new(UpperCascade)),
            },
        ],
    )
}

/// Locates `x` in the fine region decomposition (the central block reports
/// its three sub-regions). Block indices come from closed-form endpoint
/// arithmetic rather than iterated map applications.
pub fn kn_locate(x: &Rational) -> Result<KnCoordinate, CantorError> {
    if !x.is_positive() || x >= &Rational::one() {
        return Err(CantorError::OutOfUnitInterval(x.clone()));
    }
    let coord = coord_locate(x).map_err(|_| CantorError::OutOfUnitInterval(x.clone()))?;
    let (region, local) = match coord {
        Coord::Block(0, p) => {
            if p <= rat(1, 3) {
                (Region::K0A, &p * rat_i(3))
            } else if p < rat(2, 3) {
                (Region::JStar, (&p - rat(1, 3)) * rat_i(3))
            } else {
                (Region::K0B, &p * rat_i(3) - rat_i(2))
            }
        }
        Coord::Block(n, p) => (Region::K(n), p),
        Coord::Gap(n, l) => (Region::J(n), l),
        Coord::Zero | Coord::One => unreachable!("interior point"),
    };
    let address = match region {
        Region::K(_) | Region::K0A | Region::K0B => match membership(&local)? {
            Membership::InC(a) => Some(a),
            _ => None,
        },
        _ => None,
    };
    Ok(KnCoordinate {
        region,
        local,
        address,
    })
}

/// Exact word evaluation for the two-generator system in whole-line
/// coordinates; generator powers apply in time independent of the exponent.
pub struct CoordinateEvaluator;

impl ExactWordEvaluator for CoordinateEvaluator {
    fn eval_word_exact(&self, word: &MapWord, x: &Rational) -> Result<Rational, MapError> {
        let mut c = coord_locate(x)?;
        for l in word.letters() {
            match l.gen.as_str() {
                "g" => c = g_step(&c, l.exp),
                "f" => {
                    for _ in 0..l.exp.unsigned_abs() {
                        c = if l.exp > 0 { f_step(&c) } else { f_step_inv(&c) };
                    }
                }
                other => return Err(MapError::UnknownGenerator(other.to_string())),
            }
        }
        Ok(c.value())
    }
}

/// Classifies a block position for the witness recipe.
fn classify_position(p: &Rational) -> Result<KnPosition, CantorError> {
    if p.is_zero() {
        return Ok(KnPosition::BlockMin);
    }
    if p.is_one() {
        return Ok(KnPosition::BlockMax);
    }
    match membership(p)? {
        Membership::InC(a) => Ok(match a.tail() {
            Tail::AllTwos => KnPosition::GapLeftEndpoint(a),
            Tail::AllZeros => KnPosition::GapRightEndpoint(a),
            Tail::Periodic(_) => KnPosition::TwoSided(a),
        }),
        _ => Err(CantorError::NotInCantorSet(p.clone())),
    }
}

const MAX_BRACKET_GEN: usize = 64;

/// Walks the ternary tree toward a Cantor-set position `p`, producing the
/// closest gap-left-endpoint positions strictly below and above `p` at each
/// depth. Cost is linear in depth, so deep brackets stay cheap.
struct EndpointScanner {
    p: Rational,
    digits: Vec<u8>,
}

impl EndpointScanner {
    fn new(p: &Rational) -> EndpointScanner {
        let addr = match membership(p).expect("position in unit range") {
            Membership::InC(a) => a,
            _ => unreachable!("scanner positions lie in the set"),
        };
        let digits = (1..=MAX_BRACKET_GEN).map(|i| addr.digit(i)).collect();
        EndpointScanner {
            p: p.clone(),
            digits,
        }
    }

    /// `(closest below, closest above)` among endpoints of generation
    /// `<= max_gen`, strict on both sides.
    fn closest(&self, max_gen: usize) -> (Option<CantorAddress>, Option<CantorAddress>) {
        let mut below: Option<(Rational, Vec<u8>)> = None;
        let mut above: Option<(Rational, Vec<u8>)> = None;
        let mut v_prefix = Rational::zero();
        for d in 1..=max_gen.min(MAX_BRACKET_GEN) {
            let w = &self.digits[..d - 1];
            // Candidates at this depth: the containing block's gap endpoint
            // and those of its two neighbor blocks.
            let mut consider = |word: Vec<u8>, v_block: Rational| {
                let v = v_block + pow3(-(d as i64));
                if v < self.p {
                    if below.as_ref().is_none_or(|(b, _)| &v > b) {
                        below = Some((v, word));
                    }
                } else if v > self.p && above.as_ref().is_none_or(|(b, _)| &v < b) {
                    above = Some((v, word));
                }
            };
            consider(w.to_vec(), v_prefix.clone());
            if let Some(pw) = step_word(w, -1) {
                let v = CantorAddress::new(pw.clone(), Tail::AllZeros).value();
                consider(pw, v);
            }
            if let Some(sw) = step_word(w, 1) {
                let v = CantorAddress::new(sw.clone(), Tail::AllZeros).value();
                consider(sw, v);
            }
            if self.digits[d - 1] == 2 {
                v_prefix += rat_i(2) * pow3(-(d as i64));
            }
        }
        let to_addr = |w: Vec<u8>| {
            let mut p = w;
            p.push(0);
            CantorAddress::new(p, Tail::AllTwos)
        };
        (
            below.map(|(_, w)| to_addr(w)),
            above.map(|(_, w)| to_addr(w)),
        )
    }
}

/// Lexicographic neighbor of a `{0,2}` word (as a binary counter); `None`
/// when it would wrap.
fn step_word(w: &[u8], dir: i64) -> Option<Vec<u8>> {
    let mut out = w.to_vec();
    if dir > 0 {
        for i in (0..out.len()).rev() {
            if out[i] == 0 {
                out[i] = 2;
                return Some(out);
            }
            out[i] = 0;
        }
        None
    } else {
        for i in (0..out.len()).rev() {
            if out[i] == 2 {
                out[i] = 0;
                return Some(out);
            }
            out[i] = 2;
        }
        None
    }
}

/// Tightest strict brackets at the shallowest generation where both exist.
fn strict_brackets(p: &Rational) -> (CantorAddress, CantorAddress) {
    let scan = EndpointScanner::new(p);
    for g in 1..=MAX_BRACKET_GEN {
        if let (Some(lo), Some(hi)) = scan.closest(g) {
            return (lo, hi);
        }
    }
    unreachable!("interior positions are bracketed by shallow endpoints");
}

/// Closest endpoint strictly below `p` with `p - value < margin`, at the
/// shallowest adequate generation.
fn endpoint_below_within(p: &Rational, margin: &Rational) -> CantorAddress {
    let scan = EndpointScanner::new(p);
    for g in 1..=MAX_BRACKET_GEN {
        if let (Some(lo), _) = scan.closest(g) {
            if &(p - lo.value()) < margin {
                return lo;
            }
        }
    }
    unreachable!("endpoints accumulate from below at positive positions");
}

/// Closest endpoint strictly above `p` with `value - p < margin`.
fn endpoint_above_within(p: &Rational, margin: &Rational) -> CantorAddress {
    let scan = EndpointScanner::new(p);
    for g in 1..=MAX_BRACKET_GEN {
        if let (_, Some(hi)) = scan.closest(g) {
            if &(hi.value() - p) < margin {
                return hi;
            }
        }
    }
    unreachable!("endpoints accumulate from above below the top position");
}

/// Word sending `x` to within `eps` of `y`, both Cantor-set points, `x` not
/// terminal.
///
/// The word is `h2 · h1`: `h1` repositions `x` into the first upper block
/// with a position that can be strictly bracketed; bracketing positions are
/// then chosen around the repositioned point and around `y` (one-sidedly
/// when `y` is a gap endpoint, to within `eps`), and the rank `r` of the
/// resulting quadruple schedules the block where `f` performs the re-pinning,
/// giving `h2 = g^(m-r-1) f g^(r-1)`. Terminal targets use plain powers of
/// `g`. Bracket choices are the tightest at the shallowest adequate
/// generation, which keeps the scheduled block index as small as the
/// enumeration allows.
pub fn density_witness(
    x: &Rational,
    y: &Rational,
    eps: &Rational,
) -> Result<MapWord, CantorError> {
    assert!(eps.is_positive());
    if x.is_zero() || x.is_one() {
        return Err(CantorError::TerminalEdgeInput(x.clone()));
    }
    let xc = match membership(x)? {
        Membership::InC(_) => coord_locate(x).expect("checked in range"),
        _ => return Err(CantorError::NotInCantorSet(x.clone())),
    };
    let Coord::Block(n, p_x) = xc else {
        return Err(CantorError::NotInCantorSet(x.clone()));
    };

    // Terminal targets: ride the block shift until within eps.
    if y.is_one() {
        let mut k = 1.max(1 - n);
        while Rational::one() - Coord::Block(n + k, p_x.clone()).value() >= *eps {
            k += 1;
        }
        return Ok(MapWord::single("g", k));
    }
    if y.is_zero() {
        let mut k = 1.max(n + 1);
        while Coord::Block(n - k, p_x.clone()).value() >= *eps {
            k += 1;
        }
        return Ok(MapWord::single("g", -k));
    }
    let yc = match membership(y)? {
        Membership::InC(_) => coord_locate(y).expect("checked in range"),
        _ => return Err(CantorError::NotInCantorSet(y.clone())),
    };
    let Coord::Block(m, p_y) = yc else {
        return Err(CantorError::NotInCantorSet(y.clone()));
    };

    // h1: reposition x into block 1.
    let (h1, p1) = match classify_position(&p_x)? {
        KnPosition::BlockMax => (
            vec![
                Letter::new("g", -n),
                Letter::new("f", -1),
                Letter::new("g", 1),
            ],
            rat(1, 3),
        ),
        KnPosition::BlockMin => (
            vec![
                Letter::new("g", -n),
                Letter::new("f", 1),
                Letter::new("g", 1),
            ],
            rat(2, 3),
        ),
        _ => (vec![Letter::new("g", 1 - n)], p_x.clone()),
    };

    // Brackets around the repositioned point: any strict pair works.
    let (px_lo, px_hi) = strict_brackets(&p1);

    // Brackets around y's position, one-sided within eps at gap endpoints.
    let margin = eps / block_width(m);
    let (py_lo, py_hi) = match classify_position(&p_y)? {
        KnPosition::BlockMax => {
            let lo = endpoint_below_within(&p_y, &margin);
            let hi = endpoint_above_within(&lo.value(), &Rational::one());
            (lo, hi)
        }
        KnPosition::BlockMin => {
            let hi = endpoint_above_within(&p_y, &margin);
            let lo = endpoint_below_within(&hi.value(), &Rational::one());
            (lo, hi)
        }
        KnPosition::GapLeftEndpoint(a) => {
            let lo = endpoint_below_within(&p_y, &margin);
            (lo, a)
        }
        KnPosition::GapRightEndpoint(a) => {
            // The gap excludes set points below y, so its left endpoint is
            // an adequate lower bracket at any distance.
            let mut w = a.prefix().to_vec();
            w.pop();
            let gap = super::address::GapId::new(w);
            let hi = endpoint_above_within(&p_y, &margin);
            (gap.left_endpoint(), hi)
        }
        KnPosition::TwoSided(_) => {
            let scan = EndpointScanner::new(&p_y);
            let mut g = 1;
            loop {
                if let (Some(lo), Some(hi)) = scan.closest(g) {
                    if hi.value() - lo.value() < margin {
                        break (lo, hi);
                    }
                }
                g += 1;
                assert!(g <= MAX_BRACKET_GEN, "bracket search exceeded depth");
            }
        }
    };

    let quad = QuadIndex::new(px_lo, px_hi, py_lo, py_hi)?;
    let r = quad_rank(&quad)? as i64;

    let mut letters = h1;
    letters.push(Letter::new("g", r - 1));
    letters.push(Letter::new("f", 1));
    letters.push(Letter::new("g", m - r - 1));
    Ok(MapWord::from_letters(letters))
}
