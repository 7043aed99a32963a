//! Split homeomorphisms: order-preserving maps carrying one scaled
//! middle-thirds Cantor set onto another, with up to two pinned gap left
//! endpoints.
//!
//! The canonical construction aligns the two sets block by block. Each pin
//! partitions the ambient interval into segments around its gap; within a
//! segment the Cantor points decompose into finitely many maximal aligned
//! blocks, each an affine copy of the whole set. Matching source and target
//! block lists (splitting the rightmost block of the shorter list until the
//! counts agree) and mapping matched blocks and the gaps between them
//! affinely yields a finite piecewise-affine homeomorphism that is exact on
//! rational points, maps Cantor set onto Cantor set, and sends each pinned
//! left endpoint to its partner with the adjacent gap carried linearly.

use super::address::{CantorAddress, GapId, Tail};
use super::CantorError;
use crate::homeo::{DomainKind, MapError, Piece, PieceKind, PiecewiseMap};
use crate::rational::{pow3, rat_i, Rational};
use num_traits::{One, Zero};
use std::sync::Arc;

/// Declarative description of a split homeomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitHomeoSpec {
    /// Interval carrying the source scaled Cantor set.
    pub source: (Rational, Rational),
    /// Interval carrying the target scaled Cantor set.
    pub target: (Rational, Rational),
    /// Pairs of (source, target) gap left endpoints in unit coordinates of
    /// their respective sets; at most two, strictly increasing on each side.
    pub pins: Vec<(CantorAddress, CantorAddress)>,
}

/// A materialized split homeomorphism: finitely many affine pieces in unit
/// coordinates plus the interval scaling.
#[derive(Debug)]
pub struct SplitHomeo {
    spec: SplitHomeoSpec,
    /// `(lo, hi, slope, offset)` in unit coordinates, tiling `[0, 1]`.
    unit_pieces: Vec<(Rational, Rational, Rational, Rational)>,
}

/// One maximal aligned block `[value(w), value(w) + 3^-|w|]`.
#[derive(Clone, Debug)]
struct Block {
    word: Vec<u8>,
    lo: Rational,
    hi: Rational,
}

impl Block {
    fn new(word: Vec<u8>) -> Block {
        let lo = CantorAddress::new(word.clone(), Tail::AllZeros).value();
        let hi = &lo + pow3(-(word.len() as i64));
        Block { word, lo, hi }
    }

    /// Children with the middle third removed.
    fn split(&self) -> (Block, Block) {
        let mut left = self.word.clone();
        left.push(0);
        let mut right = self.word.clone();
        right.push(2);
        (Block::new(left), Block::new(right))
    }
}

/// Maximal aligned blocks covering `[a, b] ∩ C`, where `a` and `b` are
/// Cantor points of finite description (gap endpoints or terminals).
fn blocks_between(a: &Rational, b: &Rational) -> Vec<Block> {
    let mut out = Vec::new();
    let mut stack = vec![Block::new(Vec::new())];
    while let Some(blk) = stack.pop() {
        if &blk.lo > b || &blk.hi < a {
            continue;
        }
        if a <= &blk.lo && &blk.hi <= b {
            out.push(blk);
            continue;
        }
        let (l, r) = blk.split();
        // Right first so the stack pops left to right.
        stack.push(r);
        stack.push(l);
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Splits the rightmost block of the shorter list until lengths agree.
fn equalize(mut src: Vec<Block>, mut tgt: Vec<Block>) -> (Vec<Block>, Vec<Block>) {
    loop {
        match src.len().cmp(&tgt.len()) {
            std::cmp::Ordering::Equal => return (src, tgt),
            std::cmp::Ordering::Less => {
                let last = src.pop().expect("segment has at least one block");
                let (l, r) = last.split();
                src.push(l);
                src.push(r);
            }
            std::cmp::Ordering::Greater => {
                let last = tgt.pop().expect("segment has at least one block");
                let (l, r) = last.split();
                tgt.push(l);
                tgt.push(r);
            }
        }
    }
}

impl SplitHomeo {
    pub fn build(spec: SplitHomeoSpec) -> Result<SplitHomeo, CantorError> {
        if spec.pins.len() > 2 {
            return Err(CantorError::PinOrderMismatch(
                "at most two pins supported".into(),
            ));
        }
        for (s, t) in &spec.pins {
            if !s.is_gap_left_endpoint() {
                return Err(CantorError::NotALeftEndpoint(s.to_string()));
            }
            if !t.is_gap_left_endpoint() {
                return Err(CantorError::NotALeftEndpoint(t.to_string()));
            }
        }
        if spec.pins.len() == 2 {
            let ok = spec.pins[0].0 < spec.pins[1].0 && spec.pins[0].1 < spec.pins[1].1;
            if !ok {
                return Err(CantorError::PinOrderMismatch(format!(
                    "{} -> {}, {} -> {}",
                    spec.pins[0].0, spec.pins[0].1, spec.pins[1].0, spec.pins[1].1
                )));
            }
        }
        if spec.source.0 >= spec.source.1 || spec.target.0 >= spec.target.1 {
            return Err(CantorError::PinOrderMismatch(
                "degenerate carrier interval".into(),
            ));
        }

        let pin_gap = |a: &CantorAddress| -> GapId {
            let mut w = a.prefix().to_vec();
            w.pop(); // drop the trailing 0 of the left-endpoint form
            GapId::new(w)
        };
        let src_gaps: Vec<GapId> = spec.pins.iter().map(|(s, _)| pin_gap(s)).collect();
        let tgt_gaps: Vec<GapId> = spec.pins.iter().map(|(_, t)| pin_gap(t)).collect();

        // Segment boundaries in unit coordinates: 0, around each pinned gap, 1.
        let seg_bounds = |gaps: &[GapId]| -> Vec<(Rational, Rational)> {
            let mut bounds = Vec::new();
            let mut lo = Rational::zero();
            for g in gaps {
                let (gl, gr) = g.interval();
                bounds.push((lo, gl));
                lo = gr;
            }
            bounds.push((lo, Rational::one()));
            bounds
        };
        let src_segments = seg_bounds(&src_gaps);
        let tgt_segments = seg_bounds(&tgt_gaps);

        let mut unit_pieces: Vec<(Rational, Rational, Rational, Rational)> = Vec::new();
        let mut push_affine =
            |slo: &Rational, shi: &Rational, tlo: &Rational, thi: &Rational| {
                let slope = (thi - tlo) / (shi - slo);
                let offset = tlo - &slope * slo;
                unit_pieces.push((slo.clone(), shi.clone(), slope, offset));
            };

        let mut prev_src_hi: Option<Rational> = None;
        let mut prev_tgt_hi: Option<Rational> = None;
        for ((s_lo, s_hi), (t_lo, t_hi)) in src_segments.iter().zip(&tgt_segments) {
            // Pinned gap (or nothing, before the first segment).
            if let (Some(ps), Some(pt)) = (&prev_src_hi, &prev_tgt_hi) {
                push_affine(ps, s_lo, pt, t_lo);
            }
            let (src_blocks, tgt_blocks) =
                equalize(blocks_between(s_lo, s_hi), blocks_between(t_lo, t_hi));
            let mut gap_from: Option<(Rational, Rational)> = None;
            for (sb, tb) in src_blocks.iter().zip(&tgt_blocks) {
                if let Some((gs, gt)) = gap_from {
                    push_affine(&gs, &sb.lo, &gt, &tb.lo);
                }
                push_affine(&sb.lo, &sb.hi, &tb.lo, &tb.hi);
                gap_from = Some((sb.hi.clone(), tb.hi.clone()));
            }
            prev_src_hi = Some(s_hi.clone());
            prev_tgt_hi = Some(t_hi.clone());
        }

        Ok(SplitHomeo { spec, unit_pieces })
    }

    pub fn spec(&self) -> &SplitHomeoSpec {
        &self.spec
    }

    pub fn describe(&self) -> String {
        format!(
            "[{}, {}] -> [{}, {}], {} pins, {} pieces",
            self.spec.source.0,
            self.spec.source.1,
            self.spec.target.0,
            self.spec.target.1,
            self.spec.pins.len(),
            self.unit_pieces.len()
        )
    }

    pub fn is_increasing(&self) -> bool {
        use num_traits::Signed;
        self.unit_pieces.iter().all(|(_, _, s, _)| s.is_positive())
    }

    /// Image of a unit-coordinate point, exact.
    pub fn unit_eval(&self, u: &Rational) -> Result<Rational, MapError> {
        let piece = self
            .unit_pieces
            .iter()
            .find(|(lo, hi, _, _)| lo <= u && u <= hi)
            .ok_or_else(|| MapError::OutOfDomain(u.clone()))?;
        Ok(&piece.2 * u + &piece.3)
    }

    /// Preimage of a unit-coordinate point, exact.
    pub fn unit_invert(&self, v: &Rational) -> Result<Rational, MapError> {
        for (lo, hi, s, o) in &self.unit_pieces {
            let img_lo = s * lo + o;
            let img_hi = s * hi + o;
            if &img_lo <= v && v <= &img_hi {
                return Ok((v - o) / s);
            }
        }
        Err(MapError::NotInImage(v.clone()))
    }

    fn to_unit(&self, x: &Rational) -> Rational {
        (x - &self.spec.source.0) / (&self.spec.source.1 - &self.spec.source.0)
    }

    fn from_unit_target(&self, v: &Rational) -> Rational {
        &self.spec.target.0 + v * (&self.spec.target.1 - &self.spec.target.0)
    }

    /// Image of `x` in real coordinates, exact.
    pub fn eval_exact(&self, x: &Rational) -> Result<Rational, MapError> {
        let u = self.to_unit(x);
        Ok(self.from_unit_target(&self.unit_eval(&u)?))
    }

    /// Preimage of `y` in real coordinates, exact.
    pub fn invert_exact(&self, y: &Rational) -> Result<Rational, MapError> {
        let v = (y - &self.spec.target.0) / (&self.spec.target.1 - &self.spec.target.0);
        let u = self.unit_invert(&v)?;
        Ok(&self.spec.source.0 + u * (&self.spec.source.1 - &self.spec.source.0))
    }
}

/// Builds the split homeomorphism as a validated one-piece map.
pub fn build_split_homeo(spec: SplitHomeoSpec) -> Result<PiecewiseMap, CantorError> {
    let lo = spec.source.0.clone();
    let hi = spec.source.1.clone();
    let domain = if lo == rat_i(0) && hi == rat_i(1) {
        DomainKind::Interval01
    } else {
        DomainKind::Line
    };
    let homeo = Arc::new(SplitHomeo::build(spec)?);
    Ok(PiecewiseMap::new(
        "split",
        domain,
        vec![Piece {
            lo: Some(lo),
            hi: Some(hi),
            kind: PieceKind::CantorSplit(homeo),
        }],
    ))
}
