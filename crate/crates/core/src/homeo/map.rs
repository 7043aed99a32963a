//! The piecewise map type and its point operations.

use super::piece::{as_affine, Piece};
use super::MapError;
use crate::enclosure::Enclosure;
use crate::rational::{rat_i, Rational};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    /// The closed unit interval `[0, 1]`.
    Interval01,
    /// The circle, coordinatized as `[0, 1)` with wraparound.
    Circle,
    /// The whole real line.
    Line,
}

/// An orientation-preserving piecewise monotone map.
///
/// Pieces tile the domain in increasing order and share their breakpoints;
/// at a shared breakpoint both pieces must agree (validation checks this),
/// so evaluation may use either. Maps are immutable after construction and
/// safe to share across threads.
#[derive(Clone, Debug)]
pub struct PiecewiseMap {
    name: String,
    domain_kind: DomainKind,
    pieces: Vec<Piece>,
    surjective: bool,
    /// For line maps that commute with a translation: `f(x + T) = f(x) + T`.
    period: Option<Rational>,
}

/// Certainty attached to a fixed-point enclosure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPointFlag {
    /// A sign change (or exact solve) certifies a fixed point inside.
    Certified,
    /// The interval could not be excluded; a fixed point may be present.
    Possible,
    /// Every point of the interval is fixed.
    IntervalOfFixedPoints,
}

impl PiecewiseMap {
    pub fn new(name: impl Into<String>, domain_kind: DomainKind, pieces: Vec<Piece>) -> Self {
        let mut m = PiecewiseMap {
            name: name.into(),
            domain_kind,
            pieces,
            surjective: false,
            period: None,
        };
        m.surjective = m.compute_surjective();
        m
    }

    /// Line map that commutes with translation by `period`; `pieces` cover
    /// one core period `[c, c + period]`.
    pub fn new_periodic(
        name: impl Into<String>,
        pieces: Vec<Piece>,
        period: Rational,
    ) -> Self {
        PiecewiseMap {
            name: name.into(),
            domain_kind: DomainKind::Line,
            pieces,
            surjective: true,
            period: Some(period),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn domain_kind(&self) -> DomainKind {
        self.domain_kind
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn period(&self) -> Option<&Rational> {
        self.period.as_ref()
    }

    /// Whether the map is onto its domain (automorphism) rather than a
    /// proper injection (endomorphism). Set from exact endpoint data at
    /// construction and re-checked by validation.
    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    fn compute_surjective(&self) -> bool {
        match self.domain_kind {
            DomainKind::Circle | DomainKind::Line => true,
            DomainKind::Interval01 => {
                let lo_ok = self
                    .pieces
                    .first()
                    .and_then(|p| p.eval_exact(&rat_i(0)))
                    .map(|v| v.is_zero());
                let hi_ok = self
                    .pieces
                    .last()
                    .and_then(|p| p.eval_exact(&rat_i(1)))
                    .map(|v| v.is_one());
                match (lo_ok, hi_ok) {
                    (Some(a), Some(b)) => a && b,
                    // Non-exact endpoint evaluation: check by enclosure.
                    _ => self.endpoint_fixed(&rat_i(0)) && self.endpoint_fixed(&rat_i(1)),
                }
            }
        }
    }

    fn endpoint_fixed(&self, x: &Rational) -> bool {
        let tol = crate::rational::pow2(-60);
        match self.eval(x, &tol) {
            Ok(e) => e.dist_to_point(x) <= tol,
            Err(_) => false,
        }
    }

    /// Domain bounds for bounded domains.
    pub fn domain_bounds(&self) -> Option<(Rational, Rational)> {
        match self.domain_kind {
            DomainKind::Interval01 => Some((rat_i(0), rat_i(1))),
            DomainKind::Circle => Some((rat_i(0), rat_i(1))),
            DomainKind::Line => None,
        }
    }

    fn in_domain(&self, x: &Rational) -> bool {
        match self.domain_kind {
            DomainKind::Interval01 => !x.is_negative() && x <= &rat_i(1),
            DomainKind::Circle => !x.is_negative() && x < &rat_i(1),
            DomainKind::Line => true,
        }
    }

    /// The piece whose domain contains `x` (leftmost when `x` is a shared
    /// breakpoint).
    fn piece_at(&self, x: &Rational) -> Result<&Piece, MapError> {
        self.pieces
            .iter()
            .find(|p| p.contains(x))
            .ok_or_else(|| MapError::OutOfDomain(x.clone()))
    }

    /// Image of `x` with enclosure width `<= prec`. Circle results are
    /// reduced mod 1 when exact; affine pieces give zero width.
    pub fn eval(&self, x: &Rational, prec: &Rational) -> Result<Enclosure, MapError> {
        if !self.in_domain(x) {
            return Err(MapError::OutOfDomain(x.clone()));
        }
        if let (DomainKind::Line, Some(t)) = (self.domain_kind, &self.period) {
            // Reduce into the core period covered by the pieces.
            let (core_lo, core_hi) = self.core_span();
            if x < &core_lo || x > &core_hi {
                let shift = ((x - &core_lo) / t).floor();
                let reduced = x - &shift * t;
                let e = self.eval_in_pieces(&reduced, prec)?;
                return Ok(e.shift(&(shift * t)));
            }
        }
        let e = self.eval_in_pieces(x, prec)?;
        Ok(match self.domain_kind {
            DomainKind::Circle => reduce_circle_enclosure(e),
            _ => e,
        })
    }

    fn core_span(&self) -> (Rational, Rational) {
        let lo = self
            .pieces
            .first()
            .and_then(|p| p.lo.clone())
            .unwrap_or_else(|| rat_i(0));
        let hi = self
            .pieces
            .last()
            .and_then(|p| p.hi.clone())
            .unwrap_or_else(|| rat_i(1));
        (lo, hi)
    }

    fn eval_in_pieces(&self, x: &Rational, prec: &Rational) -> Result<Enclosure, MapError> {
        self.piece_at(x)?.eval(x, prec)
    }

    /// Exact image when the relevant piece allows it.
    pub fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        let e = self.eval(x, &crate::rational::pow2(-64)).ok()?;
        e.as_exact().cloned()
    }

    /// Sound image of an interval: `[f(lo), f(hi)]` by monotonicity, valid
    /// even when the interval spans several pieces.
    pub fn eval_interval(&self, e: &Enclosure, prec: &Rational) -> Result<Enclosure, MapError> {
        if e.is_exact() {
            return self.eval(e.lo(), prec);
        }
        let lo = self.eval(e.lo(), prec)?;
        let hi = self.eval(e.hi(), prec)?;
        Ok(Enclosure::new(lo.lo().clone(), hi.hi().clone()))
    }

    /// Enclosure of the unique preimage of `y`, width `<= prec`.
    ///
    /// Affine pieces solve exactly; power pieces use exact root algebra with
    /// outward rounding; rule pieces delegate (falling back to monotone
    /// bisection inside the rule's implementation where needed).
    pub fn invert_point(&self, y: &Rational, prec: &Rational) -> Result<Enclosure, MapError> {
        if let (DomainKind::Line, Some(t)) = (self.domain_kind, &self.period) {
            let (core_lo, core_hi) = self.core_span();
            let img_lo = self.eval(&core_lo, prec)?.mid();
            let img_hi = self.eval(&core_hi, prec)?.mid();
            if y < &img_lo || y > &img_hi {
                let shift = ((y - &img_lo) / t).floor();
                let reduced = y - &shift * t;
                let e = self.invert_in_pieces(&reduced, prec)?;
                return Ok(e.shift(&(shift * t)));
            }
        }
        if self.domain_kind == DomainKind::Circle {
            // Piece values live in [0, 2); solve mod 1.
            return match self.invert_in_pieces(y, prec) {
                Ok(e) => Ok(e),
                Err(MapError::NotInImage(_)) => {
                    self.invert_in_pieces(&(y + rat_i(1)), prec)
                }
                Err(e) => Err(e),
            };
        }
        self.invert_in_pieces(y, prec)
    }

    fn invert_in_pieces(&self, y: &Rational, prec: &Rational) -> Result<Enclosure, MapError> {
        for p in &self.pieces {
            // Unbounded pieces (line rules) locate their own preimages.
            if p.lo.is_none() || p.hi.is_none() {
                return p.invert(y, prec);
            }
            let (img_lo, img_hi) = p.image_bounds(prec)?;
            if img_lo.lo() <= y && y <= img_hi.hi() {
                let cand = p.invert(y, prec)?;
                // A shared value at a breakpoint may fall to either side;
                // clamp into the piece domain.
                return Ok(clamp_enclosure(cand, p.lo.as_ref(), p.hi.as_ref()));
            }
        }
        Err(MapError::NotInImage(y.clone()))
    }

    /// Enclosures (width `<= resolution`) jointly covering every fixed point
    /// of the map on its bounded domain.
    ///
    /// Exact solves handle affine pieces (including whole intervals of fixed
    /// points); other pieces are scanned in cells of width `<= resolution`,
    /// using the monotone image test `f([u,v]) ∩ [u,v] = ∅` for exclusion and
    /// endpoint sign changes for certification.
    pub fn fixed_point_enclosures(
        &self,
        resolution: &Rational,
    ) -> Result<Vec<(Enclosure, FixedPointFlag)>, MapError> {
        assert!(resolution.is_positive());
        let mut out: Vec<(Enclosure, FixedPointFlag)> = Vec::new();
        for p in &self.pieces {
            let (lo, hi) = match (&p.lo, &p.hi) {
                (Some(a), Some(b)) => (a.clone(), b.clone()),
                _ => continue, // unbounded line pieces handled by period rule
            };
            if lo == hi {
                continue;
            }
            if let Some((slope, offset)) = as_affine(&p.kind) {
                if slope.is_one() {
                    if offset.is_zero() {
                        out.push((
                            Enclosure::new(lo, hi),
                            FixedPointFlag::IntervalOfFixedPoints,
                        ));
                    }
                    continue;
                }
                let x = offset / (Rational::one() - slope);
                if lo <= x && x <= hi {
                    out.push((Enclosure::exact(x), FixedPointFlag::Certified));
                }
                continue;
            }
            if let super::piece::PieceKind::Rule(r) = &p.kind {
                if let Some(list) = r.fixed_points(resolution) {
                    out.extend(
                        list.into_iter()
                            .filter(|(e, _)| e.hi() >= &lo && *e.lo() <= hi),
                    );
                    continue;
                }
            }
            self.scan_piece_fixed_points(p, &lo, &hi, resolution, &mut out)?;
        }
        out.sort_by(|a, b| a.0.lo().cmp(b.0.lo()));
        out.dedup_by(|a, b| a.0 == b.0);
        Ok(out)
    }

    fn scan_piece_fixed_points(
        &self,
        piece: &Piece,
        lo: &Rational,
        hi: &Rational,
        resolution: &Rational,
        out: &mut Vec<(Enclosure, FixedPointFlag)>,
    ) -> Result<(), MapError> {
        let prec = resolution / rat_i(16);
        // Bisection with a sound exclusion test: since the piece is
        // monotone, the image of [u, v] is [f(u), f(v)]; if that misses
        // [u, v] the cell holds no fixed point. Cells that survive at the
        // working resolution are refined a few extra levels to weed out
        // neighbors of genuine fixed points before being reported.
        let mut work: Vec<(Rational, Rational)> = vec![(lo.clone(), hi.clone())];
        while let Some((u, v)) = work.pop() {
            let fu = piece.eval(&u, &prec)?;
            let fv = piece.eval(&v, &prec)?;
            if fv.hi() < &u || fu.lo() > &v {
                continue;
            }
            if &(&v - &u) > resolution {
                let mid = crate::rational::midpoint(&u, &v);
                work.push((u, mid.clone()));
                work.push((mid, v));
                continue;
            }
            let su = sign_of(&fu, &u);
            let sv = sign_of(&fv, &v);
            let flag = match (su, sv) {
                (Some(0), _) | (_, Some(0)) => FixedPointFlag::Certified,
                (Some(a), Some(b)) if a != b => FixedPointFlag::Certified,
                _ => {
                    if !self.survives_refinement(piece, &u, &v, &prec, 4)? {
                        continue;
                    }
                    FixedPointFlag::Possible
                }
            };
            out.push((Enclosure::new(u, v), flag));
        }
        out.sort_by(|a, b| a.0.lo().cmp(b.0.lo()));
        Ok(())
    }

    /// Whether any sub-cell of `[u, v]` survives `depth` more levels of the
    /// exclusion test.
    fn survives_refinement(
        &self,
        piece: &Piece,
        u: &Rational,
        v: &Rational,
        prec: &Rational,
        depth: u32,
    ) -> Result<bool, MapError> {
        let fu = piece.eval(u, prec)?;
        let fv = piece.eval(v, prec)?;
        if fv.hi() < u || fu.lo() > v {
            return Ok(false);
        }
        if depth == 0 {
            return Ok(true);
        }
        let mid = crate::rational::midpoint(u, v);
        Ok(self.survives_refinement(piece, u, &mid, prec, depth - 1)?
            || self.survives_refinement(piece, &mid, v, prec, depth - 1)?)
    }

    /// Exact piecewise-affine composition `self ∘ other` (apply `other`
    /// first). Both maps must be all-affine on the same bounded domain.
    pub fn compose_affine(&self, other: &PiecewiseMap) -> Result<PiecewiseMap, MapError> {
        let all_affine = |m: &PiecewiseMap| {
            m.pieces
                .iter()
                .all(|p| as_affine(&p.kind).is_some() && p.lo.is_some() && p.hi.is_some())
        };
        if !all_affine(self) || !all_affine(other) {
            return Err(MapError::NonAffineInput);
        }
        let mut pieces = Vec::new();
        for pb in &other.pieces {
            let (sb, ob) = as_affine(&pb.kind).unwrap();
            let (b_lo, b_hi) = (pb.lo.clone().unwrap(), pb.hi.clone().unwrap());
            for pa in &self.pieces {
                let (sa, oa) = as_affine(&pa.kind).unwrap();
                let (a_lo, a_hi) = (pa.lo.clone().unwrap(), pa.hi.clone().unwrap());
                // x must satisfy: b_lo <= x <= b_hi and a_lo <= sb*x+ob <= a_hi.
                let pre_lo = (&a_lo - ob) / sb;
                let pre_hi = (&a_hi - ob) / sb;
                let lo = b_lo.clone().max(pre_lo);
                let hi = b_hi.clone().min(pre_hi);
                if lo < hi {
                    pieces.push(Piece::affine(lo, hi, sa * sb, sa * ob + oa));
                }
            }
        }
        pieces.sort_by(|p, q| p.lo.cmp(&q.lo));
        Ok(PiecewiseMap::new(
            format!("{}*{}", self.name, other.name),
            self.domain_kind,
            pieces,
        ))
    }
}

fn sign_of(fx: &Enclosure, x: &Rational) -> Option<i8> {
    // Sign of f(x) - x, when the enclosure decides it.
    if fx.lo() > x {
        Some(1)
    } else if fx.hi() < x {
        Some(-1)
    } else if fx.is_exact() && fx.lo() == x {
        Some(0)
    } else {
        None
    }
}

fn clamp_enclosure(e: Enclosure, lo: Option<&Rational>, hi: Option<&Rational>) -> Enclosure {
    let mut a = e.lo().clone();
    let mut b = e.hi().clone();
    if let Some(l) = lo {
        if &a < l {
            a = l.clone();
        }
        if &b < l {
            b = l.clone();
        }
    }
    if let Some(h) = hi {
        if &b > h {
            b = h.clone();
        }
        if &a > h {
            a = h.clone();
        }
    }
    Enclosure::new(a, b)
}

fn reduce_circle_enclosure(e: Enclosure) -> Enclosure {
    let one = rat_i(1);
    if e.lo() >= &one {
        e.shift(&rat_i(-1))
    } else {
        e
    }
}

/// The identity map on the unit interval.
pub fn identity_map(name: &str) -> PiecewiseMap {
    PiecewiseMap::new(
        name,
        DomainKind::Interval01,
        vec![Piece::affine(rat_i(0), rat_i(1), rat_i(1), rat_i(0))],
    )
}
