//! Individual pieces of a piecewise map.

use super::MapError;
use crate::enclosure::{pow_enclosure, Enclosure};
use crate::rational::{pow_int, Rational};
use num_traits::{One, Signed};
use std::sync::Arc;

/// Evaluator for pieces that are defined by a construction rather than a
/// closed formula (conjugation towers, lazily materialized Cantor maps).
///
/// Implementations must be strictly increasing on the piece domain and are
/// expected to be cheap to call repeatedly; enclosure outputs must contain
/// the true value.
pub trait MapRule: Send + Sync {
    fn describe(&self) -> String;

    /// Enclosure of the image, width `<= prec` (exact allowed).
    fn eval(&self, x: &Rational, prec: &Rational) -> Result<Enclosure, MapError>;

    /// Enclosure of the unique preimage, width `<= prec`.
    fn invert(&self, y: &Rational, prec: &Rational) -> Result<Enclosure, MapError>;

    /// Exact image when the rule's data allows it.
    fn eval_exact(&self, _x: &Rational) -> Option<Rational> {
        None
    }

    /// Points where the rule changes formula, restricted to `[lo, hi]`,
    /// for validation spot checks. A bounded sample is fine.
    fn sample_breakpoints(&self, _lo: &Rational, _hi: &Rational) -> Vec<Rational> {
        Vec::new()
    }

    /// Fixed-point enclosures known from the rule's own structure, when it
    /// can do better than a sign scan (maps tangent to the diagonal at
    /// their fixed points). `None` falls back to the generic scan.
    fn fixed_points(
        &self,
        _resolution: &Rational,
    ) -> Option<Vec<(Enclosure, crate::homeo::FixedPointFlag)>> {
        None
    }
}

#[derive(Clone)]
pub enum PieceKind {
    /// `x -> slope*x + offset`, `slope > 0`.
    Affine { slope: Rational, offset: Rational },
    /// `x -> coeff*(scale*(x - center))^exponent + offset` with positive
    /// `coeff`, `scale`, `exponent` and `x - center >= 0` on the piece
    /// domain. The inner scale keeps printed forms like
    /// `r*((x - a)/r)^(1/3) + b` representable with rational data only.
    Power {
        coeff: Rational,
        scale: Rational,
        center: Rational,
        offset: Rational,
        exponent: Rational,
    },
    /// A Cantor-set-aligned split homeomorphism (finite piecewise-affine,
    /// produced by the cantor module).
    CantorSplit(Arc<crate::cantor::SplitHomeo>),
    /// A construction-defined rule.
    Rule(Arc<dyn MapRule>),
}

impl std::fmt::Debug for PieceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PieceKind::Affine { slope, offset } => write!(f, "Affine({slope}x + {offset})"),
            PieceKind::Power {
                coeff,
                scale,
                center,
                offset,
                exponent,
            } => write!(f, "Power({coeff}({scale}(x - {center}))^{exponent} + {offset})"),
            PieceKind::CantorSplit(s) => write!(f, "CantorSplit({})", s.describe()),
            PieceKind::Rule(r) => write!(f, "Rule({})", r.describe()),
        }
    }
}

/// One piece of a piecewise map: a kind plus its closed domain `[lo, hi]`.
/// `None` bounds mean unbounded (line maps only).
#[derive(Clone, Debug)]
pub struct Piece {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
    pub kind: PieceKind,
}

impl Piece {
    pub fn affine(lo: Rational, hi: Rational, slope: Rational, offset: Rational) -> Piece {
        Piece {
            lo: Some(lo),
            hi: Some(hi),
            kind: PieceKind::Affine { slope, offset },
        }
    }

    pub fn power(
        lo: Rational,
        hi: Rational,
        coeff: Rational,
        center: Rational,
        offset: Rational,
        exponent: Rational,
    ) -> Piece {
        Piece::power_scaled(lo, hi, coeff, Rational::one(), center, offset, exponent)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn power_scaled(
        lo: Rational,
        hi: Rational,
        coeff: Rational,
        scale: Rational,
        center: Rational,
        offset: Rational,
        exponent: Rational,
    ) -> Piece {
        Piece {
            lo: Some(lo),
            hi: Some(hi),
            kind: PieceKind::Power {
                coeff,
                scale,
                center,
                offset,
                exponent,
            },
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo <= x) && self.hi.as_ref().is_none_or(|hi| x <= hi)
    }

    /// Image of `x`, exact for affine pieces and exactly-rooting power
    /// pieces, otherwise an enclosure of width `<= prec`.
    pub fn eval(&self, x: &Rational, prec: &Rational) -> Result<Enclosure, MapError> {
        match &self.kind {
            PieceKind::Affine { slope, offset } => Ok(Enclosure::exact(slope * x + offset)),
            PieceKind::Power {
                coeff,
                scale,
                center,
                offset,
                exponent,
            } => {
                let u = scale * (x - center);
                if u.is_negative() {
                    return Err(MapError::OutOfDomain(x.clone()));
                }
                if exponent.denom().is_one() {
                    // Integer exponent: exact.
                    let e = i64::try_from(exponent.numer()).expect("small integer exponent");
                    return Ok(Enclosure::exact(coeff * pow_int(&u, e) + offset));
                }
                let inner = prec / coeff.abs().max(Rational::one());
                let p = pow_enclosure(&u, exponent, &inner);
                Ok(p.scale(coeff).shift(offset))
            }
            PieceKind::CantorSplit(s) => Ok(Enclosure::exact(s.eval_exact(x)?)),
            PieceKind::Rule(r) => {
                if let Some(v) = r.eval_exact(x) {
                    Ok(Enclosure::exact(v))
                } else {
                    r.eval(x, prec)
                }
            }
        }
    }

    /// Exact value when the piece data allows it at `x`.
    pub fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        let probe = crate::rational::pow2(-64);
        match self.eval(x, &probe) {
            Ok(e) => e.as_exact().cloned(),
            Err(_) => None,
        }
    }

    /// Unique preimage of `y` within this piece, width `<= prec`.
    pub fn invert(&self, y: &Rational, prec: &Rational) -> Result<Enclosure, MapError> {
        match &self.kind {
            PieceKind::Affine { slope, offset } => Ok(Enclosure::exact((y - offset) / slope)),
            PieceKind::Power {
                coeff,
                scale,
                center,
                offset,
                exponent,
            } => {
                let u = (y - offset) / coeff;
                if u.is_negative() {
                    return Err(MapError::NotInImage(y.clone()));
                }
                // scale*(x - center) = u^(1/exponent)
                let inv_exp = exponent.recip();
                let inner = prec * scale;
                let p = pow_enclosure(&u, &inv_exp, &inner);
                Ok(p.scale(&scale.recip()).shift(center))
            }
            PieceKind::CantorSplit(s) => Ok(Enclosure::exact(s.invert_exact(y)?)),
            PieceKind::Rule(r) => r.invert(y, prec),
        }
    }

    /// Both bounds of the image of the piece domain, exact where possible.
    /// Only valid for bounded pieces.
    pub fn image_bounds(&self, prec: &Rational) -> Result<(Enclosure, Enclosure), MapError> {
        let lo = self.lo.clone().ok_or(MapError::NonAffineInput)?;
        let hi = self.hi.clone().ok_or(MapError::NonAffineInput)?;
        Ok((self.eval(&lo, prec)?, self.eval(&hi, prec)?))
    }
}

/// Exposes the affine coefficients when the piece is affine.
pub(crate) fn as_affine(kind: &PieceKind) -> Option<(&Rational, &Rational)> {
    match kind {
        PieceKind::Affine { slope, offset } => Some((slope, offset)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{pow2, rat, rat_i};

    #[test]
    fn affine_piece_is_exact() {
        let p = Piece::affine(rat_i(0), rat(2, 9), rat_i(3), rat_i(0));
        let e = p.eval(&rat(2, 9), &pow2(-10)).unwrap();
        assert_eq!(e.as_exact(), Some(&rat(2, 3)));
    }

    #[test]
    fn power_piece_exact_on_perfect_roots() {
        // x -> x^(1/3) at 1/8.
        let p = Piece::power(rat_i(0), rat_i(1), rat_i(1), rat_i(0), rat_i(0), rat(1, 3));
        let e = p.eval(&rat(1, 8), &pow2(-20)).unwrap();
        assert_eq!(e.as_exact(), Some(&rat(1, 2)));
    }

    #[test]
    fn power_piece_encloses_irrational_values() {
        let p = Piece::power(rat_i(0), rat_i(1), rat_i(1), rat_i(0), rat_i(0), rat(1, 3));
        let e = p.eval(&rat(1, 2), &pow2(-40)).unwrap();
        assert!(e.width() <= pow2(-40));
        assert!(pow_int(e.lo(), 3) <= rat(1, 2) && pow_int(e.hi(), 3) >= rat(1, 2));
    }

    #[test]
    fn power_invert_round_trips() {
        // y = x^2 inverted at 1/4 -> 1/2.
        let p = Piece::power(rat_i(0), rat_i(1), rat_i(1), rat_i(0), rat_i(0), rat_i(2));
        let e = p.invert(&rat(1, 4), &pow2(-30)).unwrap();
        assert_eq!(e.as_exact(), Some(&rat(1, 2)));
    }
}
