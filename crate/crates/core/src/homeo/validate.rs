//! Map validation: continuity, monotonicity, endpoint and surjectivity
//! classification.

use super::map::{DomainKind, PiecewiseMap};
use super::piece::PieceKind;
use super::MapError;
use crate::rational::{pow_int, rat, rat_i, Rational};
use num_traits::{Signed, Zero};

/// Continuity verdict at one internal breakpoint.
#[derive(Clone, Debug)]
pub struct BreakpointCheck {
    pub at: Rational,
    /// Exact agreement of the two one-sided values (affine joins), or
    /// enclosure agreement within the validation tolerance.
    pub exact: bool,
    pub ok: bool,
}

/// What validation found. A map is usable only if `usable()` holds; the
/// surjectivity field classifies automorphism versus endomorphism.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub map_name: String,
    pub breakpoints: Vec<BreakpointCheck>,
    pub monotone: bool,
    pub continuous: bool,
    pub fixes_endpoints: Option<bool>,
    pub surjective: bool,
    pub errors: Vec<MapError>,
}

impl ValidationReport {
    pub fn usable(&self) -> bool {
        self.monotone && self.continuous && self.errors.is_empty()
    }
}

/// Tolerance for continuity at joins involving power or rule pieces, where
/// exact equality may be unattainable: `10^-30`.
pub fn join_tolerance() -> Rational {
    pow_int(&rat(1, 10), 30)
}

/// Checks piece tiling, continuity at every internal breakpoint (exact for
/// affine-affine joins, enclosure agreement at `10^-30` otherwise),
/// monotonicity per piece, endpoint behavior, and surjectivity.
pub fn validate_map(map: &PiecewiseMap) -> ValidationReport {
    let mut report = ValidationReport {
        map_name: map.name().to_string(),
        breakpoints: Vec::new(),
        monotone: true,
        continuous: true,
        fixes_endpoints: None,
        surjective: map.is_surjective(),
        errors: Vec::new(),
    };
    let pieces = map.pieces();
    if pieces.is_empty() {
        report
            .errors
            .push(MapError::GapInDomain(rat_i(0)));
        report.continuous = false;
        return report;
    }

    // Tiling: consecutive pieces must share their breakpoint exactly.
    for w in pieces.windows(2) {
        match (&w[0].hi, &w[1].lo) {
            (Some(a), Some(b)) => {
                if a < b {
                    report.errors.push(MapError::GapInDomain(a.clone()));
                } else if a > b {
                    report.errors.push(MapError::OverlappingPieces(b.clone()));
                }
            }
            _ => report.errors.push(MapError::GapInDomain(rat_i(0))),
        }
    }
    if let Some((dom_lo, dom_hi)) = map.domain_bounds() {
        if pieces.first().and_then(|p| p.lo.clone()) != Some(dom_lo.clone()) {
            report.errors.push(MapError::GapInDomain(dom_lo));
        }
        let want_hi = match map.domain_kind() {
            DomainKind::Circle => rat_i(1),
            _ => dom_hi.clone(),
        };
        if pieces.last().and_then(|p| p.hi.clone()) != Some(want_hi.clone()) {
            report.errors.push(MapError::GapInDomain(want_hi));
        }
    }

    // Continuity at internal breakpoints.
    let tol = join_tolerance();
    let prec = &tol / rat_i(4);
    for w in pieces.windows(2) {
        let (Some(at), Some(_)) = (&w[0].hi, &w[1].lo) else {
            continue;
        };
        let left = w[0].eval(at, &prec);
        let right = w[1].eval(at, &prec);
        match (left, right) {
            (Ok(l), Ok(r)) => {
                let affine_join = matches!(w[0].kind, PieceKind::Affine { .. })
                    && matches!(w[1].kind, PieceKind::Affine { .. });
                let (exact, ok) = if affine_join {
                    let same = l.as_exact().is_some() && l == r;
                    (true, same)
                } else {
                    (false, l.gap_to(&r) <= tol)
                };
                if !ok {
                    report.continuous = false;
                }
                report.breakpoints.push(BreakpointCheck {
                    at: at.clone(),
                    exact,
                    ok,
                });
            }
            _ => {
                report.continuous = false;
                report.breakpoints.push(BreakpointCheck {
                    at: at.clone(),
                    exact: false,
                    ok: false,
                });
            }
        }
    }

    // Monotonicity: exact slope checks for affine pieces, sampled order
    // checks elsewhere.
    for p in pieces {
        let ok = match &p.kind {
            PieceKind::Affine { slope, .. } => slope.is_positive(),
            PieceKind::Power {
                coeff,
                scale,
                exponent,
                ..
            } => coeff.is_positive() && scale.is_positive() && exponent.is_positive(),
            PieceKind::CantorSplit(s) => s.is_increasing(),
            PieceKind::Rule(_) => sample_monotone(map, p),
        };
        if !ok {
            report.monotone = false;
            report.errors.push(MapError::NonMonotonePiece(
                p.lo.clone().unwrap_or_else(Rational::zero),
                p.hi.clone().unwrap_or_else(Rational::zero),
            ));
        }
    }

    // Endpoint behavior on the closed interval.
    if map.domain_kind() == DomainKind::Interval01 {
        let fixes = map.eval_exact(&rat_i(0)) == Some(rat_i(0))
            && map.eval_exact(&rat_i(1)) == Some(rat_i(1));
        report.fixes_endpoints = Some(fixes);
    }

    report
}

/// Order spot-check over a grid plus rule-supplied breakpoints.
fn sample_monotone(map: &PiecewiseMap, piece: &super::piece::Piece) -> bool {
    let lo = piece.lo.clone().unwrap_or_else(|| rat_i(0));
    let hi = piece.hi.clone().unwrap_or_else(|| rat_i(1));
    if lo >= hi {
        return true;
    }
    let mut samples: Vec<Rational> = (0..=32)
        .map(|i| &lo + (&hi - &lo) * rat(i, 32))
        .collect();
    if let PieceKind::Rule(r) = &piece.kind {
        samples.extend(r.sample_breakpoints(&lo, &hi));
    }
    samples.sort();
    samples.dedup();
    let prec = join_tolerance();
    let mut prev: Option<crate::enclosure::Enclosure> = None;
    for x in &samples {
        let Ok(e) = map.eval(x, &prec) else {
            return false;
        };
        if let Some(p) = &prev {
            // Disjoint enclosures must come in increasing order.
            if e.hi() < p.lo() {
                return false;
            }
        }
        prev = Some(e);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homeo::map::identity_map;
    use crate::homeo::piece::Piece;

    fn sample_g() -> PiecewiseMap {
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

    #[test]
    fn block_shift_map_is_usable_automorphism() {
        let r = validate_map(&sample_g());
        assert!(r.usable(), "{:?}", r.errors);
        assert!(r.surjective);
        assert_eq!(r.fixes_endpoints, Some(true));
        assert!(r.breakpoints.iter().all(|b| b.ok && b.exact));
        // Continuity at 2/9: both sides give 2/3; at 1/3: both give 7/9.
        assert_eq!(r.breakpoints.len(), 2);
    }

    #[test]
    fn identity_is_usable() {
        let r = validate_map(&identity_map("id"));
        assert!(r.usable());
        assert!(r.surjective);
    }

    #[test]
    fn discontinuity_detected() {
        let broken = PiecewiseMap::new(
            "broken",
            DomainKind::Interval01,
            vec![
                Piece::affine(rat_i(0), rat(1, 2), rat_i(1), rat_i(0)),
                Piece::affine(rat(1, 2), rat_i(1), rat(1, 2), rat(1, 2)),
            ],
        );
        // Left value at 1/2 is 1/2, right value is 3/4.
        let r = validate_map(&broken);
        assert!(!r.continuous);
        assert!(!r.usable());
    }

    #[test]
    fn overlap_and_gap_detected() {
        let overlapping = PiecewiseMap::new(
            "o",
            DomainKind::Interval01,
            vec![
                Piece::affine(rat_i(0), rat(2, 3), rat_i(1), rat_i(0)),
                Piece::affine(rat(1, 3), rat_i(1), rat_i(1), rat_i(0)),
            ],
        );
        let r = validate_map(&overlapping);
        assert!(r
            .errors
            .iter()
            .any(|e| matches!(e, MapError::OverlappingPieces(_))));

        let gappy = PiecewiseMap::new(
            "g",
            DomainKind::Interval01,
            vec![
                Piece::affine(rat_i(0), rat(1, 3), rat_i(1), rat_i(0)),
                Piece::affine(rat(2, 3), rat_i(1), rat_i(1), rat_i(0)),
            ],
        );
        let r = validate_map(&gappy);
        assert!(r
            .errors
            .iter()
            .any(|e| matches!(e, MapError::GapInDomain(_))));
    }

    #[test]
    fn decreasing_piece_rejected() {
        let dec = PiecewiseMap::new(
            "d",
            DomainKind::Interval01,
            vec![Piece::affine(rat_i(0), rat_i(1), rat_i(-1), rat_i(1))],
        );
        let r = validate_map(&dec);
        assert!(!r.monotone);
        assert!(r
            .errors
            .iter()
            .any(|e| matches!(e, MapError::NonMonotonePiece(..))));
    }

    #[test]
    fn endomorphism_classified_not_surjective() {
        // First piece of the printed transport map: h(0) = 1/4 > 0.
        let h = PiecewiseMap::new(
            "h2",
            DomainKind::Interval01,
            vec![
                Piece::affine(rat_i(0), rat(1, 4), rat(1, 2), rat(1, 4)),
                Piece::affine(rat(1, 4), rat(3, 8), rat_i(1), rat(1, 8)),
                Piece::affine(rat(3, 8), rat_i(1), rat(4, 5), rat(1, 5)),
            ],
        );
        let r = validate_map(&h);
        assert!(r.usable(), "{:?}", r.errors);
        assert!(!r.surjective);
        assert_eq!(r.fixes_endpoints, Some(false));
    }
}
