//! Generator systems and word evaluation against them.

use super::ActionError;
use crate::enclosure::Enclosure;
use crate::homeo::{
    validate_map, DomainKind, ExactWordEvaluator, FixedPointFlag, MapError, MapWord,
    PiecewiseMap, ValidationReport,
};
use crate::rational::{pow2, Rational};
use num_traits::Signed;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A finite family of named generators acting on a common domain, together
/// with the designated points and level ladder of the construction it came
/// from.
///
/// Immutable after construction; generator order is declaration order and
/// fixes the deterministic exploration order everywhere downstream.
#[derive(Clone)]
pub struct GeneratorSystem {
    name: String,
    domain_kind: DomainKind,
    generators: Vec<PiecewiseMap>,
    invertible: bool,
    designated: BTreeMap<String, Rational>,
    ladder: Vec<String>,
    /// Finite-orbit points on the circle (empty on the interval, where the
    /// endpoints play the role).
    finite_orbit_points: Vec<Rational>,
    /// Human-readable notes about construction-time adjustments.
    notes: Vec<String>,
    /// Closed-form word evaluator, when the generator family has one.
    word_evaluator: Option<Arc<dyn ExactWordEvaluator>>,
}

impl std::fmt::Debug for GeneratorSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneratorSystem")
            .field("name", &self.name)
            .field("domain_kind", &self.domain_kind)
            .field(
                "generators",
                &self.generators.iter().map(|g| g.name()).collect::<Vec<_>>(),
            )
            .field("invertible", &self.invertible)
            .finish()
    }
}

impl GeneratorSystem {
    pub fn new(
        name: impl Into<String>,
        domain_kind: DomainKind,
        generators: Vec<PiecewiseMap>,
        invertible: bool,
    ) -> Result<GeneratorSystem, ActionError> {
        let name = name.into();
        if generators.is_empty() {
            return Err(ActionError::InvalidSystem(format!(
                "{name}: no generators"
            )));
        }
        for g in &generators {
            if g.domain_kind() != domain_kind {
                return Err(ActionError::InvalidSystem(format!(
                    "{name}: generator {} has mismatched domain",
                    g.name()
                )));
            }
            if invertible && !g.is_surjective() {
                return Err(ActionError::InvalidSystem(format!(
                    "{name}: generator {} is not surjective but the system is marked invertible",
                    g.name()
                )));
            }
        }
        Ok(GeneratorSystem {
            name,
            domain_kind,
            generators,
            invertible,
            designated: BTreeMap::new(),
            ladder: Vec::new(),
            finite_orbit_points: Vec::new(),
            notes: Vec::new(),
            word_evaluator: None,
        })
    }

    pub fn with_designated(mut self, name: &str, value: Rational) -> Self {
        self.designated.insert(name.to_string(), value);
        self
    }

    pub fn with_ladder(mut self, names: &[&str]) -> Self {
        self.ladder = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_finite_orbit_points(mut self, points: Vec<Rational>) -> Self {
        self.finite_orbit_points = points;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_word_evaluator(mut self, ev: Arc<dyn ExactWordEvaluator>) -> Self {
        self.word_evaluator = Some(ev);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_kind(&self) -> DomainKind {
        self.domain_kind
    }

    pub fn generators(&self) -> &[PiecewiseMap] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Result<&PiecewiseMap, MapError> {
        self.generators
            .iter()
            .find(|g| g.name() == name)
            .ok_or_else(|| MapError::UnknownGenerator(name.to_string()))
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    pub fn designated(&self) -> &BTreeMap<String, Rational> {
        &self.designated
    }

    pub fn designated_point(&self, name: &str) -> Option<&Rational> {
        self.designated.get(name)
    }

    pub fn ladder(&self) -> &[String] {
        &self.ladder
    }

    pub fn finite_orbit_points(&self) -> &[Rational] {
        &self.finite_orbit_points
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn word_evaluator(&self) -> Option<&Arc<dyn ExactWordEvaluator>> {
        self.word_evaluator.as_ref()
    }

    /// Validation reports for every generator, in declaration order.
    pub fn validate_all(&self) -> Vec<ValidationReport> {
        self.generators.iter().map(validate_map).collect()
    }

    /// A word is admissible when its letters name generators and inverse
    /// letters only appear in invertible systems.
    pub fn check_word(&self, word: &MapWord) -> Result<(), MapError> {
        for (i, l) in word.letters().iter().enumerate() {
            let gen = self.generator(&l.gen)?;
            if l.exp < 0 {
                if !self.invertible {
                    return Err(MapError::InverseOfEndomorphism {
                        map: gen.name().to_string(),
                        letter: i,
                    });
                }
                if !gen.is_surjective() {
                    return Err(MapError::InverseOfEndomorphism {
                        map: gen.name().to_string(),
                        letter: i,
                    });
                }
            }
        }
        Ok(())
    }

    /// Evaluates `word` at the exact point `x`; exact result when the whole
    /// chain stays exact.
    pub fn eval_word_point(
        &self,
        word: &MapWord,
        x: &Rational,
        prec: &Rational,
    ) -> Result<Enclosure, MapError> {
        self.check_word(word)?;
        if let Some(ev) = &self.word_evaluator {
            return Ok(Enclosure::exact(ev.eval_word_exact(word, x)?));
        }
        let mut e = Enclosure::exact(x.clone());
        let inner = inner_precision(prec, word.len());
        for (i, l) in word.letters().iter().enumerate() {
            for _ in 0..l.exp.unsigned_abs() {
                e = self
                    .apply_letter(&l.gen, l.exp.signum(), &e, &inner)
                    .map_err(|source| MapError::MidWord {
                        index: i,
                        name: l.gen.clone(),
                        source: Box::new(source),
                    })?;
            }
        }
        Ok(e)
    }

    /// Applies one generator (or its inverse) to an enclosure: monotone
    /// image through endpoint evaluation.
    pub(crate) fn apply_letter(
        &self,
        gen: &str,
        sign: i64,
        e: &Enclosure,
        prec: &Rational,
    ) -> Result<Enclosure, MapError> {
        let map = self.generator(gen)?;
        let out = if sign >= 0 {
            map.eval_interval(e, prec)?
        } else if let Some(x) = e.as_exact() {
            map.invert_point(x, prec)?
        } else {
            let lo = map.invert_point(e.lo(), prec)?;
            let hi = map.invert_point(e.hi(), prec)?;
            Enclosure::new(lo.lo().clone(), hi.hi().clone())
        };
        Ok(out.round_outward(128))
    }
}

/// Adaptive inner precision: tight enough that composition error through
/// `len` letters stays within the requested output precision for the slopes
/// occurring in practice; the caller re-verifies widths.
fn inner_precision(prec: &Rational, len: u64) -> Rational {
    let extra = 8 + 2 * len.min(64);
    prec * pow2(-(extra as i64))
}

/// Word evaluation with adaptive refinement: retries at finer inner
/// precision until the output enclosure meets `prec`.
pub fn eval_word(
    system: &GeneratorSystem,
    word: &MapWord,
    x: &Rational,
    prec: &Rational,
) -> Result<Enclosure, MapError> {
    let mut p = prec.clone();
    for _ in 0..8 {
        let e = system.eval_word_point(word, x, &p)?;
        if e.width() <= *prec {
            return Ok(e);
        }
        p = &p * pow2(-16);
    }
    system.eval_word_point(word, x, &p)
}

/// Enclosures where every generator may have a fixed point: the
/// intersection of the per-generator fixed-point lists. Exact common fixed
/// points (all generators fix the point exactly) are reported as certified
/// zero-width enclosures.
pub fn common_fixed_points(
    system: &GeneratorSystem,
    resolution: &Rational,
) -> Result<Vec<(Enclosure, FixedPointFlag)>, MapError> {
    let mut lists = Vec::new();
    for g in system.generators() {
        lists.push(g.fixed_point_enclosures(resolution)?);
    }
    let Some((first, rest)) = lists.split_first() else {
        return Ok(Vec::new());
    };
    // Cross-refine: every way of overlapping one enclosure per generator
    // yields a candidate intersection.
    let mut current: Vec<(Enclosure, FixedPointFlag)> = first.clone();
    for list in rest {
        let mut next = Vec::new();
        for (c, cf) in &current {
            for (o, of) in list {
                if c.intersects(o) {
                    next.push((
                        Enclosure::new(
                            c.lo().clone().max(o.lo().clone()),
                            c.hi().clone().min(o.hi().clone()),
                        ),
                        combine_flags(*cf, *of),
                    ));
                }
            }
        }
        current = next;
    }
    // Drop candidates nested inside a certified neighbor, then upgrade
    // exact points fixed by every generator.
    current.sort_by(|a, b| a.0.lo().cmp(b.0.lo()).then(b.0.hi().cmp(a.0.hi())));
    current.dedup_by(|a, b| b.0.lo() <= a.0.lo() && a.0.hi() <= b.0.hi());
    let mut out = Vec::new();
    for (acc, mut flag) in current {
        if let Some(x) = acc.as_exact() {
            let all_fix = system
                .generators()
                .iter()
                .all(|g| g.eval_exact(x) == Some(x.clone()));
            if all_fix {
                flag = FixedPointFlag::Certified;
            }
        }
        out.push((acc, flag));
    }
    Ok(out)
}

fn combine_flags(a: FixedPointFlag, b: FixedPointFlag) -> FixedPointFlag {
    use FixedPointFlag::*;
    match (a, b) {
        (IntervalOfFixedPoints, IntervalOfFixedPoints) => IntervalOfFixedPoints,
        (Certified, Certified) | (Certified, IntervalOfFixedPoints)
        | (IntervalOfFixedPoints, Certified) => Certified,
        _ => Possible,
    }
}

/// Enclosures meeting the interior region `(margin, 1 - margin)`.
pub(crate) fn interior_only(
    list: &[(Enclosure, FixedPointFlag)],
    margin: &Rational,
) -> Vec<(Enclosure, FixedPointFlag)> {
    use num_traits::One;
    list.iter()
        .filter(|(e, _)| e.hi() > margin && *e.lo() < Rational::one() - margin)
        .cloned()
        .collect()
}

pub(crate) fn default_dedup_tol() -> Rational {
    pow2(-40)
}

pub(crate) fn default_eval_prec() -> Rational {
    pow2(-42)
}

#[allow(unused)]
fn _assert_signed_used(x: &Rational) -> bool {
    x.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{build_f, build_g, CoordinateEvaluator};
    use crate::homeo::{parse_word, Piece};
    use crate::rational::{rat, rat_i};

    fn square_map() -> PiecewiseMap {
        PiecewiseMap::new(
            "g",
            DomainKind::Interval01,
            vec![Piece::power(
                rat_i(0),
                rat_i(1),
                rat_i(1),
                rat_i(0),
                rat_i(0),
                rat_i(2),
            )],
        )
    }

    fn cantor_system() -> GeneratorSystem {
        GeneratorSystem::new(
            "two-gen",
            DomainKind::Interval01,
            vec![build_g(), build_f()],
            true,
        )
        .unwrap()
        .with_word_evaluator(Arc::new(CoordinateEvaluator))
    }

    #[test]
    fn empty_word_is_identity() {
        let sys = cantor_system();
        let e = eval_word(&sys, &MapWord::identity(), &rat(1, 3), &pow2(-20)).unwrap();
        assert_eq!(e.as_exact(), Some(&rat(1, 3)));
    }

    #[test]
    fn double_application_matches_printed_arithmetic() {
        let sys = cantor_system();
        let w = parse_word("g g").unwrap();
        let e = eval_word(&sys, &w, &rat(2, 9), &pow2(-20)).unwrap();
        assert_eq!(e.as_exact(), Some(&rat(8, 9)));
    }

    #[test]
    fn inverse_letter_inverts() {
        let sys = cantor_system();
        let w = parse_word("g^-1").unwrap();
        let e = eval_word(&sys, &w, &rat(2, 3), &pow2(-20)).unwrap();
        assert_eq!(e.as_exact(), Some(&rat(2, 9)));
    }

    #[test]
    fn inverse_rejected_for_semigroups() {
        let sys = GeneratorSystem::new(
            "semi",
            DomainKind::Interval01,
            vec![square_map()],
            false,
        )
        .unwrap();
        let w = parse_word("g^-1").unwrap();
        assert!(matches!(
            eval_word(&sys, &w, &rat(1, 2), &pow2(-20)),
            Err(MapError::InverseOfEndomorphism { .. })
        ));
    }

    #[test]
    fn word_error_reports_failing_letter() {
        // Words walking out of the domain report the letter index.
        let shift = PiecewiseMap::new_periodic(
            "t",
            vec![Piece {
                lo: None,
                hi: None,
                kind: crate::homeo::PieceKind::Affine {
                    slope: rat_i(1),
                    offset: rat_i(1),
                },
            }],
            rat_i(1),
        );
        let sys =
            GeneratorSystem::new("line", DomainKind::Line, vec![shift], true).unwrap();
        // Fine on the line; now an interval system with a bad generator name.
        let isys = cantor_system();
        let w = parse_word("g h").unwrap();
        assert!(matches!(
            eval_word(&isys, &w, &rat(1, 2), &pow2(-20)),
            Err(MapError::UnknownGenerator(_))
        ));
        let w = parse_word("t").unwrap();
        assert!(eval_word(&sys, &w, &rat(1, 2), &pow2(-20)).is_ok());
    }

    #[test]
    fn common_fixed_points_of_power_pair() {
        // x^(1/3) and x^2 share exactly {0, 1}.
        let cube_root = PiecewiseMap::new(
            "f",
            DomainKind::Interval01,
            vec![Piece::power(
                rat_i(0),
                rat_i(1),
                rat_i(1),
                rat_i(0),
                rat_i(0),
                rat(1, 3),
            )],
        );
        let sys = GeneratorSystem::new(
            "pair",
            DomainKind::Interval01,
            vec![cube_root, square_map()],
            true,
        )
        .unwrap();
        let common = common_fixed_points(&sys, &pow2(-8)).unwrap();
        let certified: Vec<_> = common
            .iter()
            .filter(|(_, f)| *f == FixedPointFlag::Certified)
            .collect();
        assert!(certified.iter().any(|(e, _)| e.contains(&rat_i(0))));
        assert!(certified.iter().any(|(e, _)| e.contains(&rat_i(1))));
        assert!(!common.iter().any(|(e, _)| e.contains(&rat(1, 2))));
    }

    #[test]
    fn identity_only_system_has_interval_of_fixed_points() {
        let sys = GeneratorSystem::new(
            "id",
            DomainKind::Interval01,
            vec![crate::homeo::identity_map("id")],
            true,
        )
        .unwrap();
        let common = common_fixed_points(&sys, &pow2(-6)).unwrap();
        assert_eq!(common.len(), 1);
        assert_eq!(common[0].1, FixedPointFlag::IntervalOfFixedPoints);
    }
}
