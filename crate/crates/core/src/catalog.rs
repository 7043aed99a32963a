//! Ready-made generator systems for the standard constructions: dense
//! two-generator pairs, single-generator integer type, Cantor-preserving
//! families, nested integer-type towers to any level, parallel-orbit pairs,
//! the four-map transport semigroup, and a circle system with a swapped
//! finite orbit.
//!
//! Every system comes with its designated points and, where meaningful, the
//! ladder used for level estimation. Systems are built with exact rational
//! data; validation holds for all of them except the `--as-printed`
//! semigroup variants, which reproduce the unrepaired formulas for
//! comparison.

use crate::action::GeneratorSystem;
use crate::cantor::{
    build_f, build_g, left_endpoint, CantorError, CoordinateEvaluator, SplitHomeo,
    SplitHomeoSpec,
};
use crate::enclosure::Enclosure;
use crate::homeo::{DomainKind, MapError, MapRule, Piece, PieceKind, PiecewiseMap};
use crate::rational::{parse_rational, rat, rat_i, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown example name {0:?}")]
    UnknownName(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

impl From<CantorError> for CatalogError {
    fn from(e: CantorError) -> Self {
        CatalogError::Construction(e.to_string())
    }
}

impl From<crate::action::ActionError> for CatalogError {
    fn from(e: crate::action::ActionError) -> Self {
        CatalogError::Construction(e.to_string())
    }
}

/// Optional parameter overrides, keyed by name. Values are rational (or
/// integer) literals; flags use any nonzero value.
#[derive(Clone, Debug, Default)]
pub struct ExampleParams {
    pub values: BTreeMap<String, String>,
}

impl ExampleParams {
    pub fn set(mut self, key: &str, value: &str) -> Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    fn get_usize(&self, key: &str, default: usize) -> Result<usize, CatalogError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CatalogError::BadParams(format!("{key} = {v:?}"))),
        }
    }

    fn get_flag(&self, key: &str) -> bool {
        self.values
            .get(key)
            .map(|v| v != "0" && !v.is_empty())
            .unwrap_or(false)
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), CatalogError> {
        for k in self.values.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(CatalogError::BadParams(format!("unknown parameter {k}")));
            }
        }
        Ok(())
    }
}

/// Catalog keys, in presentation order.
pub const EXAMPLE_NAMES: &[&str] = &[
    "case1-dense",
    "case2-single",
    "cantor-ex1",
    "cantor-ex2",
    "level2-integer",
    "level2-dense",
    "level2-cantor",
    "level-n",
    "parallel-pair",
    "semigroup",
    "circle-swap",
];

/// Builds a catalog system by name.
pub fn build_example(
    name: &str,
    params: &ExampleParams,
) -> Result<GeneratorSystem, CatalogError> {
    match name {
        "case1-dense" => {
            params.reject_unknown(&[])?;
            let f = PiecewiseMap::new(
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
            let g = square_map("g");
            Ok(GeneratorSystem::new(name, DomainKind::Interval01, vec![f, g], true)?
                .with_designated("x0", rat(1, 2))
                .with_ladder(&["x0"]))
        }
        "case2-single" => {
            params.reject_unknown(&[])?;
            let g = square_map("g");
            Ok(GeneratorSystem::new(name, DomainKind::Interval01, vec![g], true)?
                .with_designated("x0", rat(1, 2))
                .with_ladder(&["x0"]))
        }
        "cantor-ex1" => {
            params.reject_unknown(&["n"])?;
            let n = params.get_usize("n", 6)?;
            if n == 0 || n > 64 {
                return Err(CatalogError::BadParams(format!(
                    "n = {n} out of range 1..=64"
                )));
            }
            let mut gens = Vec::with_capacity(n);
            for k in 0..n {
                let spec = SplitHomeoSpec {
                    source: (rat_i(0), rat_i(1)),
                    target: (rat_i(0), rat_i(1)),
                    pins: vec![(
                        left_endpoint(k as u64 + 1),
                        left_endpoint(k as u64 + 2),
                    )],
                };
                let h = Arc::new(SplitHomeo::build(spec)?);
                gens.push(PiecewiseMap::new(
                    format!("f{k}"),
                    DomainKind::Interval01,
                    vec![Piece {
                        lo: Some(rat_i(0)),
                        hi: Some(rat_i(1)),
                        kind: PieceKind::CantorSplit(h),
                    }],
                ));
            }
            Ok(GeneratorSystem::new(name, DomainKind::Interval01, gens, true)?
                .with_designated("x0", rat(1, 3)))
        }
        "cantor-ex2" => {
            params.reject_unknown(&[])?;
            Ok(GeneratorSystem::new(
                name,
                DomainKind::Interval01,
                vec![build_g(), build_f()],
                true,
            )?
            .with_designated("x0", rat(1, 4))
            .with_ladder(&["x0"])
            .with_word_evaluator(Arc::new(CoordinateEvaluator)))
        }
        "level2-integer" => {
            params.reject_unknown(&[])?;
            let g = base_map("g", &rat_i(0), &rat_i(1));
            let f_rule = LevelMap::tower(
                Arc::new(LevelMap::base(rat_i(0), rat_i(1))),
                rat(1, 2),
            );
            let x0 = rat(7, 12);
            let f = rule_map("f", f_rule);
            Ok(GeneratorSystem::new(name, DomainKind::Interval01, vec![g, f], true)?
                .with_designated("z0", rat(1, 2))
                .with_designated("x0", x0)
                .with_ladder(&["z0", "x0"]))
        }
        "level2-dense" => {
            params.reject_unknown(&[])?;
            let g = base_map("g", &rat_i(0), &rat_i(1));
            let f = rule_map(
                "f",
                Arc::new(DenseCascade::new()) as Arc<dyn MapRule>,
            );
            Ok(GeneratorSystem::new(name, DomainKind::Interval01, vec![g, f], true)?
                .with_designated("z0", rat(1, 2))
                .with_designated("x0", rat(7, 12))
                .with_ladder(&["z0", "x0"]))
        }
        "level2-cantor" => {
            params.reject_unknown(&[])?;
            let g = PiecewiseMap::new_periodic(
                "g",
                vec![Piece {
                    lo: None,
                    hi: None,
                    kind: PieceKind::Affine {
                        slope: rat_i(1),
                        offset: rat_i(1),
                    },
                }],
                rat_i(1),
            );
            let f = PiecewiseMap::new(
                "f",
                DomainKind::Line,
                vec![Piece {
                    lo: None,
                    hi: None,
                    kind: PieceKind::Rule(Arc::new(LineCascade::new())),
                }],
            );
            Ok(GeneratorSystem::new(name, DomainKind::Line, vec![g, f], true)?
                .with_designated("z0", rat_i(0))
                .with_designated("x0", rat(1, 3)))
        }
        "level-n" => {
            params.reject_unknown(&["n"])?;
            let n = params.get_usize("n", 3)?;
            if n == 0 || n > 5 {
                return Err(CatalogError::BadParams(format!(
                    "n = {n} out of supported range 1..=5"
                )));
            }
            let (gens, anchors) = nested_tower_family(n);
            let mut sys = GeneratorSystem::new(name, DomainKind::Interval01, gens, true)?;
            let mut ladder_names: Vec<String> = Vec::new();
            for (k, z) in anchors.iter().enumerate() {
                let label = format!("z{}", "0".repeat(k + 1));
                sys = sys.with_designated(&label, z.clone());
                ladder_names.push(label);
            }
            let refs: Vec<&str> = ladder_names.iter().map(|s| s.as_str()).collect();
            Ok(sys.with_ladder(&refs))
        }
        "parallel-pair" => {
            params.reject_unknown(&[])?;
            let g = base_map("g", &rat_i(0), &rat_i(1));
            let marker = rat(7, 12);
            let f = rule_map(
                "f",
                Arc::new(ParallelMarker {
                    marker: marker.clone(),
                }) as Arc<dyn MapRule>,
            );
            Ok(GeneratorSystem::new(name, DomainKind::Interval01, vec![g, f], true)?
                .with_designated("z0", rat(1, 2))
                .with_designated("marker", marker)
                .with_designated("probe", rat(13, 24))
                .with_ladder(&["z0"]))
        }
        "semigroup" => {
            params.reject_unknown(&["as-printed"])?;
            let printed = params.get_flag("as-printed");
            let gens = semigroup_maps(printed);
            let mut sys =
                GeneratorSystem::new(name, DomainKind::Interval01, gens, false)?
                    .with_designated("x1", rat(1, 8))
                    .with_designated("a0", rat(1, 4))
                    .with_designated("a1", rat(3, 8))
                    .with_designated("a2", rat(1, 2))
                    .with_designated("a3", rat(5, 8))
                    .with_designated("x2", rat(3, 4))
                    .with_designated("mid", rat(7, 16));
            if printed {
                sys = sys.with_note("as-printed: unrepaired transport and squeeze maps");
            } else {
                sys = sys
                    .with_note("h2 first piece replaced by (a1/a0)x so h2(0) = 0")
                    .with_note(
                        "g third piece replaced by the affine map sending [a2, x2] onto \
                         [a1, x2] to restore continuity at a2",
                    )
                    .with_note(
                        "g fourth piece replaced by \
                         (1-x2)*((x-x2)/(1-x2))^(1/3) + x2 so x2 is fixed",
                    );
            }
            Ok(sys)
        }
        "circle-swap" => {
            params.reject_unknown(&[])?;
            let rot = PiecewiseMap::new(
                "rot",
                DomainKind::Circle,
                vec![Piece::affine(rat_i(0), rat_i(1), rat_i(1), rat(1, 2))],
            );
            let s = PiecewiseMap::new(
                "s",
                DomainKind::Circle,
                vec![
                    Piece::affine(rat_i(0), rat(1, 6), rat_i(2), rat_i(0)),
                    Piece::affine(rat(1, 6), rat(1, 2), rat(1, 2), rat(1, 4)),
                    Piece::affine(rat(1, 2), rat(2, 3), rat_i(2), rat(-1, 2)),
                    Piece::affine(rat(2, 3), rat_i(1), rat(1, 2), rat(1, 2)),
                ],
            );
            Ok(GeneratorSystem::new(name, DomainKind::Circle, vec![rot, s], true)?
                .with_finite_orbit_points(vec![rat_i(0), rat(1, 2)])
                .with_designated("x0", rat(1, 8)))
        }
        other => Err(CatalogError::UnknownName(other.to_string())),
    }
}

/// `x -> x^2` on the unit interval.
fn square_map(name: &str) -> PiecewiseMap {
    PiecewiseMap::new(
        name,
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

/// The two-piece affine base map conjugated onto `[lo, hi]`: doubling on
/// the first quarter, then slope 2/3 to the top; strictly above the
/// diagonal inside.
fn base_pieces(lo: &Rational, hi: &Rational) -> Vec<Piece> {
    let w = hi - lo;
    let knee = lo + &w / rat_i(4);
    vec![
        Piece::affine(lo.clone(), knee.clone(), rat_i(2), -lo.clone()),
        Piece::affine(knee, hi.clone(), rat(2, 3), hi / rat_i(3)),
    ]
}

fn base_map(name: &str, lo: &Rational, hi: &Rational) -> PiecewiseMap {
    PiecewiseMap::new(name, DomainKind::Interval01, base_pieces(lo, hi))
}

fn rule_map(name: &str, rule: Arc<dyn MapRule>) -> PiecewiseMap {
    PiecewiseMap::new(
        name,
        DomainKind::Interval01,
        vec![Piece {
            lo: Some(rat_i(0)),
            hi: Some(rat_i(1)),
            kind: PieceKind::Rule(rule),
        }],
    )
}

/// Exact evaluator for maps built from the affine base map by repeated
/// conjugation: either the base map on a carrier interval, or a tower that
/// acts like its seed on the fundamental interval of `outer` and is
/// extended by `outer`-conjugation everywhere else.
pub(crate) enum LevelMap {
    Base {
        lo: Rational,
        hi: Rational,
        pieces: Vec<Piece>,
    },
    Tower {
        outer: Arc<LevelMap>,
        anchor: Rational,
        seed: Arc<LevelMap>,
    },
}

impl LevelMap {
    fn base(lo: Rational, hi: Rational) -> LevelMap {
        LevelMap::Base {
            pieces: base_pieces(&lo, &hi),
            lo,
            hi,
        }
    }

    /// Tower over `outer` whose seed is the base map on the fundamental
    /// interval `[anchor, outer(anchor)]`.
    fn tower(outer: Arc<LevelMap>, anchor: Rational) -> Arc<dyn MapRule> {
        let z1 = outer.eval(&anchor);
        Arc::new(TowerRule(LevelMap::Tower {
            seed: Arc::new(LevelMap::base(anchor.clone(), z1)),
            outer,
            anchor,
        }))
    }

    fn carrier(&self) -> (Rational, Rational) {
        match self {
            LevelMap::Base { lo, hi, .. } => (lo.clone(), hi.clone()),
            LevelMap::Tower { outer, .. } => outer.carrier(),
        }
    }

    /// Certified fixed points down to `resolution`, plus possible-cells
    /// where the fixed set accumulates at the carrier edges. Base maps fix
    /// exactly their carrier endpoints; a tower fixes the conjugates of its
    /// seed's fixed set on every fundamental-interval translate.
    fn fixed_points(
        &self,
        resolution: &Rational,
    ) -> Vec<(Enclosure, crate::homeo::FixedPointFlag)> {
        use crate::homeo::FixedPointFlag::{Certified, Possible};
        let (lo, hi) = self.carrier();
        match self {
            LevelMap::Base { .. } => vec![
                (Enclosure::exact(lo), Certified),
                (Enclosure::exact(hi), Certified),
            ],
            LevelMap::Tower { outer, seed, .. } => {
                let mut out = vec![
                    (Enclosure::exact(lo.clone()), Certified),
                    (Enclosure::exact(hi.clone()), Certified),
                ];
                let (s_lo, s_hi) = seed.carrier();
                let pattern: Vec<(Enclosure, crate::homeo::FixedPointFlag)> = seed
                    .fixed_points(resolution)
                    .into_iter()
                    .filter(|(e, _)| e.as_exact() != Some(&s_hi))
                    .collect();
                // Walk the fundamental interval and its translates in both
                // directions until they shrink below the resolution, then
                // cover the remaining tail with a possible-cell.
                for dir in [1i64, -1] {
                    let step = |x: &Rational| {
                        if dir > 0 {
                            outer.eval(x)
                        } else {
                            outer.invert(x)
                        }
                    };
                    let mut a = s_lo.clone();
                    let mut b = s_hi.clone();
                    let mut pts = pattern.clone();
                    if dir < 0 {
                        // The fundamental translate itself is emitted by
                        // the forward pass.
                        a = step(&a);
                        b = step(&b);
                        pts = pts
                            .iter()
                            .map(|(e, f)| {
                                (Enclosure::new(step(e.lo()), step(e.hi())), *f)
                            })
                            .collect();
                    }
                    loop {
                        if &b - &a < *resolution {
                            let cell = if dir > 0 {
                                Enclosure::new(a.clone(), hi.clone())
                            } else {
                                Enclosure::new(lo.clone(), b.clone())
                            };
                            out.push((cell, Possible));
                            break;
                        }
                        out.extend(pts.iter().cloned());
                        a = step(&a);
                        b = step(&b);
                        pts = pts
                            .iter()
                            .map(|(e, f)| {
                                (Enclosure::new(step(e.lo()), step(e.hi())), *f)
                            })
                            .collect();
                        if (dir > 0 && a >= hi) || (dir < 0 && b <= lo) {
                            break;
                        }
                    }
                }
                out.sort_by(|x, y| x.0.lo().cmp(y.0.lo()));
                out.dedup_by(|x, y| x.0 == y.0);
                out
            }
        }
    }

    fn eval(&self, x: &Rational) -> Rational {
        match self {
            LevelMap::Base { lo, hi, pieces } => {
                if x <= lo {
                    return lo.clone();
                }
                if x >= hi {
                    return hi.clone();
                }
                for p in pieces {
                    if p.contains(x) {
                        return p.eval_exact(x).expect("affine piece");
                    }
                }
                unreachable!("pieces tile the carrier")
            }
            LevelMap::Tower {
                outer,
                anchor,
                seed,
            } => {
                let (lo, hi) = outer.carrier();
                if x <= &lo {
                    return lo;
                }
                if x >= &hi {
                    return hi;
                }
                // Pull x back into the fundamental interval, apply the
                // seed, and push back out.
                let mut shift = 0i64;
                let mut u = x.clone();
                let z1 = outer.eval(anchor);
                while u < *anchor {
                    u = outer.eval(&u);
                    shift -= 1;
                }
                while u >= z1 {
                    u = outer.invert(&u);
                    shift += 1;
                }
                let mut v = seed.eval(&u);
                for _ in 0..shift.unsigned_abs() {
                    v = if shift > 0 {
                        outer.eval(&v)
                    } else {
                        outer.invert(&v)
                    };
                }
                v
            }
        }
    }

    fn invert(&self, y: &Rational) -> Rational {
        match self {
            LevelMap::Base { lo, hi, pieces } => {
                if y <= lo {
                    return lo.clone();
                }
                if y >= hi {
                    return hi.clone();
                }
                for p in pieces {
                    let a = p.eval_exact(p.lo.as_ref().unwrap()).expect("affine");
                    let b = p.eval_exact(p.hi.as_ref().unwrap()).expect("affine");
                    if &a <= y && y <= &b {
                        return p
                            .invert(y, &crate::rational::pow2(-30))
                            .expect("affine invert")
                            .as_exact()
                            .expect("exact")
                            .clone();
                    }
                }
                unreachable!("images tile the carrier")
            }
            LevelMap::Tower {
                outer,
                anchor,
                seed,
            } => {
                let (lo, hi) = outer.carrier();
                if y <= &lo {
                    return lo;
                }
                if y >= &hi {
                    return hi;
                }
                let mut shift = 0i64;
                let mut u = y.clone();
                let z1 = outer.eval(anchor);
                while u < *anchor {
                    u = outer.eval(&u);
                    shift -= 1;
                }
                while u >= z1 {
                    u = outer.invert(&u);
                    shift += 1;
                }
                let mut v = seed.invert(&u);
                for _ in 0..shift.unsigned_abs() {
                    v = if shift > 0 {
                        outer.eval(&v)
                    } else {
                        outer.invert(&v)
                    };
                }
                v
            }
        }
    }
}

/// MapRule adapter for [`LevelMap`] towers.
pub(crate) struct TowerRule(LevelMap);

impl MapRule for TowerRule {
    fn describe(&self) -> String {
        "conjugation tower over the base map".into()
    }

    fn eval(&self, x: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        Ok(Enclosure::exact(self.0.eval(x)))
    }

    fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        Some(self.0.eval(x))
    }

    fn invert(&self, y: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        Ok(Enclosure::exact(self.0.invert(y)))
    }

    fn fixed_points(
        &self,
        resolution: &Rational,
    ) -> Option<Vec<(Enclosure, crate::homeo::FixedPointFlag)>> {
        Some(self.0.fixed_points(resolution))
    }

    fn sample_breakpoints(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        // Fundamental-interval endpoints a few steps out.
        let LevelMap::Tower { outer, anchor, .. } = &self.0 else {
            return Vec::new();
        };
        let mut pts = Vec::new();
        let mut fwd = anchor.clone();
        let mut bwd = anchor.clone();
        for _ in 0..6 {
            if &fwd > lo && &fwd < hi {
                pts.push(fwd.clone());
            }
            if &bwd > lo && &bwd < hi {
                pts.push(bwd.clone());
            }
            fwd = outer.eval(&fwd);
            bwd = outer.invert(&bwd);
        }
        pts
    }
}

/// The generators of the depth-`n` nested tower family, plus the anchor
/// points (expected levels 1..=n).
fn nested_tower_family(n: usize) -> (Vec<PiecewiseMap>, Vec<Rational>) {
    let mut gens = Vec::with_capacity(n);
    let mut anchors = Vec::with_capacity(n);
    // Chain of carriers: [0,1], then each fundamental interval of the
    // previous base map at its midpoint-parameter anchor.
    let mut carrier = (rat_i(0), rat_i(1));
    let mut inner_maps: Vec<Arc<LevelMap>> = Vec::new();
    for _k in 0..n {
        let base = Arc::new(LevelMap::base(carrier.0.clone(), carrier.1.clone()));
        let anchor = (&carrier.0 + &carrier.1) / rat_i(2);
        anchors.push(anchor.clone());
        inner_maps.push(base.clone());
        let next_hi = base.eval(&anchor);
        carrier = (anchor, next_hi);
    }
    for k in 0..n {
        if k == 0 {
            gens.push(base_map("f1", &rat_i(0), &rat_i(1)));
            continue;
        }
        // f_{k+1}: seed chain from level k down to level 1.
        let mut rule = LevelMap::Base {
            lo: inner_maps[k].carrier().0,
            hi: inner_maps[k].carrier().1,
            pieces: match &*inner_maps[k] {
                LevelMap::Base { pieces, .. } => pieces.clone(),
                _ => unreachable!(),
            },
        };
        for j in (0..k).rev() {
            rule = LevelMap::Tower {
                outer: inner_maps[j].clone(),
                anchor: anchors[j].clone(),
                seed: Arc::new(rule),
            };
        }
        gens.push(rule_map(&format!("f{}", k + 1), Arc::new(TowerRule(rule))));
    }
    (gens, anchors)
}

/// The dense-cascade map: sends each fundamental-interval translate to the
/// next, choosing the single interior constraint point so that the dyadic
/// midpoints of the first interval land, in breadth-first order, on the
/// base-map orbit of the first midpoint.
struct DenseCascade {
    base: Vec<Piece>,
    z0: Rational,
    /// Materialized forward pieces: `(knee_source, knee_target)` per index.
    knees: Mutex<Vec<(Rational, Rational)>>,
}

impl DenseCascade {
    fn new() -> DenseCascade {
        DenseCascade {
            base: base_pieces(&rat_i(0), &rat_i(1)),
            z0: rat(1, 2),
            knees: Mutex::new(Vec::new()),
        }
    }

    fn base_eval(&self, x: &Rational) -> Rational {
        for p in &self.base {
            if p.contains(x) {
                return p.eval_exact(x).expect("affine");
            }
        }
        unreachable!("base tiles [0,1]")
    }

    fn base_invert(&self, y: &Rational) -> Rational {
        for p in &self.base {
            let a = p.eval_exact(p.lo.as_ref().unwrap()).unwrap();
            let b = p.eval_exact(p.hi.as_ref().unwrap()).unwrap();
            if &a <= y && y <= &b {
                return p
                    .invert(y, &crate::rational::pow2(-30))
                    .unwrap()
                    .as_exact()
                    .unwrap()
                    .clone();
            }
        }
        unreachable!("base images tile [0,1]")
    }

    /// `z_k` for any integer `k`.
    fn z(&self, k: i64) -> Rational {
        let mut v = self.z0.clone();
        for _ in 0..k.unsigned_abs() {
            v = if k > 0 {
                self.base_eval(&v)
            } else {
                self.base_invert(&v)
            };
        }
        v
    }

    /// Dyadic midpoints of `[z0, z1]` in breadth-first order.
    fn dense_point(&self, n: usize) -> Rational {
        let z1 = self.z(1);
        let w = &z1 - &self.z0;
        let level = usize::BITS - (n + 1).leading_zeros() - 1;
        let idx = (n + 1) - (1 << level);
        &self.z0 + w * rat(2 * idx as i64 + 1, 1 << (level + 1))
    }

    /// Ensures knees `0..=k` are materialized.
    fn materialize(&self, k: usize) {
        let mut knees = self.knees.lock().unwrap();
        while knees.len() <= k {
            let n = knees.len();
            // Constraint source: the (n+1)-th dense point pushed through
            // the pieces already defined; target: the base orbit of the
            // first dense point.
            let mut c = self.dense_point(n + 1);
            for j in 0..n {
                c = self.piece_eval_with(&knees, j, &c);
            }
            let mut t = self.dense_point(0);
            for _ in 0..=n {
                t = self.base_eval(&t);
            }
            knees.push((c, t));
        }
    }

    /// Evaluates piece `j` (mapping interval `j` to `j + 1`) with the knee
    /// table supplied.
    fn piece_eval_with(
        &self,
        knees: &[(Rational, Rational)],
        j: usize,
        x: &Rational,
    ) -> Rational {
        let (c, t) = &knees[j];
        let (zj, zj1, zj2) = (self.z(j as i64), self.z(j as i64 + 1), self.z(j as i64 + 2));
        if x <= c {
            &zj1 + (x - &zj) * (t - &zj1) / (c - &zj)
        } else {
            t + (x - c) * (&zj2 - t) / (&zj1 - c)
        }
    }

    fn interval_index(&self, x: &Rational) -> i64 {
        let mut k = 0i64;
        let mut u = x.clone();
        while u < self.z0 {
            u = self.base_eval(&u);
            k -= 1;
        }
        loop {
            let z1 = self.z(1);
            if u < z1 {
                break;
            }
            u = self.base_invert(&u);
            k += 1;
        }
        k
    }
}

impl MapRule for DenseCascade {
    fn describe(&self) -> String {
        "dense cascade over the base map".into()
    }

    fn eval(&self, x: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        Ok(Enclosure::exact(self.eval_exact(x).expect("total map")))
    }

    fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        if x.is_zero() || x.is_one() {
            return Some(x.clone());
        }
        if !x.is_positive() || *x > Rational::one() {
            return None;
        }
        let k = self.interval_index(x);
        if k < 0 {
            // Below the anchor: act as the base map.
            return Some(self.base_eval(x));
        }
        self.materialize(k as usize);
        let knees = self.knees.lock().unwrap();
        Some(self.piece_eval_with(&knees, k as usize, x))
    }

    fn invert(&self, y: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        if y.is_zero() || y.is_one() {
            return Ok(Enclosure::exact(y.clone()));
        }
        let m = self.interval_index(y);
        if m <= 0 {
            return Ok(Enclosure::exact(self.base_invert(y)));
        }
        let j = (m - 1) as usize;
        self.materialize(j);
        let knees = self.knees.lock().unwrap();
        let (c, t) = &knees[j];
        let (zj, zj1, zj2) = (self.z(m - 1), self.z(m), self.z(m + 1));
        let x = if y <= t {
            &zj + (y - &zj1) * (c - &zj) / (t - &zj1)
        } else {
            c + (y - t) * (&zj1 - c) / (&zj2 - t)
        };
        Ok(Enclosure::exact(x))
    }

    fn sample_breakpoints(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        (-4i64..=4)
            .map(|k| self.z(k))
            .filter(|z| z > lo && z < hi)
            .collect()
    }
}

/// The parallel-marker map: equal to the base map below the marker orbit in
/// each fundamental-interval translate, affine above it.
struct ParallelMarker {
    marker: Rational,
}

impl ParallelMarker {
    fn base(&self) -> DenseCascade {
        DenseCascade::new()
    }
}

impl MapRule for ParallelMarker {
    fn describe(&self) -> String {
        "base map below the marker orbit, affine above".into()
    }

    fn eval(&self, x: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        Ok(Enclosure::exact(self.eval_exact(x).expect("total map")))
    }

    fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        if x.is_zero() || x.is_one() {
            return Some(x.clone());
        }
        if !x.is_positive() || *x > Rational::one() {
            return None;
        }
        let helper = self.base();
        let k = helper.interval_index(x);
        let m_k = {
            let mut v = self.marker.clone();
            for _ in 0..k.unsigned_abs() {
                v = if k > 0 {
                    helper.base_eval(&v)
                } else {
                    helper.base_invert(&v)
                };
            }
            v
        };
        if *x <= m_k {
            return Some(helper.base_eval(x));
        }
        // Two-piece map from (m_k, z_{k+1}) onto (m_{k+1}, z_{k+2}) with a
        // knee: the source midpoint goes to the target quarter point, which
        // keeps it genuinely different from the base map above the marker.
        let zk1 = helper.z(k + 1);
        let zk2 = helper.z(k + 2);
        let mk1 = helper.base_eval(&m_k);
        let knee_src = (&m_k + &zk1) / rat_i(2);
        let knee_tgt = &mk1 + (&zk2 - &mk1) / rat_i(4);
        Some(if *x <= knee_src {
            &mk1 + (x - &m_k) * (&knee_tgt - &mk1) / (&knee_src - &m_k)
        } else {
            &knee_tgt + (x - &knee_src) * (&zk2 - &knee_tgt) / (&zk1 - &knee_src)
        })
    }

    fn invert(&self, y: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        if y.is_zero() || y.is_one() {
            return Ok(Enclosure::exact(y.clone()));
        }
        let helper = self.base();
        let m = helper.interval_index(y);
        let k = m - 1;
        let m_k = {
            let mut v = self.marker.clone();
            for _ in 0..k.unsigned_abs() {
                v = if k > 0 {
                    helper.base_eval(&v)
                } else {
                    helper.base_invert(&v)
                };
            }
            v
        };
        let mk1 = helper.base_eval(&m_k);
        if *y <= mk1 {
            return Ok(Enclosure::exact(helper.base_invert(y)));
        }
        let zk1 = helper.z(k + 1);
        let zk2 = helper.z(k + 2);
        let knee_src = (&m_k + &zk1) / rat_i(2);
        let knee_tgt = &mk1 + (&zk2 - &mk1) / rat_i(4);
        let x = if *y <= knee_tgt {
            &m_k + (y - &mk1) * (&knee_src - &m_k) / (&knee_tgt - &mk1)
        } else {
            &knee_src + (y - &knee_tgt) * (&zk1 - &knee_src) / (&zk2 - &knee_tgt)
        };
        Ok(Enclosure::exact(x))
    }

    fn sample_breakpoints(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        let helper = self.base();
        let mut pts: Vec<Rational> =
            (-4i64..=4).map(|k| helper.z(k)).collect();
        let mut m = self.marker.clone();
        for _ in 0..4 {
            pts.push(m.clone());
            m = helper.base_eval(&m);
        }
        pts.retain(|p| p > lo && p < hi);
        pts
    }
}

/// The translation-driven Cantor cascade on the line: each unit interval
/// carries a scaled middle-thirds set, and the `n`-th piece is the split
/// homeomorphism pinned so that the enumerated left endpoints of the first
/// set successively land on the translation orbit of the first one.
struct LineCascade {
    /// Materialized pieces for `n >= 0` along with the pinned source point.
    pieces: Mutex<Vec<Arc<SplitHomeo>>>,
}

impl LineCascade {
    fn new() -> LineCascade {
        LineCascade {
            pieces: Mutex::new(Vec::new()),
        }
    }

    fn x_point(&self, n: u64) -> Rational {
        left_endpoint(n + 1).value()
    }

    fn materialize(&self, n: usize) {
        let mut pieces = self.pieces.lock().unwrap();
        while pieces.len() <= n {
            let k = pieces.len();
            // Pin: the image of x_{k+1} under the pieces built so far maps
            // to x_0 + (k + 1).
            let mut v = self.x_point(k as u64 + 1);
            for p in pieces.iter().take(k) {
                v = p.eval_exact(&v).expect("in carrier");
            }
            let rel = &v - rat_i(k as i64);
            let src_addr = match crate::cantor::membership(&rel).expect("in unit interval") {
                crate::cantor::Membership::InC(a) => a,
                other => unreachable!("pinned point left the set: {other:?}"),
            };
            debug_assert!(src_addr.is_gap_left_endpoint());
            let spec = SplitHomeoSpec {
                source: (rat_i(k as i64), rat_i(k as i64 + 1)),
                target: (rat_i(k as i64 + 1), rat_i(k as i64 + 2)),
                pins: vec![(src_addr, left_endpoint(1))],
            };
            pieces.push(Arc::new(SplitHomeo::build(spec).expect("single pin")));
        }
    }
}

impl MapRule for LineCascade {
    fn describe(&self) -> String {
        "line cascade of pinned split homeomorphisms".into()
    }

    fn eval(&self, x: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        let n = x.floor().to_integer();
        let n: i64 = (&n).try_into().map_err(|_| MapError::OutOfDomain(x.clone()))?;
        if n < 0 {
            // Translation on the negative side.
            return Ok(Enclosure::exact(x + rat_i(1)));
        }
        self.materialize(n as usize);
        let pieces = self.pieces.lock().unwrap();
        Ok(Enclosure::exact(
            pieces[n as usize].eval_exact(x)?,
        ))
    }

    fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        self.eval(x, &rat_i(1)).ok()?.as_exact().cloned()
    }

    fn invert(&self, y: &Rational, _prec: &Rational) -> Result<Enclosure, MapError> {
        let m = y.floor().to_integer();
        let m: i64 = (&m).try_into().map_err(|_| MapError::NotInImage(y.clone()))?;
        if m <= 0 {
            return Ok(Enclosure::exact(y - rat_i(1)));
        }
        let j = (m - 1) as usize;
        self.materialize(j);
        let pieces = self.pieces.lock().unwrap();
        Ok(Enclosure::exact(pieces[j].invert_exact(y)?))
    }

    fn sample_breakpoints(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        let mut pts = Vec::new();
        let mut k = lo.ceil().to_integer();
        while Rational::from_integer(k.clone()) < *hi {
            pts.push(Rational::from_integer(k.clone()));
            k += 1;
        }
        pts
    }
}

/// The four semigroup maps, repaired (default) or exactly as printed.
fn semigroup_maps(printed: bool) -> Vec<PiecewiseMap> {
    let (x1, a0, a1, a2, a3, x2, r) = (
        rat(1, 8),
        rat(1, 4),
        rat(3, 8),
        rat(1, 2),
        rat(5, 8),
        rat(3, 4),
        rat(1, 8),
    );
    // f: squeeze fixing x1, carrying [a1, a2] to [a2, a3] as a cube root.
    let f = PiecewiseMap::new(
        "f",
        DomainKind::Interval01,
        vec![
            // x1 * (x/x1)^2 = 8 x^2
            Piece::power_scaled(
                rat_i(0),
                x1.clone(),
                x1.clone(),
                x1.recip(),
                rat_i(0),
                rat_i(0),
                rat_i(2),
            ),
            // ((a2 - x1)/(a1 - x1)) (x - x1) + x1
            Piece::affine(x1.clone(), a1.clone(), rat(3, 2), rat(-1, 16)),
            // r ((x - a1)/r)^(1/3) + a1 + r
            Piece::power_scaled(
                a1.clone(),
                a2.clone(),
                r.clone(),
                r.recip(),
                a1.clone(),
                &a1 + &r,
                rat(1, 3),
            ),
            // ((1 - a3)/(1 - a2)) (x - 1) + 1
            Piece::affine(a2.clone(), rat_i(1), rat(3, 4), rat(1, 4)),
        ],
    );
    // g: squeeze fixing x2, carrying [a1, a2] to [a0, a1] as a square.
    let g_third = if printed {
        // ((1 - x2 - a1)/(1 - a2)) (x - x2) + x2: negative slope for the
        // default points, discontinuous at a2.
        Piece::affine(a2.clone(), x2.clone(), rat(-1, 4), rat(15, 16))
    } else {
        // Affine [a2, x2] -> [a1, x2], continuous at a2 and fixing x2.
        Piece::affine(a2.clone(), x2.clone(), rat(3, 2), rat(-3, 8))
    };
    let g_fourth = if printed {
        // (1 - x2) (x/(1 - x2))^(1/3) + x2: does not fix x2.
        Piece::power_scaled(
            x2.clone(),
            rat_i(1),
            Rational::one() - &x2,
            (Rational::one() - &x2).recip(),
            rat_i(0),
            x2.clone(),
            rat(1, 3),
        )
    } else {
        // (1 - x2) ((x - x2)/(1 - x2))^(1/3) + x2
        Piece::power_scaled(
            x2.clone(),
            rat_i(1),
            Rational::one() - &x2,
            (Rational::one() - &x2).recip(),
            x2.clone(),
            x2.clone(),
            rat(1, 3),
        )
    };
    let g = PiecewiseMap::new(
        "g",
        DomainKind::Interval01,
        vec![
            // (a0/a1) x
            Piece::affine(rat_i(0), a1.clone(), rat(2, 3), rat_i(0)),
            // r ((x - a1)/r)^2 + a0
            Piece::power_scaled(
                a1.clone(),
                a2.clone(),
                r.clone(),
                r.recip(),
                a1.clone(),
                a0.clone(),
                rat_i(2),
            ),
            g_third,
            g_fourth,
        ],
    );
    // h1: translation of [a2, a3] one step left.
    let h1 = PiecewiseMap::new(
        "h1",
        DomainKind::Interval01,
        vec![
            // (a1/a2) (x - a2) + a1 = (3/4) x
            Piece::affine(rat_i(0), a2.clone(), rat(3, 4), rat_i(0)),
            Piece::affine(a2.clone(), a3.clone(), rat_i(1), -r.clone()),
            // ((1 - a2)/(1 - a3)) (x - a3) + a2 = (4/3) x - 1/3
            Piece::affine(a3.clone(), rat_i(1), rat(4, 3), rat(-1, 3)),
        ],
    );
    // h2: translation of [a0, a1] one step right.
    let h2_first = if printed {
        // ((a1 - a0)/a0) (x - a0) + a1: h2(0) = a0 > 0.
        Piece::affine(rat_i(0), a0.clone(), rat(1, 2), rat(1, 4))
    } else {
        // (a1/a0) x
        Piece::affine(rat_i(0), a0.clone(), rat(3, 2), rat_i(0))
    };
    let h2 = PiecewiseMap::new(
        "h2",
        DomainKind::Interval01,
        vec![
            h2_first,
            Piece::affine(a0.clone(), a1.clone(), rat_i(1), r.clone()),
            // ((1 - a2)/(1 - a1)) (x - a1) + a2 = (4/5) x + 1/5
            Piece::affine(a1.clone(), rat_i(1), rat(4, 5), rat(1, 5)),
        ],
    );
    vec![f, g, h1, h2]
}

/// Parses `key=value` pairs into [`ExampleParams`].
pub fn parse_params(pairs: &[String]) -> Result<ExampleParams, CatalogError> {
    let mut p = ExampleParams::default();
    for pair in pairs {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CatalogError::BadParams(format!("expected key=value, got {pair:?}")))?;
        // Validate rational-or-integer syntax for value-like params.
        if k != "as-printed" {
            parse_rational(v).map_err(CatalogError::BadParams)?;
        }
        p.values.insert(k.to_string(), v.to_string());
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{common_fixed_points, eval_word, orbit, OrbitBudget};
    use crate::homeo::parse_word;
    use crate::rational::pow2;

    fn build(name: &str) -> GeneratorSystem {
        build_example(name, &ExampleParams::default()).unwrap()
    }

    #[test]
    fn every_catalog_system_validates() {
        for name in EXAMPLE_NAMES {
            let sys = build(name);
            for report in sys.validate_all() {
                assert!(
                    report.usable(),
                    "{name}/{} failed validation: {:?}",
                    report.map_name,
                    report.errors
                );
            }
        }
    }

    #[test]
    fn unknown_name_and_bad_params_rejected() {
        assert!(matches!(
            build_example("no-such", &ExampleParams::default()),
            Err(CatalogError::UnknownName(_))
        ));
        let p = ExampleParams::default().set("n", "99");
        assert!(matches!(
            build_example("level-n", &p),
            Err(CatalogError::BadParams(_))
        ));
        let p = ExampleParams::default().set("bogus", "1");
        assert!(matches!(
            build_example("case1-dense", &p),
            Err(CatalogError::BadParams(_))
        ));
    }

    #[test]
    fn case2_fixed_points() {
        let sys = build("case2-single");
        assert_eq!(sys.generators().len(), 1);
        let common = common_fixed_points(&sys, &pow2(-8)).unwrap();
        assert!(common.iter().any(|(e, _)| e.contains(&rat_i(0))));
        assert!(common.iter().any(|(e, _)| e.contains(&rat_i(1))));
        assert_eq!(common.len(), 2);
    }

    #[test]
    fn level2_base_orbit_points() {
        let sys = build("level2-integer");
        let g = sys.generator("g").unwrap();
        assert_eq!(g.eval_exact(&rat(1, 2)), Some(rat(2, 3)));
        assert_eq!(g.eval_exact(&rat(2, 3)), Some(rat(7, 9)));
    }

    #[test]
    fn level2_commutation_exact() {
        let sys = build("level2-integer");
        let g = sys.generator("g").unwrap();
        let f = sys.generator("f").unwrap();
        for i in 1..=200i64 {
            let x = rat(i, 201);
            let fg = f.eval_exact(&g.eval_exact(&x).unwrap()).unwrap();
            let gf = g.eval_exact(&f.eval_exact(&x).unwrap()).unwrap();
            assert_eq!(fg, gf, "commutation failed at {x}");
        }
    }

    #[test]
    fn level2_f_preserves_intervals() {
        let sys = build("level2-integer");
        let f = sys.generator("f").unwrap();
        // f fixes every z_k and has no other fixed points in (z0, z1).
        assert_eq!(f.eval_exact(&rat(1, 2)), Some(rat(1, 2)));
        assert_eq!(f.eval_exact(&rat(2, 3)), Some(rat(2, 3)));
        let x0 = rat(7, 12);
        let fx = f.eval_exact(&x0).unwrap();
        assert!(fx > x0 && fx < rat(2, 3));
    }

    #[test]
    fn dense_cascade_constraint_holds_exactly() {
        let sys = build("level2-dense");
        let f = sys.generator("f").unwrap();
        let g = sys.generator("g").unwrap();
        let cascade = DenseCascade::new();
        for n in 0..=8usize {
            // f_n ... f_0 applied to the dense point lands on the base
            // orbit of the first dense point.
            let mut v = cascade.dense_point(n + 1);
            for _ in 0..=n {
                v = f.eval_exact(&v).unwrap();
            }
            let mut t = cascade.dense_point(0);
            for _ in 0..=n {
                t = g.eval_exact(&t).unwrap();
            }
            assert_eq!(v, t, "cascade constraint failed at {n}");
        }
    }

    #[test]
    fn level_n_generators_commute() {
        let p = ExampleParams::default().set("n", "3");
        let sys = build_example("level-n", &p).unwrap();
        assert_eq!(sys.generators().len(), 3);
        for a in 0..3 {
            for b in (a + 1)..3 {
                let fa = &sys.generators()[a];
                let fb = &sys.generators()[b];
                for i in 1..=40i64 {
                    let x = rat(i, 41);
                    let ab = fa.eval_exact(&fb.eval_exact(&x).unwrap()).unwrap();
                    let ba = fb.eval_exact(&fa.eval_exact(&x).unwrap()).unwrap();
                    assert_eq!(ab, ba, "f{} f{} disagree at {x}", a + 1, b + 1);
                }
            }
        }
    }

    #[test]
    fn level_n_anchor_chain() {
        let p = ExampleParams::default().set("n", "4");
        let sys = build_example("level-n", &p).unwrap();
        assert_eq!(sys.ladder().len(), 4);
        let z0 = sys.designated_point("z0").unwrap();
        let z00 = sys.designated_point("z00").unwrap();
        assert_eq!(z0, &rat(1, 2));
        assert_eq!(z00, &rat(7, 12));
        // Each generator fixes the anchors above its own level.
        let f2 = sys.generator("f2").unwrap();
        assert_eq!(f2.eval_exact(z0), Some(z0.clone()));
        let f3 = sys.generator("f3").unwrap();
        assert_eq!(f3.eval_exact(z00), Some(z00.clone()));
    }

    #[test]
    fn cantor_ex1_orbit_reaches_enumerated_endpoints() {
        // Witness words: f0 f1 ... f_{k-2} sends the first endpoint to the
        // k-th, exactly.
        let sys = build("cantor-ex1");
        let x0 = rat(1, 3);
        let mut word = crate::homeo::MapWord::identity();
        for k in 2..=7u64 {
            word = word.then(&crate::homeo::MapWord::single(format!("f{}", k - 2), 1));
            let e = eval_word(&sys, &word, &x0, &pow2(-40)).unwrap();
            assert_eq!(e.as_exact(), Some(&left_endpoint(k).value()));
        }
        // A small family is fully covered by unassisted search.
        let p = ExampleParams::default().set("n", "3");
        let sys3 = build_example("cantor-ex1", &p).unwrap();
        let sample = orbit(&sys3, &x0, OrbitBudget::new(3, 2000), None, None).unwrap();
        for k in 1..=3u64 {
            assert!(
                sample.min_distance(&left_endpoint(k).value()).unwrap() <= pow2(-40),
                "left endpoint {k} not reached by search"
            );
        }
    }

    #[test]
    fn semigroup_repaired_maps_validate_and_commute() {
        let sys = build("semigroup");
        assert!(!sys.is_invertible());
        // Normalized cube action: f̂(25/64) = 7/16.
        let w = parse_word("f h1").unwrap();
        let e = eval_word(&sys, &w, &rat(25, 64), &pow2(-40)).unwrap();
        assert_eq!(e.as_exact(), Some(&rat(7, 16)));
        // f̂ and ĝ commute on the middle interval within 1e-12.
        let fg = parse_word("f h1 g h2").unwrap();
        let gf = parse_word("g h2 f h1").unwrap();
        let tol = crate::rational::pow_int(&rat(1, 10), 12);
        for i in 1..=50i64 {
            let x = rat(3, 8) + rat(i, 51) * rat(1, 8);
            let a = eval_word(&sys, &fg, &x, &(&tol / rat_i(4))).unwrap();
            let b = eval_word(&sys, &gf, &x, &(&tol / rat_i(4))).unwrap();
            assert!(
                a.gap_to(&b) <= tol,
                "commutation gap at {x}: {} vs {}",
                a,
                b
            );
        }
    }

    #[test]
    fn repaired_transport_map_inverts_exactly() {
        // (a1/a0) x inverted at 1/8 gives (a0/a1)(1/8) = 1/12.
        let sys = build("semigroup");
        let h2 = sys.generator("h2").unwrap();
        let e = h2.invert_point(&rat(1, 8), &pow2(-30)).unwrap();
        assert_eq!(e.as_exact(), Some(&rat(1, 12)));
    }

    #[test]
    fn tower_map_fixed_points_enclose_the_anchor_orbit() {
        use crate::homeo::FixedPointFlag;
        let sys = build("level2-integer");
        let f = sys.generator("f").unwrap();
        let fixed = f.fixed_point_enclosures(&pow2(-10)).unwrap();
        for target in [rat(1, 2), rat(2, 3)] {
            assert!(
                fixed
                    .iter()
                    .any(|(e, flag)| e.contains(&target)
                        && *flag == FixedPointFlag::Certified),
                "no certified enclosure at {target}"
            );
        }
    }

    #[test]
    fn base_map_self_composition() {
        let sys = build("level2-integer");
        let g = sys.generator("g").unwrap();
        let gg = g.compose_affine(g).unwrap();
        assert_eq!(gg.eval_exact(&rat(1, 2)), Some(rat(7, 9)));
        assert!(gg.pieces().len() >= 3);
        assert!(crate::homeo::validate_map(&gg).usable());
    }

    #[test]
    fn common_fixed_points_of_the_tower_system() {
        let sys = build("level2-integer");
        let common = common_fixed_points(&sys, &pow2(-8)).unwrap();
        // f fixes every anchor-orbit point, but only 0 and 1 are shared
        // with the base map.
        assert!(common.iter().any(|(e, _)| e.contains(&rat_i(0))));
        assert!(common.iter().any(|(e, _)| e.contains(&rat_i(1))));
        assert!(!common.iter().any(|(e, _)| e.contains(&rat(1, 2))));
    }

    #[test]
    fn semigroup_printed_variants_expose_defects() {
        let p = ExampleParams::default().set("as-printed", "1");
        let sys = build_example("semigroup", &p).unwrap();
        let reports = sys.validate_all();
        // h2 as printed: usable endomorphism, not surjective.
        let h2 = reports.iter().find(|r| r.map_name == "h2").unwrap();
        assert!(h2.usable());
        assert!(!h2.surjective);
        let h2_map = sys.generator("h2").unwrap();
        assert_eq!(h2_map.eval_exact(&rat_i(0)), Some(rat(1, 4)));
        // g as printed: fails validation (decreasing third piece,
        // discontinuity at the junction).
        let g = reports.iter().find(|r| r.map_name == "g").unwrap();
        assert!(!g.usable());
    }

    #[test]
    fn printed_endomorphism_rejects_points_outside_its_image() {
        use crate::homeo::MapError;
        let p = ExampleParams::default().set("as-printed", "1");
        let sys = build_example("semigroup", &p).unwrap();
        let h2 = sys.generator("h2").unwrap();
        // The printed first piece starts at h2(0) = 1/4, so 1/8 has no
        // preimage.
        assert!(matches!(
            h2.invert_point(&rat(1, 8), &pow2(-20)),
            Err(MapError::NotInImage(_))
        ));
    }

    #[test]
    fn parallel_marker_agrees_with_base_below_marker() {
        let sys = build("parallel-pair");
        let f = sys.generator("f").unwrap();
        let g = sys.generator("g").unwrap();
        let probe = sys.designated_point("probe").unwrap().clone();
        assert_eq!(f.eval_exact(&probe), g.eval_exact(&probe));
        // Above the marker the maps differ.
        let above = rat(5, 8);
        assert_ne!(f.eval_exact(&above), g.eval_exact(&above));
    }

    #[test]
    fn line_cascade_constraint() {
        let sys = build("level2-cantor");
        let f = sys.generator("f").unwrap();
        let g = sys.generator("g").unwrap();
        let x0 = rat(1, 3);
        for n in 0..=5usize {
            let xn1 = left_endpoint(n as u64 + 2).value();
            let mut v = xn1;
            for _ in 0..=n {
                v = f.eval_exact(&v).unwrap();
            }
            let mut t = x0.clone();
            for _ in 0..=n {
                t = g.eval_exact(&t).unwrap();
            }
            assert_eq!(v, t, "line cascade constraint failed at {n}");
        }
        // The union of sets is preserved: left endpoints map to set points.
        for k in 1..=10u64 {
            let e = left_endpoint(k).value();
            let img = f.eval_exact(&e).unwrap();
            let rel = &img - img.floor();
            assert!(matches!(
                crate::cantor::membership(&rel).unwrap(),
                crate::cantor::Membership::InC(_)
            ));
        }
    }

    #[test]
    fn params_parse_and_reject() {
        let p = parse_params(&["n=4".to_string()]).unwrap();
        assert_eq!(p.get_usize("n", 3).unwrap(), 4);
        assert!(parse_params(&["n".to_string()]).is_err());
        assert!(parse_params(&["n=x".to_string()]).is_err());
    }
}
