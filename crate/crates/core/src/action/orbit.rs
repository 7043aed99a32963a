//! Deterministic orbit enumeration.
//!
//! Breadth-first search over freely reduced words, collapsing points that
//! agree to within the deduplication tolerance. Each stored point carries a
//! witness word re-evaluable at the base. The frontier is the stored point
//! set itself, so abelian-like collapses cost nothing: a value reached by
//! many words is explored once, under its first (shortest, earliest) word.

use super::system::{default_dedup_tol, default_eval_prec, GeneratorSystem};
use super::ActionError;
use crate::enclosure::Enclosure;
use crate::homeo::{MapError, MapWord};
use crate::rational::Rational;
use num_traits::Signed;
use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::ops::Bound;

/// Exploration limits: word length (BFS depth) and stored point count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitBudget {
    pub max_word_len: u64,
    pub max_points: usize,
}

impl OrbitBudget {
    pub fn new(max_word_len: u64, max_points: usize) -> OrbitBudget {
        OrbitBudget {
            max_word_len,
            max_points,
        }
    }

    pub fn doubled(&self) -> OrbitBudget {
        OrbitBudget {
            max_word_len: self.max_word_len + 2,
            max_points: self.max_points.saturating_mul(2),
        }
    }
}

/// One stored orbit point.
#[derive(Clone, Debug)]
pub struct OrbitPoint {
    pub enclosure: Enclosure,
    pub word: MapWord,
}

/// A deduplicated finite approximation of an orbit.
#[derive(Clone, Debug)]
pub struct OrbitSample {
    base: Rational,
    points: Vec<OrbitPoint>,
    budget_used: (u64, usize),
    dedup_tol: Rational,
    /// Index pairs kept despite sub-tolerance proximity because their
    /// enclosures were too wide to distinguish (precision collapse).
    collisions: Vec<(usize, usize)>,
    /// Certainly-distinct values conflated into an existing representative
    /// because they fell within the deduplication tolerance of it.
    conflated: usize,
}

impl OrbitSample {
    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn points(&self) -> &[OrbitPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dedup_tol(&self) -> &Rational {
        &self.dedup_tol
    }

    pub fn budget_used(&self) -> (u64, usize) {
        self.budget_used
    }

    pub fn collisions(&self) -> &[(usize, usize)] {
        &self.collisions
    }

    /// Count of distinct values merged into nearby representatives.
    pub fn conflated(&self) -> usize {
        self.conflated
    }

    /// Midpoints in increasing order.
    pub fn sorted_mids(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.points.iter().map(|p| p.enclosure.mid()).collect();
        v.sort();
        v
    }

    /// Smallest distance from `x` to a sample point midpoint.
    pub fn min_distance(&self, x: &Rational) -> Option<Rational> {
        self.points
            .iter()
            .map(|p| (&p.enclosure.mid() - x).abs())
            .min()
    }
}

struct Dedup {
    tol: Rational,
    by_mid: BTreeMap<Rational, usize>,
}

enum Insert {
    New,
    Collision(usize),
}

impl Dedup {
    fn probe(&self, e: &Enclosure) -> Insert {
        let mid = e.mid();
        let lo = &mid - &self.tol;
        let hi = &mid + &self.tol;
        let mut nearest: Option<usize> = None;
        for (_, idx) in self
            .by_mid
            .range((Bound::Included(lo), Bound::Included(hi)))
        {
            nearest = Some(*idx);
            break;
        }
        match nearest {
            None => Insert::New,
            Some(idx) => Insert::Collision(idx),
        }
    }

    fn record(&mut self, e: &Enclosure, idx: usize) {
        self.by_mid.insert(e.mid(), idx);
    }
}

/// Breadth-first orbit enumeration from `x`.
///
/// Letters follow generator declaration order, inverses directly after
/// their generator when the system is invertible. Exploration is
/// deterministic given budgets and generator order; enlarging either budget
/// only extends the discovery sequence.
pub fn orbit(
    system: &GeneratorSystem,
    x: &Rational,
    budget: OrbitBudget,
    prec: Option<Rational>,
    dedup_tol: Option<Rational>,
) -> Result<OrbitSample, ActionError> {
    orbit_with_rays(system, x, budget, prec, dedup_tol, 0)
}

/// Orbit enumeration augmented with single-generator rays: the words
/// `g^±k` for each generator and `k <= ray_len`, which expose accumulation
/// behavior far deeper than blind breadth-first search can reach.
pub fn orbit_with_rays(
    system: &GeneratorSystem,
    x: &Rational,
    budget: OrbitBudget,
    prec: Option<Rational>,
    dedup_tol: Option<Rational>,
    ray_len: u64,
) -> Result<OrbitSample, ActionError> {
    let dedup_tol = dedup_tol.unwrap_or_else(default_dedup_tol);
    let prec = prec.unwrap_or_else(|| (&dedup_tol / crate::rational::rat_i(4)).min(default_eval_prec()));
    let mut sample = OrbitSample {
        base: x.clone(),
        points: Vec::new(),
        budget_used: (0, 0),
        dedup_tol: dedup_tol.clone(),
        collisions: Vec::new(),
        conflated: 0,
    };
    let mut dedup = Dedup {
        tol: dedup_tol,
        by_mid: BTreeMap::new(),
    };
    let mut queue: VecDeque<usize> = VecDeque::new();

    let push = |sample: &mut OrbitSample,
                    dedup: &mut Dedup,
                    queue: &mut VecDeque<usize>,
                    e: Enclosure,
                    w: MapWord,
                    enqueue: bool|
     -> bool {
        if sample.points.len() >= budget.max_points {
            return false;
        }
        match dedup.probe(&e) {
            Insert::New => {
                let idx = sample.points.len();
                dedup.record(&e, idx);
                sample.budget_used.0 = sample.budget_used.0.max(w.len());
                sample.points.push(OrbitPoint { enclosure: e, word: w });
                sample.budget_used.1 = sample.points.len();
                if enqueue {
                    queue.push_back(idx);
                }
                true
            }
            Insert::Collision(other) => {
                // Certainly-distinct values inside the tolerance ball are
                // conflated into the existing representative: the sample
                // resolves locations only down to the tolerance. Enclosures
                // that overlap but are too wide to certify equality are the
                // genuinely ambiguous case: keep both, flagged.
                let gap = sample.points[other].enclosure.gap_to(&e);
                let quarter = &dedup.tol / crate::rational::rat_i(4);
                if gap.is_positive()
                    || (e.width() <= quarter
                        && sample.points[other].enclosure.width() <= quarter)
                {
                    sample.conflated += usize::from(gap.is_positive());
                    false
                } else {
                    let idx = sample.points.len();
                    dedup.record(&e, idx);
                    sample.budget_used.0 = sample.budget_used.0.max(w.len());
                    sample.points.push(OrbitPoint { enclosure: e, word: w });
                    sample.budget_used.1 = sample.points.len();
                    sample.collisions.push((other, idx));
                    if enqueue {
                        queue.push_back(idx);
                    }
                    true
                }
            }
        }
    };

    push(
        &mut sample,
        &mut dedup,
        &mut queue,
        Enclosure::exact(x.clone()),
        MapWord::identity(),
        true,
    );

    let quarter = &sample.dedup_tol / crate::rational::rat_i(4);
    let tighten = |e: Enclosure, w: &MapWord| -> Result<Enclosure, ActionError> {
        // Incremental widths compound through long words; re-evaluate from
        // the base with adaptive precision when they exceed the budget.
        if e.width() > quarter {
            super::system::eval_word(system, w, x, &quarter).map_err(ActionError::Map)
        } else {
            Ok(e)
        }
    };

    // Deep rays first so the point cap cannot starve them.
    if ray_len > 0 {
        let mut signs: Vec<i64> = vec![1];
        if system.is_invertible() {
            signs.push(-1);
        }
        for g in system.generators() {
            for &sign in &signs {
                let mut e = Enclosure::exact(x.clone());
                for k in 1..=ray_len {
                    e = system
                        .apply_letter(g.name(), sign, &e, &prec)
                        .map_err(ActionError::Map)?;
                    let w = MapWord::single(g.name(), sign * k as i64);
                    e = tighten(e, &w)?;
                    push(&mut sample, &mut dedup, &mut queue, e.clone(), w, false);
                }
            }
        }
    }

    // Letter alphabet in declaration order.
    let mut letters: Vec<(String, i64)> = Vec::new();
    for g in system.generators() {
        letters.push((g.name().to_string(), 1));
        if system.is_invertible() && g.is_surjective() {
            letters.push((g.name().to_string(), -1));
        }
    }

    while let Some(idx) = queue.pop_front() {
        let depth = sample.points[idx].word.len();
        if depth >= budget.max_word_len {
            continue;
        }
        if sample.points.len() >= budget.max_points {
            break;
        }
        for (gen, sign) in &letters {
            // Skip extensions that cancel against the word's last letter.
            let word = &sample.points[idx].word;
            if let Some(last) = word.letters().last() {
                if &last.gen == gen && last.exp.signum() == -sign {
                    continue;
                }
            }
            let e = system
                .apply_letter(gen, *sign, &sample.points[idx].enclosure, &prec)
                .map_err(ActionError::Map)?;
            let w = word.then(&MapWord::single(gen.clone(), *sign));
            let e = tighten(e, &w)?;
            push(&mut sample, &mut dedup, &mut queue, e, w, true);
        }
    }
    Ok(sample)
}

/// Re-evaluates every witness word at the base and checks it lands inside
/// (or within tolerance of) the stored enclosure. Used by tests and the
/// file round-trip checks.
pub fn verify_witnesses(
    system: &GeneratorSystem,
    sample: &OrbitSample,
) -> Result<(), MapError> {
    let prec = sample.dedup_tol() / crate::rational::rat_i(8);
    for p in sample.points() {
        let e = super::system::eval_word(system, &p.word, sample.base(), &prec)?;
        if !e.intersects(&p.enclosure) {
            return Err(MapError::Unusable(
                format!("witness {}", p.word),
                format!("re-evaluation {} misses stored {}", e, p.enclosure),
            ));
        }
    }
    Ok(())
}
