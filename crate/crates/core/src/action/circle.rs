//! Circle reduction: splitting at the finite orbit set and working per
//! component.

use super::orbit::{orbit, OrbitBudget};
use super::system::{default_dedup_tol, GeneratorSystem};
use super::ActionError;
use crate::homeo::{DomainKind, MapWord};
use crate::rational::{rat_i, Rational};
use num_traits::{One, Signed};
use std::collections::BTreeSet;

/// The circle (or interval) split at the finite orbit points: components
/// are listed in circular order as arcs `(start, end)` with `end` possibly
/// past 1 for the wrapping arc.
#[derive(Clone, Debug)]
pub struct ComponentDecomposition {
    pub finite_orbit_points: Vec<Rational>,
    pub components: Vec<(Rational, Rational)>,
    /// Words of bounded length mapping each component to itself.
    pub stabilizers: Vec<Vec<MapWord>>,
}

impl ComponentDecomposition {
    /// The interval acted on with fixed endpoints: one component `(0, 1)`.
    pub fn unit_interval() -> ComponentDecomposition {
        ComponentDecomposition {
            finite_orbit_points: vec![rat_i(0), rat_i(1)],
            components: vec![(rat_i(0), rat_i(1))],
            stabilizers: vec![Vec::new()],
        }
    }

    /// Index of the component containing `x` (circle positions reduced
    /// mod 1), or `None` on a finite orbit point.
    pub fn component_of(&self, x: &Rational) -> Option<usize> {
        let x = reduce_mod1(x);
        for (i, (lo, hi)) in self.components.iter().enumerate() {
            if (&x > lo && &x < hi) || (&x + rat_i(1) > *lo && &x + rat_i(1) < *hi) {
                return Some(i);
            }
        }
        None
    }

    pub fn component_len(&self, i: usize) -> Rational {
        let (lo, hi) = &self.components[i];
        hi - lo
    }
}

pub(crate) fn reduce_mod1(x: &Rational) -> Rational {
    let f = x.floor();
    x - f
}

fn dist_mod1(a: &Rational, b: &Rational) -> Rational {
    let d = (reduce_mod1(a) - reduce_mod1(b)).abs();
    let wrap = Rational::one() - &d;
    d.min(wrap)
}

/// Splits the circle at the verified-invariant finite orbit set `p` and
/// finds, per component, the words of length `<= budget.max_word_len` that
/// stabilize it.
pub fn reduce_circle(
    system: &GeneratorSystem,
    p: &[Rational],
    budget: OrbitBudget,
) -> Result<ComponentDecomposition, ActionError> {
    assert!(!p.is_empty(), "finite orbit set must be nonempty");
    let tol = default_dedup_tol();
    let prec = &tol / rat_i(4);

    let mut points: Vec<Rational> = p.iter().map(reduce_mod1).collect();
    points.sort();
    points.dedup();

    // Every generator must permute the set (exactly, or within tolerance
    // for non-exact maps).
    for g in system.generators() {
        for pt in &points {
            let img = g.eval(pt, &prec).map_err(ActionError::Map)?;
            let mid = img.mid();
            let hit = points.iter().any(|q| dist_mod1(&mid, q) <= tol);
            if !hit {
                return Err(ActionError::PNotInvariant {
                    generator: g.name().to_string(),
                    point: pt.clone(),
                });
            }
        }
    }

    let components: Vec<(Rational, Rational)> = match system.domain_kind() {
        DomainKind::Circle => (0..points.len())
            .map(|i| {
                let lo = points[i].clone();
                let hi = if i + 1 < points.len() {
                    points[i + 1].clone()
                } else {
                    &points[0] + rat_i(1)
                };
                (lo, hi)
            })
            .collect(),
        _ => {
            // Interval systems: arcs between consecutive points inside [0,1].
            let mut pts = points.clone();
            if pts.first() != Some(&rat_i(0)) {
                pts.insert(0, rat_i(0));
            }
            if pts.last() != Some(&rat_i(1)) {
                pts.push(rat_i(1));
            }
            pts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
        }
    };

    // Stabilizing words per component: a word stabilizes the arc iff it
    // fixes both endpoints (orientation-preserving maps permuting the set).
    let mut stabilizers = Vec::with_capacity(components.len());
    let words = enumerate_words(system, budget.max_word_len, 4096);
    for (lo, hi) in &components {
        let mut keep = Vec::new();
        for w in &words {
            let fixes = |pt: &Rational| -> Result<bool, ActionError> {
                let e = super::system::eval_word(system, w, &reduce_mod1(pt), &prec)
                    .map_err(ActionError::Map)?;
                Ok(dist_mod1(&e.mid(), pt) <= tol)
            };
            if fixes(lo)? && fixes(&reduce_mod1(hi))? {
                keep.push(w.clone());
            }
        }
        stabilizers.push(keep);
    }

    Ok(ComponentDecomposition {
        finite_orbit_points: points,
        components,
        stabilizers,
    })
}

/// All freely reduced words of length `<= max_len` (capped), identity
/// first, in deterministic order.
pub(crate) fn enumerate_words(
    system: &GeneratorSystem,
    max_len: u64,
    cap: usize,
) -> Vec<MapWord> {
    let mut letters: Vec<(String, i64)> = Vec::new();
    for g in system.generators() {
        letters.push((g.name().to_string(), 1));
        if system.is_invertible() && g.is_surjective() {
            letters.push((g.name().to_string(), -1));
        }
    }
    let mut out = vec![MapWord::identity()];
    let mut frontier = vec![MapWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for (gen, sign) in &letters {
                if let Some(last) = w.letters().last() {
                    if &last.gen == gen && last.exp.signum() == -sign {
                        continue;
                    }
                }
                let w2 = w.then(&MapWord::single(gen.clone(), *sign));
                next.push(w2.clone());
                out.push(w2);
                if out.len() >= cap {
                    return out;
                }
            }
        }
        frontier = next;
    }
    out
}

/// Component indices met by the budget-limited orbit of `x`: a lower bound
/// for the range of `x`, monotone in the budget.
pub fn range_of(
    system: &GeneratorSystem,
    decomposition: &ComponentDecomposition,
    x: &Rational,
    budget: OrbitBudget,
) -> Result<BTreeSet<usize>, ActionError> {
    let sample = orbit(system, x, budget, None, None)?;
    let mut out = BTreeSet::new();
    for p in sample.points() {
        if let Some(i) = decomposition.component_of(&p.enclosure.mid()) {
            out.insert(i);
        }
    }
    Ok(out)
}
