//! Level estimation against a ladder of designated points.
//!
//! The level of an orbit counts nesting: level 0 is the finite orbit set,
//! and a level-`n` orbit accumulates at the closure of a distinct level
//! `n-1` orbit. Empirically, the probe's sample accumulates on a rung's
//! sample when several probe points converge on a rung point, the nearest
//! within the isolation radius, while the two samples stay disjoint. Deep
//! single-generator rays make that convergence visible at desk budgets.

use super::{ClassifyError, ClassifyParams};
use crate::action::{orbit_with_rays, GeneratorSystem, OrbitBudget, OrbitSample};
use crate::rational::Rational;
use num_traits::Signed;

/// Length of the single-generator probe rays appended to each sample.
const RAY_LEN: u64 = 40;

/// Per-rung outcome of the accumulation test.
#[derive(Clone, Debug)]
pub struct RungEvidence {
    pub rung: usize,
    pub ladder_name: String,
    /// Probe point coincides with the rung point (self rung).
    pub is_self: bool,
    /// Samples verified disjoint beyond the deduplication tolerance.
    pub disjoint: bool,
    /// Number of rung points the probe sample converges on.
    pub accumulation_witnesses: usize,
    /// Smallest probe-to-rung distance observed.
    pub nearest: Option<Rational>,
}

#[derive(Clone, Debug)]
pub struct LevelEstimate {
    pub level: u32,
    pub rungs: Vec<RungEvidence>,
}

/// Does `probe` accumulate on a point of `rung`?
///
/// A rung point witnesses accumulation when three probe points converge on
/// it — nearest within the isolation radius, third nearest within a bounded
/// multiple of the nearest — and the approach lands well inside the rung's
/// own local spacing there. The spacing condition is what separates a
/// genuine limit (an isolated rung point approached far below its spacing)
/// from a probe tail merely passing near the rung's own tail, where the
/// closest approach is always comparable to the local tail spacing.
fn accumulates_on(
    probe: &[Rational],
    rung: &OrbitSample,
    params: &ClassifyParams,
    core: &(Rational, Rational),
) -> (usize, Option<Rational>) {
    let sixty_four = crate::rational::rat_i(64);
    let rung_mids: Vec<Rational> = {
        let mut v: Vec<Rational> = rung.points().iter().map(|p| p.enclosure.mid()).collect();
        v.sort();
        v
    };
    let local_spacing = |z: &Rational| -> Rational {
        let i = rung_mids.partition_point(|m| m < z);
        let mut best: Option<Rational> = None;
        for j in [i.wrapping_sub(1), i, i + 1] {
            if let Some(m) = rung_mids.get(j) {
                let d = (m - z).abs();
                if d.is_positive() && best.as_ref().is_none_or(|b| &d < b) {
                    best = Some(d);
                }
            }
        }
        best.unwrap_or_else(|| crate::rational::rat_i(1))
    };
    let mut witnesses = 0usize;
    let mut best: Option<Rational> = None;
    for z in &rung_mids {
        // Accumulation at the domain edges is shared by every orbit and
        // says nothing about nesting; only interior rung points count.
        if z <= &core.0 || z >= &core.1 {
            continue;
        }
        let mut dists: Vec<Rational> = probe
            .iter()
            .filter(|p| **p > core.0 && **p < core.1)
            .map(|p| (p - z).abs())
            .collect();
        dists.sort();
        if dists.len() >= 3
            && dists[0].is_positive()
            && dists[0] <= params.isolation_radius
            && dists[2] <= &dists[0] * &sixty_four
            && &dists[0] * &sixty_four <= local_spacing(z)
        {
            witnesses += 1;
        }
        if let Some(d) = dists.first() {
            if best.as_ref().is_none_or(|b| d < b) {
                best = Some(d.clone());
            }
        }
    }
    (witnesses, best)
}

/// Estimates the level of the orbit of `x` against the system's ladder:
/// one plus the highest rung whose orbit closure the probe accumulates on
/// while staying disjoint from it, or one when no rung qualifies (every
/// infinite orbit accumulates at the finite orbit set).
pub fn estimate_level(
    system: &GeneratorSystem,
    x: &Rational,
    budget: OrbitBudget,
    params: &ClassifyParams,
) -> Result<LevelEstimate, ClassifyError> {
    let ladder = system.ladder();
    if ladder.is_empty() {
        return Err(ClassifyError::InvalidLadder(
            "system has no ladder".into(),
        ));
    }
    let mut rung_values = Vec::with_capacity(ladder.len());
    for name in ladder {
        let v = system
            .designated_point(name)
            .ok_or_else(|| ClassifyError::InvalidLadder(name.clone()))?;
        rung_values.push((name.clone(), v.clone()));
    }

    let probe = orbit_with_rays(system, x, budget, None, None, RAY_LEN)?;
    let probe_mids: Vec<Rational> = probe.points().iter().map(|p| p.enclosure.mid()).collect();
    let tol = probe.dedup_tol().clone();

    // Ladder consistency: the probe must not lie on a rung below its own
    // name point.
    for (j, (_, v)) in rung_values.iter().enumerate() {
        if v == x {
            for (name, lower) in &rung_values[..j] {
                let lower_sample = orbit_with_rays(system, lower, budget, None, None, RAY_LEN)?;
                if lower_sample
                    .points()
                    .iter()
                    .any(|p| p.enclosure.dist_to_point(x) <= tol)
                {
                    let _ = name;
                    return Err(ClassifyError::LadderPointCoincidesWithX(x.clone()));
                }
            }
        }
    }

    let mut rungs = Vec::new();
    let mut level = 1u32;
    for (j, (name, v)) in rung_values.iter().enumerate() {
        let is_self = v == x;
        if is_self {
            rungs.push(RungEvidence {
                rung: j + 1,
                ladder_name: name.clone(),
                is_self: true,
                disjoint: false,
                accumulation_witnesses: 0,
                nearest: None,
            });
            continue;
        }
        let rung_sample = orbit_with_rays(system, v, budget, None, None, RAY_LEN)?;
        let disjoint = cross_disjoint(&probe, &rung_sample, &tol, system);
        let core = match system.domain_kind() {
            crate::homeo::DomainKind::Interval01 => {
                (crate::rational::rat(1, 32), crate::rational::rat(31, 32))
            }
            _ => (
                crate::rational::rat(-1_000_000, 1),
                crate::rational::rat(1_000_000, 1),
            ),
        };
        let (witnesses, nearest) = accumulates_on(&probe_mids, &rung_sample, params, &core);
        if disjoint && witnesses >= 1 {
            level = level.max(j as u32 + 2);
        }
        rungs.push(RungEvidence {
            rung: j + 1,
            ladder_name: name.clone(),
            is_self: false,
            disjoint,
            accumulation_witnesses: witnesses,
            nearest,
        });
    }
    Ok(LevelEstimate { level, rungs })
}

/// Tolerance-disjointness of the two samples, judged away from the domain
/// endpoints: every orbit accumulates at the finite orbit set, so deep
/// iterates of distinct orbits become tolerance-indistinguishable there
/// without implying anything about nesting.
fn cross_disjoint(
    a: &OrbitSample,
    b: &OrbitSample,
    tol: &Rational,
    system: &GeneratorSystem,
) -> bool {
    let (margin_lo, margin_hi) = match system.domain_kind() {
        crate::homeo::DomainKind::Interval01 => {
            (crate::rational::rat(1, 32), crate::rational::rat(31, 32))
        }
        _ => (
            crate::rational::rat(-1_000_000, 1),
            crate::rational::rat(1_000_000, 1),
        ),
    };
    let keep = |m: &Rational| m > &margin_lo && m < &margin_hi;
    let collect = |s: &OrbitSample| -> Vec<(Rational, bool)> {
        let mut v: Vec<(Rational, bool)> = s
            .points()
            .iter()
            .map(|p| (p.enclosure.mid(), p.enclosure.is_exact()))
            .filter(|(m, _)| keep(m))
            .collect();
        v.sort_by(|x, y| x.0.cmp(&y.0));
        v
    };
    let am = collect(a);
    let bm = collect(b);
    // Exact points witness disjointness by inequality alone; enclosure
    // points need tolerance separation.
    let violates = |x: &(Rational, bool), y: &(Rational, bool)| {
        if x.1 && y.1 {
            x.0 == y.0
        } else {
            (&x.0 - &y.0).abs() <= *tol
        }
    };
    let mut i = 0usize;
    for x in &am {
        while i < bm.len() && bm[i].0 < x.0 {
            i += 1;
        }
        if i < bm.len() && violates(x, &bm[i]) {
            return false;
        }
        if i > 0 && violates(x, &bm[i - 1]) {
            return false;
        }
    }
    true
}
