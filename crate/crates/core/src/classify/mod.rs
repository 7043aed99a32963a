//! Empirical classification of orbit samples.
//!
//! The verdicts mirror the four structural possibilities for an orbit:
//! dense in its range, discrete with accumulation only at the finite orbit
//! set (integer type), dense in an invariant Cantor set, or accumulating on
//! the closure of another orbit. Finite data cannot prove any of these, so
//! every verdict is budget-scoped, carries its evidence, and reports
//! whether it survived a budget doubling when a stability sample is
//! supplied; `Inconclusive` is an expected outcome, not an error.

mod level;
mod parallel;

pub use level::{estimate_level, LevelEstimate, RungEvidence};
pub use parallel::{parallel_test, ParallelVerdict};

use crate::action::{ComponentDecomposition, OrbitSample};
use crate::rational::{pow2, rat, Rational};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("base point {0} lies on the finite orbit set")]
    BaseInP(Rational),
    #[error("base point {0} is not inside any component")]
    OutsideComponents(Rational),
    #[error("ladder point {0} coincides with the probe point inconsistently")]
    LadderPointCoincidesWithX(Rational),
    #[error("probe point {0} lies on the reference orbit")]
    XOnReferenceOrbit(Rational),
    #[error("ladder is empty or names an unknown designated point: {0}")]
    InvalidLadder(String),
    #[error(transparent)]
    Action(#[from] crate::action::ActionError),
}

/// Empirical verdict for one orbit sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Dense,
    IntegerType,
    CantorType,
    AccumulatesOnProperSubset,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Dense => "Dense",
            Verdict::IntegerType => "IntegerType",
            Verdict::CantorType => "CantorType",
            Verdict::AccumulatesOnProperSubset => "AccumulatesOnProperSubset",
            Verdict::Inconclusive => "Inconclusive",
        };
        write!(f, "{s}")
    }
}

/// Thresholds for the verdict tests. The dense and edge margins are
/// fractions of the component length; the isolation radius is absolute.
#[derive(Clone, Debug)]
pub struct ClassifyParams {
    pub eps_dense_frac: Rational,
    pub edge_margin_frac: Rational,
    pub isolation_radius: Rational,
    pub min_points: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            eps_dense_frac: rat(1, 64),
            edge_margin_frac: rat(1, 32),
            isolation_radius: pow2(-20),
            min_points: 500,
        }
    }
}

/// Everything the verdict rests on, for reproducibility.
#[derive(Clone, Debug)]
pub struct Evidence {
    /// Largest uncovered gap in the core region (margins excluded),
    /// including the boundary gaps.
    pub max_gap_in_range: Rational,
    /// Fraction of core points whose nearest neighbor is at least the
    /// isolation radius away.
    pub isolated_point_fraction: f64,
    /// Core point count, and the same count in the stability sample.
    pub core_points: usize,
    pub stability_core_points: Option<usize>,
    /// Cluster structure summary for the accumulation estimate.
    pub accumulation_summary: String,
    /// Budget actually used by the sample.
    pub budget: (u64, usize),
    /// Whether the verdict survived one budget doubling; `None` when no
    /// stability sample was supplied.
    pub stable: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Evidence,
    /// Level of the orbit when the verdict itself implies one (the three
    /// self-accumulating cases are level 1); deeper nesting needs
    /// [`estimate_level`].
    pub level: Option<u32>,
}

/// Core region of the component containing `x`: the component with an edge
/// margin removed on each side.
fn core_region(
    decomposition: &ComponentDecomposition,
    x: &Rational,
    params: &ClassifyParams,
) -> Result<(Rational, Rational), ClassifyError> {
    if decomposition
        .finite_orbit_points
        .iter()
        .any(|p| p == x)
    {
        return Err(ClassifyError::BaseInP(x.clone()));
    }
    let i = decomposition
        .component_of(x)
        .ok_or_else(|| ClassifyError::OutsideComponents(x.clone()))?;
    let (lo, hi) = &decomposition.components[i];
    let margin = (hi - lo) * &params.edge_margin_frac;
    Ok((lo + &margin, hi - &margin))
}

/// Sorted sample midpoints inside `[lo, hi]`.
fn core_points(sample: &OrbitSample, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut pts: Vec<Rational> = sample
        .points()
        .iter()
        .map(|p| p.enclosure.mid())
        .filter(|m| m >= lo && m <= hi)
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

/// Gaps of the core cover: boundary-to-first, consecutive, last-to-boundary.
fn core_gaps(pts: &[Rational], lo: &Rational, hi: &Rational) -> Vec<Rational> {
    if pts.is_empty() {
        return vec![hi - lo];
    }
    let mut gaps = Vec::with_capacity(pts.len() + 1);
    gaps.push(&pts[0] - lo);
    for w in pts.windows(2) {
        gaps.push(&w[1] - &w[0]);
    }
    gaps.push(hi - pts.last().unwrap());
    gaps
}

fn isolated_fraction(pts: &[Rational], radius: &Rational) -> f64 {
    if pts.is_empty() {
        return 1.0;
    }
    let mut isolated = 0usize;
    for (i, p) in pts.iter().enumerate() {
        let left_ok = i == 0 || &(p - &pts[i - 1]) >= radius;
        let right_ok = i + 1 == pts.len() || &(&pts[i + 1] - p) >= radius;
        if left_ok && right_ok {
            isolated += 1;
        }
    }
    isolated as f64 / pts.len() as f64
}

/// Number of maximal runs separated by gaps larger than `scale`.
fn block_count(pts: &[Rational], scale: &Rational) -> usize {
    if pts.is_empty() {
        return 0;
    }
    1 + pts
        .windows(2)
        .filter(|w| &(&w[1] - &w[0]) > scale)
        .count()
}

/// Total length of inter-point gaps larger than `scale`, as a fraction of
/// the core length.
fn coverage_by_large_gaps(gaps: &[Rational], scale: &Rational, core_len: &Rational) -> f64 {
    let total: Rational = gaps
        .iter()
        .filter(|g| *g > scale)
        .fold(Rational::zero(), |a, b| a + b);
    crate::rational::to_f64(&(total / core_len))
}

/// Self-similarity statistic: a Cantor-like closure keeps a macro gap
/// (at least an eighth of the core stays empty at the top), its large gaps
/// persistently cover a substantial fraction of the core, and its block
/// count multiplies across successive octaves of scale. Dyadic scales beat
/// against ternary structure, so growth is measured over octave triples,
/// which smooths the plateaus. A discrete nested orbit fails the macro-gap
/// test (its complementary intervals are filled by the orbit itself) and a
/// dense orbit has no persistent gaps at all.
fn cantor_signature(pts: &[Rational], gaps: &[Rational], core_len: &Rational) -> (bool, String) {
    for j in [2i64, 3] {
        let s0 = core_len * pow2(-j);
        let s1 = core_len * pow2(-(j + 3));
        let s2 = core_len * pow2(-(j + 6));
        let n0 = block_count(pts, &s0);
        let n1 = block_count(pts, &s1);
        let n2 = block_count(pts, &s2);
        let cov = coverage_by_large_gaps(gaps, &s0, core_len);
        if n0 >= 2
            && cov >= 0.3
            && n1 as f64 >= 2.5 * n0 as f64
            && n2 as f64 >= 2.5 * n1 as f64
        {
            return (
                true,
                format!(
                    "macro scale 2^-{j}: blocks {n0} -> {n1} -> {n2} over octaves, \
                     large-gap coverage {cov:.2}; "
                ),
            );
        }
    }
    (false, String::new())
}

/// Cluster structure for the proper-subset test: maximal runs at the
/// cluster scale, their sizes, and whether the extreme gaps of the large
/// clusters shrink toward an edge (evidence of accumulation at a point that
/// is not a sample point).
fn cluster_signature(
    pts: &[Rational],
    core_len: &Rational,
    dedup_tol: &Rational,
) -> (bool, String) {
    let scale = core_len * rat(1, 64);
    if pts.is_empty() {
        return (false, "no core points".into());
    }
    let mut clusters: Vec<&[Rational]> = Vec::new();
    let mut start = 0usize;
    for i in 1..pts.len() {
        if &pts[i] - &pts[i - 1] > scale {
            clusters.push(&pts[start..i]);
            start = i;
        }
    }
    clusters.push(&pts[start..]);
    let big: Vec<&&[Rational]> = clusters.iter().filter(|c| c.len() >= 4).collect();
    if big.len() < 2 {
        return (
            false,
            format!("{} cluster(s) at scale 1/64", clusters.len()),
        );
    }
    // The orbit accumulates on something it does not contain when several
    // clusters show gap sequences shrinking toward an edge while the
    // nearest sample point stays a positive step beyond it.
    let mut accumulating = 0usize;
    for c in &big {
        let n = c.len();
        let right_shrinks =
            &c[n - 1] - &c[n - 2] < &c[n - 2] - &c[n - 3] && &c[n - 1] - &c[n - 2] > *dedup_tol;
        let left_shrinks = &c[1] - &c[0] < &c[2] - &c[1] && &c[1] - &c[0] > *dedup_tol;
        if right_shrinks || left_shrinks {
            accumulating += 1;
        }
    }
    let ok = accumulating >= 2;
    (
        ok,
        format!(
            "{} clusters, {} with >=4 points, {} edge-accumulating",
            clusters.len(),
            big.len(),
            accumulating
        ),
    )
}

/// Classifies an orbit sample. When `stability` carries the sample at a
/// doubled budget, count stability feeds the integer-type test and the
/// verdict's survival is reported in the evidence.
pub fn classify(
    sample: &OrbitSample,
    stability: Option<&OrbitSample>,
    decomposition: &ComponentDecomposition,
    params: &ClassifyParams,
) -> Result<Classification, ClassifyError> {
    let (lo, hi) = core_region(decomposition, sample.base(), params)?;
    let core_len = &hi - &lo;
    assert!(
        &core_len * &params.eps_dense_frac > sample.dedup_tol() * rat(4, 1),
        "density threshold must exceed four deduplication tolerances"
    );
    let pts = core_points(sample, &lo, &hi);
    let gaps = core_gaps(&pts, &lo, &hi);
    let max_gap = gaps.iter().max().cloned().unwrap_or_else(|| core_len.clone());
    let eps_dense = &core_len * &params.eps_dense_frac;
    let iso = isolated_fraction(&pts, &params.isolation_radius);
    let stability_pts = stability.map(|s| core_points(s, &lo, &hi).len());

    let (cantor_ok, cantor_detail) = cantor_signature(&pts, &gaps, &core_len);
    let (cluster_ok, cluster_detail) =
        cluster_signature(&pts, &core_len, sample.dedup_tol());

    let mut evidence = Evidence {
        max_gap_in_range: max_gap.clone(),
        isolated_point_fraction: iso,
        core_points: pts.len(),
        stability_core_points: stability_pts,
        accumulation_summary: format!("{cantor_detail}{cluster_detail}"),
        budget: sample.budget_used(),
        stable: None,
    };

    let counts_stable = stability_pts.map(|n| n == pts.len());
    let verdict = if pts.len() >= params.min_points && max_gap < eps_dense {
        Verdict::Dense
    } else if pts.len() >= params.min_points / 2 && cantor_ok {
        Verdict::CantorType
    } else if iso == 1.0 && counts_stable != Some(false) && !pts.is_empty() {
        Verdict::IntegerType
    } else if max_gap >= eps_dense && cluster_ok {
        Verdict::AccumulatesOnProperSubset
    } else {
        Verdict::Inconclusive
    };

    // Verdict survival under the doubled budget, reported, never assumed.
    if let Some(doubled) = stability {
        let again = classify(doubled, None, decomposition, params)?;
        evidence.stable = Some(again.verdict == verdict);
    }

    let level = match verdict {
        Verdict::Dense | Verdict::IntegerType | Verdict::CantorType => Some(1),
        _ => None,
    };
    Ok(Classification {
        verdict,
        evidence,
        level,
    })
}
