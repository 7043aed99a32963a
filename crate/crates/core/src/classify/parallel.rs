//! Parallel-orbit testing: does the orbit of a probe point meet each
//! interval complementary to a reference orbit in exactly one point?

use super::ClassifyError;
use crate::action::{orbit, GeneratorSystem, OrbitBudget, OrbitSample};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParallelVerdict {
    /// Every explored complementary interval holds exactly one probe orbit
    /// point, stable under one budget doubling.
    Parallel,
    /// Some complementary interval holds at least two.
    NotParallel,
    /// Not enough data to tell.
    Inconclusive,
}

/// Counts probe points per complementary interval of the reference sample.
fn interval_counts(reference: &[Rational], probe: &OrbitSample) -> Vec<usize> {
    let mut counts = vec![0usize; reference.len().saturating_sub(1)];
    for p in probe.points() {
        let m = p.enclosure.mid();
        // Interval index: partition_point gives the first reference point
        // greater than m.
        let i = reference.partition_point(|r| r < &m);
        if i > 0 && i < reference.len() {
            counts[i - 1] += 1;
        }
    }
    counts
}

/// Tests whether the orbit of `x` is parallel to the reference orbit: one
/// point in each explored complementary interval, with a budget doubling
/// unable to produce a second.
pub fn parallel_test(
    system: &GeneratorSystem,
    x: &Rational,
    z_sample: &OrbitSample,
    budget: OrbitBudget,
) -> Result<ParallelVerdict, ClassifyError> {
    let tol = z_sample.dedup_tol();
    if z_sample
        .points()
        .iter()
        .any(|p| p.enclosure.dist_to_point(x) <= *tol)
    {
        return Err(ClassifyError::XOnReferenceOrbit(x.clone()));
    }
    let reference = z_sample.sorted_mids();
    if reference.len() < 3 {
        return Ok(ParallelVerdict::Inconclusive);
    }

    let probe = orbit(system, x, budget, None, None)?;
    let counts = interval_counts(&reference, &probe);
    if counts.iter().any(|&c| c >= 2) {
        return Ok(ParallelVerdict::NotParallel);
    }
    let explored = counts.iter().filter(|&&c| c == 1).count();
    if probe.len() < 3 || explored < 2 {
        return Ok(ParallelVerdict::Inconclusive);
    }

    // One budget doubling must not add a second point anywhere explored.
    let doubled = orbit(system, x, budget.doubled(), None, None)?;
    let counts2 = interval_counts(&reference, &doubled);
    if counts2.iter().any(|&c| c >= 2) {
        return Ok(ParallelVerdict::NotParallel);
    }
    Ok(ParallelVerdict::Parallel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_example, ExampleParams};
    use crate::rational::rat;

    #[test]
    fn marker_system_probe_below_is_parallel() {
        let sys = build_example("parallel-pair", &ExampleParams::default()).unwrap();
        let z0 = sys.designated_point("z0").unwrap().clone();
        let z_sample = orbit(&sys, &z0, OrbitBudget::new(10, 400), None, None).unwrap();
        let probe = sys.designated_point("probe").unwrap().clone();
        let v = parallel_test(&sys, &probe, &z_sample, OrbitBudget::new(8, 400)).unwrap();
        assert_eq!(v, ParallelVerdict::Parallel);
    }

    #[test]
    fn nested_orbit_is_not_parallel() {
        let sys = build_example("level2-integer", &ExampleParams::default()).unwrap();
        let z0 = sys.designated_point("z0").unwrap().clone();
        let z_sample = orbit(&sys, &z0, OrbitBudget::new(10, 400), None, None).unwrap();
        let x0 = sys.designated_point("x0").unwrap().clone();
        let v = parallel_test(&sys, &x0, &z_sample, OrbitBudget::new(8, 400)).unwrap();
        assert_eq!(v, ParallelVerdict::NotParallel);
    }

    #[test]
    fn unit_budget_is_inconclusive() {
        let sys = build_example("parallel-pair", &ExampleParams::default()).unwrap();
        let z0 = sys.designated_point("z0").unwrap().clone();
        let z_sample = orbit(&sys, &z0, OrbitBudget::new(10, 400), None, None).unwrap();
        let probe = sys.designated_point("probe").unwrap().clone();
        let v = parallel_test(&sys, &probe, &z_sample, OrbitBudget::new(0, 1)).unwrap();
        assert_eq!(v, ParallelVerdict::Inconclusive);
    }

    #[test]
    fn probe_on_reference_rejected() {
        let sys = build_example("parallel-pair", &ExampleParams::default()).unwrap();
        let z0 = sys.designated_point("z0").unwrap().clone();
        let z_sample = orbit(&sys, &z0, OrbitBudget::new(8, 200), None, None).unwrap();
        assert!(matches!(
            parallel_test(&sys, &rat(2, 3), &z_sample, OrbitBudget::new(4, 50)),
            Err(ClassifyError::XOnReferenceOrbit(_))
        ));
    }
}
