//! Witness intervals: a closed interval certified to meet its own image
//! under the relevant generators, the computational core of the minimal-set
//! argument.

use super::system::{common_fixed_points, interior_only, GeneratorSystem};
use super::ActionError;
use crate::enclosure::Enclosure;
use crate::homeo::PiecewiseMap;
use crate::rational::{pow2, rat, rat_i, Rational};
use num_traits::One;

/// Which hypothesis the interval certifies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessCondition {
    /// One generator's interior fixed points are finitely enclosed away
    /// from the endpoints (vacuously, when there are none).
    IsolatedFixedPoints { generator: String },
    /// No common interior fixed point was found at the working resolution,
    /// and every generator overlaps the interval.
    NoCommonFixedPoints,
}

/// Per-generator overlap evidence: enclosures of the images of the interval
/// endpoints, re-checkable by direct evaluation.
#[derive(Clone, Debug)]
pub struct OverlapCertificate {
    pub generator: String,
    pub image_of_lo: Enclosure,
    pub image_of_hi: Enclosure,
}

#[derive(Clone, Debug)]
pub struct WitnessInterval {
    pub interval: (Rational, Rational),
    pub condition: WitnessCondition,
    pub certificates: Vec<OverlapCertificate>,
    /// Working resolution of the fixed-point scans; non-accumulation at the
    /// endpoints is only certified down to this scale.
    pub resolution: Rational,
}

fn overlap_certificate(
    g: &PiecewiseMap,
    a: &Rational,
    b: &Rational,
) -> Result<Option<OverlapCertificate>, ActionError> {
    let prec = pow2(-50);
    let ia = g.eval(a, &prec).map_err(ActionError::Map)?;
    let ib = g.eval(b, &prec).map_err(ActionError::Map)?;
    // g([a,b]) = [g(a), g(b)] meets [a,b] iff g(a) <= b and g(b) >= a;
    // certify via the safe sides of the enclosures.
    let ok = ia.hi() <= b && ib.lo() >= a;
    Ok(ok.then(|| OverlapCertificate {
        generator: g.name().to_string(),
        image_of_lo: ia,
        image_of_hi: ib,
    }))
}

/// Grows `[a, b]` symmetrically until `check` certifies or the interval
/// fills `[margin, 1 - margin]`.
fn grow_until<F>(
    mut a: Rational,
    mut b: Rational,
    margin: &Rational,
    mut check: F,
) -> Result<Option<(Rational, Rational)>, ActionError>
where
    F: FnMut(&Rational, &Rational) -> Result<bool, ActionError>,
{
    let top = Rational::one() - margin;
    let mut step = rat(1, 16);
    loop {
        if check(&a, &b)? {
            return Ok(Some((a, b)));
        }
        if &a <= margin && b >= top {
            return Ok(None);
        }
        a = (&a - &step).max(margin.clone());
        b = (&b + &step).min(top.clone());
        step = &step * rat_i(2);
    }
}

/// Finds a closed interval in `(0, 1)` meeting its image under the
/// generators that matter, trying the isolated-fixed-point route first and
/// falling back to the no-common-fixed-point route.
pub fn witness_interval(system: &GeneratorSystem) -> Result<WitnessInterval, ActionError> {
    let resolution = pow2(-12);
    let margin = pow2(-10);
    let mut blockers: Vec<String> = Vec::new();

    // Route 1: a generator whose interior fixed points stay away from the
    // endpoints at the working resolution.
    'generators: for g in system.generators() {
        let fixed = g
            .fixed_point_enclosures(&resolution)
            .map_err(ActionError::Map)?;
        let mut interior: Vec<Enclosure> = Vec::new();
        for (e, _flag) in &fixed {
            if e.contains(&rat_i(0)) || e.contains(&rat_i(1)) {
                if e.width() <= &resolution * rat_i(2) {
                    // Fixed endpoint (or its resolution cell): expected.
                    continue;
                }
                blockers.push(format!(
                    "{}: fixed-point set {} reaches an endpoint",
                    g.name(),
                    e
                ));
                continue 'generators;
            }
            // Interior structure too close to an endpoint blocks the route.
            if e.lo() < &margin || e.hi() > &(Rational::one() - &margin) {
                blockers.push(format!(
                    "{}: fixed-point enclosure {} not bounded away from endpoints \
                     at resolution {resolution}",
                    g.name(),
                    e
                ));
                continue 'generators;
            }
            interior.push(e.clone());
        }
        // Hull of the interior enclosures, or a central interval when there
        // are none.
        let (mut a, mut b) = if interior.is_empty() {
            (rat(1, 4), rat(3, 4))
        } else {
            let lo = interior.iter().map(|e| e.lo().clone()).min().unwrap();
            let hi = interior.iter().map(|e| e.hi().clone()).max().unwrap();
            ((lo - &resolution).max(margin.clone()), (hi + &resolution).min(Rational::one() - &margin))
        };
        if a >= b {
            (a, b) = (rat(1, 4), rat(3, 4));
        }
        let grown = grow_until(a, b, &margin, |a, b| {
            Ok(overlap_certificate(g, a, b)?.is_some())
        })?;
        if let Some((a, b)) = grown {
            let cert = overlap_certificate(g, &a, &b)?.expect("just certified");
            return Ok(WitnessInterval {
                interval: (a, b),
                condition: WitnessCondition::IsolatedFixedPoints {
                    generator: g.name().to_string(),
                },
                certificates: vec![cert],
                resolution,
            });
        }
        blockers.push(format!(
            "{}: no overlapping interval found inside the margins",
            g.name()
        ));
    }

    // Route 2: no common interior fixed points, overlap for every generator.
    let common = common_fixed_points(system, &resolution).map_err(ActionError::Map)?;
    let interior_common = interior_only(&common, &margin);
    if interior_common.is_empty() {
        let grown = grow_until(rat(1, 4), rat(3, 4), &margin, |a, b| {
            for g in system.generators() {
                if overlap_certificate(g, a, b)?.is_none() {
                    return Ok(false);
                }
            }
            Ok(true)
        })?;
        if let Some((a, b)) = grown {
            let mut certificates = Vec::new();
            for g in system.generators() {
                certificates.push(overlap_certificate(g, &a, &b)?.expect("just certified"));
            }
            return Ok(WitnessInterval {
                interval: (a, b),
                condition: WitnessCondition::NoCommonFixedPoints,
                certificates,
                resolution,
            });
        }
        blockers.push("no-common-fixed-points route: overlap growth exhausted".into());
    } else {
        blockers.push(format!(
            "no-common-fixed-points route: {} possible common interior fixed point(s), \
             e.g. {}",
            interior_common.len(),
            interior_common[0].0
        ));
    }

    Err(ActionError::NeitherConditionVerified(blockers.join("; ")))
}
