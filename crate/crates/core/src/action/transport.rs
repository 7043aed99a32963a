//! Interval transport along a reference orbit, and stabilizer word search.

use super::circle::enumerate_words;
use super::orbit::OrbitSample;
use super::system::{default_dedup_tol, eval_word, GeneratorSystem};
use super::ActionError;
use crate::homeo::MapWord;
use crate::rational::{rat_i, Rational};
use num_traits::Signed;

/// The labeled consecutive points of an integer-type reference orbit:
/// sorted sample midpoints, with index 0 at the base.
pub(crate) fn labeled_points(sample: &OrbitSample) -> Result<(Vec<Rational>, usize), ActionError> {
    let mids = sample.sorted_mids();
    let tol = sample.dedup_tol();
    let base_pos = mids
        .iter()
        .position(|m| (m - sample.base()).abs() <= *tol)
        .ok_or_else(|| {
            ActionError::BudgetExhausted("reference orbit does not contain its base".into())
        })?;
    Ok((mids, base_pos))
}

/// A word carrying the `i`-th complementary interval of the reference
/// orbit onto the `j`-th: the witness of `z_j` composed with the inverse
/// witness of `z_i`. Verified by mapping both endpoints of the source
/// interval onto the target within the deduplication tolerance.
pub fn transport_word(
    system: &GeneratorSystem,
    z_sample: &OrbitSample,
    i: i64,
    j: i64,
    _budget_hint: u64,
) -> Result<MapWord, ActionError> {
    if !system.is_invertible() {
        return Err(ActionError::InvalidSystem(
            "transport needs an invertible system".into(),
        ));
    }
    if i == j {
        return Ok(MapWord::identity());
    }
    let (mids, base_pos) = labeled_points(z_sample)?;
    let tol = z_sample.dedup_tol();
    let point_at = |k: i64| -> Result<&Rational, ActionError> {
        let idx = base_pos as i64 + k;
        if idx < 0 || idx as usize >= mids.len() {
            return Err(ActionError::BudgetExhausted(format!(
                "reference orbit sample has no labeled point {k}"
            )));
        }
        Ok(&mids[idx as usize])
    };
    let witness_for = |k: i64| -> Result<&MapWord, ActionError> {
        let target = point_at(k)?;
        z_sample
            .points()
            .iter()
            .find(|p| (&p.enclosure.mid() - target).abs() <= *tol)
            .map(|p| &p.word)
            .ok_or_else(|| {
                ActionError::BudgetExhausted(format!("no witness word for labeled point {k}"))
            })
    };
    let w_i = witness_for(i)?;
    let w_j = witness_for(j)?;
    let transport = w_i.inverse().then(w_j);

    // Verify on both endpoints of the source interval.
    let prec = tol / rat_i(8);
    for (src, dst) in [(i, j), (i + 1, j + 1)] {
        let from = point_at(src)?.clone();
        let to = point_at(dst)?.clone();
        let e = eval_word(system, &transport, &from, &prec).map_err(ActionError::Map)?;
        if e.dist_to_point(&to) > *tol {
            return Err(ActionError::BudgetExhausted(format!(
                "transport word {transport} maps {from} to {} instead of {to}",
                e.mid()
            )));
        }
    }
    Ok(transport)
}

/// All freely reduced words of length `<= max_word_len` whose action fixes
/// both endpoints of `[a, b]` within the deduplication tolerance and keeps
/// the midpoint inside. The identity always qualifies; an empty remainder
/// is a valid result.
pub fn stabilizer_words(
    system: &GeneratorSystem,
    interval: (&Rational, &Rational),
    max_word_len: u64,
) -> Result<Vec<MapWord>, ActionError> {
    let (a, b) = interval;
    let tol = default_dedup_tol();
    let prec = &tol / rat_i(8);
    let mut out = Vec::new();
    for w in enumerate_words(system, max_word_len, 65_536) {
        let ea = eval_word(system, &w, a, &prec).map_err(ActionError::Map)?;
        if ea.dist_to_point(a) > tol {
            continue;
        }
        let eb = eval_word(system, &w, b, &prec).map_err(ActionError::Map)?;
        if eb.dist_to_point(b) > tol {
            continue;
        }
        let mid = (a + b) / rat_i(2);
        let em = eval_word(system, &w, &mid, &prec).map_err(ActionError::Map)?;
        if &em.mid() >= a && em.mid() <= *b {
            out.push(w);
        }
    }
    Ok(out)
}
