//! Inter-rater agreement and disagreement resolution for score sheets.

use std::collections::BTreeMap;

use super::{ScoreSheet, ScoreValue};
use crate::{Error, Result};

/// Indicator ids scored (not marked not-applicable) by both sheets, with the
/// pair of values. Sorted by id.
pub(super) fn common_scored<'a>(a: &'a ScoreSheet, b: &'a ScoreSheet) -> Vec<(&'a str, u32, u32)> {
    a.scores
        .iter()
        .filter_map(|(id, va)| {
            let va = va.as_points()?;
            let vb = b.scores.get(id)?.as_points()?;
            Some((id.as_str(), va, vb))
        })
        .collect()
}

fn check_same_entity(a: &ScoreSheet, b: &ScoreSheet) -> Result<()> {
    if a.entity_id != b.entity_id {
        return Err(Error::invalid(format!(
            "sheets cover different entities: {} vs {}",
            a.entity_id, b.entity_id
        )));
    }
    Ok(())
}

/// Fraction of commonly scored indicators on which the two raters agree
/// exactly. Indicators either rater marked not-applicable or left unscored
/// are excluded; an empty intersection is an error.
pub fn agreement_rate(a: &ScoreSheet, b: &ScoreSheet) -> Result<f64> {
    check_same_entity(a, b)?;
    let common = common_scored(a, b);
    if common.is_empty() {
        return Err(Error::invalid(format!(
            "sheets for {} share no scored indicators",
            a.entity_id
        )));
    }
    let matches = common.iter().filter(|(_, va, vb)| va == vb).count();
    Ok(matches as f64 / common.len() as f64)
}

/// Unweighted Cohen's kappa over the commonly scored indicators.
///
/// Expected agreement comes from the product of the per-rater category
/// marginals. When expected agreement is 1 (both raters constant on the same
/// value) kappa is undefined and `None` is returned.
pub fn cohens_kappa(a: &ScoreSheet, b: &ScoreSheet) -> Result<Option<f64>> {
    check_same_entity(a, b)?;
    let common = common_scored(a, b);
    if common.is_empty() {
        return Err(Error::invalid(format!(
            "sheets for {} share no scored indicators",
            a.entity_id
        )));
    }
    let n = common.len() as f64;
    let observed = common.iter().filter(|(_, va, vb)| va == vb).count() as f64 / n;

    let mut marginal_a: BTreeMap<u32, usize> = BTreeMap::new();
    let mut marginal_b: BTreeMap<u32, usize> = BTreeMap::new();
    for (_, va, vb) in &common {
        *marginal_a.entry(*va).or_default() += 1;
        *marginal_b.entry(*vb).or_default() += 1;
    }
    let expected: f64 = marginal_a
        .iter()
        .map(|(cat, count_a)| {
            let count_b = marginal_b.get(cat).copied().unwrap_or(0);
            (*count_a as f64 / n) * (count_b as f64 / n)
        })
        .sum();

    if expected >= 1.0 {
        return Ok(None);
    }
    Ok(Some((observed - expected) / (1.0 - expected)))
}

/// Merges two sheets for the same entity into one adjudicated sheet.
///
/// Both sheets must assign a value (score or not-applicable) to exactly the
/// same indicator set. `resolutions` must cover exactly the indicators the
/// raters disagree on; agreed values carry over unchanged. Sources and
/// justifications are merged, attributed as `[rater] text` where the raters'
/// texts differ. New-information flags are unioned, dropping any whose
/// resolved value is not a score.
pub fn resolve(
    a: &ScoreSheet,
    b: &ScoreSheet,
    resolutions: &BTreeMap<String, ScoreValue>,
) -> Result<ScoreSheet> {
    check_same_entity(a, b)?;
    if !a.scores.keys().eq(b.scores.keys()) {
        return Err(Error::invalid(format!(
            "sheets for {} score different indicator sets and cannot be resolved",
            a.entity_id
        )));
    }

    let disagreements: Vec<&String> = a
        .scores
        .iter()
        .filter(|(id, va)| b.scores[*id] != **va)
        .map(|(id, _)| id)
        .collect();

    for id in &disagreements {
        if !resolutions.contains_key(*id) {
            return Err(Error::invalid(format!(
                "no resolution for disagreement on {id}"
            )));
        }
    }
    for id in resolutions.keys() {
        if !disagreements.contains(&id) {
            return Err(Error::invalid(format!(
                "resolution for {id}, but the raters agree on it"
            )));
        }
    }

    let mut merged = ScoreSheet::new(
        format!("{}+{}", a.rater_id, b.rater_id),
        a.entity_id.clone(),
    );
    for (id, va) in &a.scores {
        let value = resolutions.get(id).copied().unwrap_or(*va);
        merged.scores.insert(id.clone(), value);
    }

    for field in [
        (&a.sources, &b.sources, &mut merged.sources),
        (
            &a.justifications,
            &b.justifications,
            &mut merged.justifications,
        ),
    ]
    .into_iter()
    {
        let (from_a, from_b, out) = field;
        let ids: Vec<&String> = from_a.keys().chain(from_b.keys()).collect();
        for id in ids {
            let text = match (from_a.get(id), from_b.get(id)) {
                (Some(ta), Some(tb)) if ta == tb => ta.clone(),
                (Some(ta), Some(tb)) => {
                    format!("[{}] {ta}; [{}] {tb}", a.rater_id, b.rater_id)
                }
                (Some(ta), None) => ta.clone(),
                (None, Some(tb)) => tb.clone(),
                (None, None) => continue,
            };
            out.insert(id.clone(), text);
        }
    }

    for id in a.new_information.union(&b.new_information) {
        if matches!(merged.scores.get(id), Some(ScoreValue::Scored(_))) {
            merged.new_information.insert(id.clone());
        }
    }

    Ok(merged)
}
