//! Demographic representation and association bias as total-variation
//! divergence from a reference distribution (uniform unless configured).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Occurrence and co-occurrence counts extracted from model generations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    /// How often each demographic group is mentioned.
    pub group_counts: BTreeMap<String, u64>,
    /// Per target term, how often it co-occurs with each group.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cooccurrence: BTreeMap<String, BTreeMap<String, u64>>,
}

/// A validated reference distribution over `groups`; `None` means uniform.
fn resolve_reference(
    groups: &[&str],
    reference: Option<&BTreeMap<String, f64>>,
) -> Result<Vec<f64>> {
    match reference {
        None => Ok(vec![1.0 / groups.len() as f64; groups.len()]),
        Some(reference) => {
            if reference.len() != groups.len()
                || !groups.iter().all(|g| reference.contains_key(*g))
            {
                return Err(Error::invalid(format!(
                    "reference groups {:?} do not match observed groups {groups:?}",
                    reference.keys().collect::<Vec<_>>()
                )));
            }
            let mut probs = Vec::with_capacity(groups.len());
            for g in groups {
                let p = reference[*g];
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::invalid(format!(
                        "reference probability for {g} must be a finite non-negative number"
                    )));
                }
                probs.push(p);
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "reference distribution sums to {total}, expected 1"
                )));
            }
            Ok(probs.into_iter().map(|p| p / total).collect())
        }
    }
}

/// Half the L1 distance between empirical counts (normalized) and reference.
fn tv_from_counts(counts: &[u64], reference: &[f64]) -> Option<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return None;
    }
    let l1: f64 = counts
        .iter()
        .zip(reference)
        .map(|(&c, &r)| (c as f64 / total as f64 - r).abs())
        .sum();
    Some(l1 / 2.0)
}

/// Total-variation distance between the normalized group mention counts and
/// the reference. `None` when every count is zero (missing, not 0).
pub fn representation_bias(
    stats: &GenerationStats,
    reference: Option<&BTreeMap<String, f64>>,
) -> Result<Option<f64>> {
    if stats.group_counts.is_empty() {
        return Err(Error::invalid("representation bias needs at least one group"));
    }
    let groups: Vec<&str> = stats.group_counts.keys().map(String::as_str).collect();
    let reference = resolve_reference(&groups, reference)?;
    let counts: Vec<u64> = stats.group_counts.values().copied().collect();
    Ok(tv_from_counts(&counts, &reference))
}

/// Mean, over target terms with any co-occurrence, of the TV distance between
/// the term's group co-occurrence distribution and the reference. Terms with
/// zero total are skipped; `None` when no term is scorable.
///
/// The group universe is the union of `group_counts` keys and every group
/// seen in `cooccurrence`, so a term touching only one of two known groups is
/// maximally skewed rather than trivially uniform.
pub fn association_bias(
    stats: &GenerationStats,
    reference: Option<&BTreeMap<String, f64>>,
) -> Result<Option<f64>> {
    let mut universe: Vec<&str> = stats.group_counts.keys().map(String::as_str).collect();
    for groups in stats.cooccurrence.values() {
        for g in groups.keys() {
            if !universe.contains(&g.as_str()) {
                universe.push(g.as_str());
            }
        }
    }
    universe.sort_unstable();
    if universe.is_empty() {
        return Err(Error::invalid("association bias needs at least one group"));
    }
    let reference = resolve_reference(&universe, reference)?;

    let mut scores = Vec::new();
    for groups in stats.cooccurrence.values() {
        let counts: Vec<u64> = universe
            .iter()
            .map(|g| groups.get(*g).copied().unwrap_or(0))
            .collect();
        if let Some(tv) = tv_from_counts(&counts, &reference) {
            scores.push(tv);
        }
    }
    if scores.is_empty() {
        return Ok(None);
    }
    Ok(Some(scores.iter().sum::<f64>() / scores.len() as f64))
}
