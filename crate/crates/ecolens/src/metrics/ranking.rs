//! Ranked-retrieval metrics: reciprocal rank and NDCG at a cutoff.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rank cutoff used when none is configured.
pub const DEFAULT_RANK_CUTOFF: usize = 10;

/// One query's ranked output plus its graded relevance judgments.
///
/// Documents missing from `relevance` count as grade 0; judged documents that
/// the ranking missed still raise the ideal DCG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query_id: String,
    pub ranking: Vec<String>,
    #[serde(default)]
    pub relevance: BTreeMap<String, f64>,
}

impl RankedList {
    /// Validates uniqueness of ranked documents and relevance grades.
    pub fn new(
        query_id: String,
        ranking: Vec<String>,
        relevance: BTreeMap<String, f64>,
    ) -> Result<Self> {
        let list = Self {
            query_id,
            ranking,
            relevance,
        };
        list.validate()?;
        Ok(list)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for doc in &self.ranking {
            if !seen.insert(doc) {
                return Err(Error::invalid(format!(
                    "query {}: document {doc} ranked twice",
                    self.query_id
                )));
            }
        }
        for (doc, &grade) in &self.relevance {
            if !grade.is_finite() || grade < 0.0 {
                return Err(Error::invalid(format!(
                    "query {}: relevance of {doc} must be finite and >= 0, got {grade}",
                    self.query_id
                )));
            }
        }
        Ok(())
    }

    fn grade(&self, doc: &str) -> f64 {
        self.relevance.get(doc).copied().unwrap_or(0.0)
    }
}

/// Gain applied to a relevance grade inside DCG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gain {
    /// `2^rel - 1`, the TREC-style choice for graded judgments.
    #[default]
    Exponential,
    /// The grade itself.
    Linear,
}

impl Gain {
    fn apply(self, rel: f64) -> f64 {
        match self {
            Gain::Exponential => rel.exp2() - 1.0,
            Gain::Linear => rel,
        }
    }
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff == 0 {
        return Err(Error::invalid("rank cutoff must be at least 1"));
    }
    Ok(())
}

/// 1/rank of the first relevant document (grade > 0) within the cutoff,
/// or 0 when none appears.
pub fn reciprocal_rank(list: &RankedList, cutoff: usize) -> Result<f64> {
    check_cutoff(cutoff)?;
    list.validate()?;
    for (i, doc) in list.ranking.iter().take(cutoff).enumerate() {
        if list.grade(doc) > 0.0 {
            return Ok(1.0 / (i + 1) as f64);
        }
    }
    Ok(0.0)
}

fn dcg(grades: impl Iterator<Item = f64>, gain: Gain) -> f64 {
    grades
        .enumerate()
        .map(|(i, rel)| gain.apply(rel) / ((i + 2) as f64).log2())
        .sum()
}

/// DCG@cutoff of the ranking divided by the ideal DCG over *all* judged
/// documents truncated at the cutoff; 0 when the ideal DCG is 0.
pub fn ndcg(list: &RankedList, cutoff: usize, gain: Gain) -> Result<f64> {
    check_cutoff(cutoff)?;
    list.validate()?;
    let actual = dcg(
        list.ranking.iter().take(cutoff).map(|doc| list.grade(doc)),
        gain,
    );
    let mut ideal_grades: Vec<f64> = list.relevance.values().copied().collect();
    ideal_grades.sort_by(|a, b| b.total_cmp(a));
    let ideal = dcg(ideal_grades.into_iter().take(cutoff), gain);
    if ideal == 0.0 {
        return Ok(0.0);
    }
    Ok(actual / ideal)
}
