//! Per-scenario evaluation metrics over prediction logs, ranked lists, and
//! generation statistics, plus cross-model comparison (win rates, metric
//! correlations).
//!
//! Every function here is pure and deterministic; per-scenario computations
//! are independent, and all map-like results use ordered keys.

mod bias;
mod classification;
mod compare;
mod ranking;
mod text;
mod toxicity;

pub use bias::{association_bias, representation_bias, GenerationStats};
pub use classification::{
    accuracy, coverage_accuracy_auc, coverage_accuracy_curve, ece, performance_disparities,
    selective_accuracy, worst_case_accuracy, DEFAULT_ECE_BINS,
};
pub use compare::{
    head_to_head_win_rates, metric_correlation, CorrelationMethod, CorrelationReport, ScoreTable,
    WinRecord,
};
pub use ranking::{ndcg, reciprocal_rank, Gain, RankedList, DEFAULT_RANK_CUTOFF};
pub use text::{mean_rouge_2, mean_token_f1, rouge_2, token_f1};
pub use toxicity::{toxicity_rate, MockScorer, ToxicityScorer, DEFAULT_TOXICITY_THRESHOLD};

#[cfg(feature = "http-scorer")]
pub use toxicity::HttpScorer;

use serde::{Deserialize, Serialize};

/// Variant id that marks an unperturbed instance.
pub const ORIGINAL_VARIANT: &str = "original";

/// One perturbed (or original) rendering of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perturbation {
    pub family: String,
    pub variant: String,
}

/// One scored model prediction.
///
/// `gold` and `predicted` hold labels for classification tasks and reference /
/// generated text otherwise; correctness is always exact string match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub instance_id: String,
    pub gold: String,
    pub predicted: String,
    /// Probability the model assigned to the emitted prediction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    /// Named group memberships of the data subject, for disparity slicing.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub group_tags: Vec<String>,
    /// Absent on unperturbed records; `variant == "original"` also marks the
    /// unperturbed rendering inside a perturbation family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

impl PredictionRecord {
    /// Exact-match correctness.
    pub fn is_correct(&self) -> bool {
        self.gold == self.predicted
    }

    /// True when the record is an unperturbed rendering of its instance.
    pub fn is_original(&self) -> bool {
        match &self.perturbation {
            None => true,
            Some(p) => p.variant == ORIGINAL_VARIANT,
        }
    }
}
