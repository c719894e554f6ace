//! Token-overlap metrics for free-text predictions: word-level F1 and
//! bigram-level ROUGE-2.
//!
//! Normalization is lowercasing plus whitespace tokenization, nothing else;
//! alternate pipelines can reproduce these scores bit-for-bit.

use std::collections::HashMap;

use crate::{Error, Result};

use super::PredictionRecord;

fn tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn counts<T: std::hash::Hash + Eq>(items: impl Iterator<Item = T>) -> HashMap<T, usize> {
    let mut map = HashMap::new();
    for item in items {
        *map.entry(item).or_insert(0) += 1;
    }
    map
}

fn multiset_overlap<T: std::hash::Hash + Eq>(a: &HashMap<T, usize>, b: &HashMap<T, usize>) -> usize {
    a.iter()
        .map(|(item, &n)| n.min(b.get(item).copied().unwrap_or(0)))
        .sum()
}

/// F1 = 2·overlap / (|gold| + |pred|), which equals the harmonic mean of
/// multiset precision and recall and is exact in integer arithmetic.
fn overlap_f1(gold_len: usize, pred_len: usize, overlap: usize) -> f64 {
    if gold_len == 0 && pred_len == 0 {
        return 1.0;
    }
    if gold_len == 0 || pred_len == 0 {
        return 0.0;
    }
    (2 * overlap) as f64 / (gold_len + pred_len) as f64
}

/// Harmonic mean of token precision and recall over the multiset overlap.
/// Two empty texts score 1.
pub fn token_f1(gold: &str, predicted: &str) -> f64 {
    let g = tokens(gold);
    let p = tokens(predicted);
    let overlap = multiset_overlap(&counts(g.iter()), &counts(p.iter()));
    overlap_f1(g.len(), p.len(), overlap)
}

/// F1 over bigram multiset overlap. A side with fewer than two tokens has no
/// bigrams and scores 0 against any non-empty side; two bigram-free sides
/// score 1.
pub fn rouge_2(gold: &str, predicted: &str) -> f64 {
    let g = tokens(gold);
    let p = tokens(predicted);
    let g_bigrams: Vec<(&str, &str)> = g.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
    let p_bigrams: Vec<(&str, &str)> = p.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
    let overlap = multiset_overlap(&counts(g_bigrams.iter()), &counts(p_bigrams.iter()));
    overlap_f1(g_bigrams.len(), p_bigrams.len(), overlap)
}

/// Mean token F1 over a log.
pub fn mean_token_f1(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::invalid("mean token F1 of an empty log is undefined"));
    }
    let total: f64 = records.iter().map(|r| token_f1(&r.gold, &r.predicted)).sum();
    Ok(total / records.len() as f64)
}

/// Mean ROUGE-2 over a log.
pub fn mean_rouge_2(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::invalid("mean ROUGE-2 of an empty log is undefined"));
    }
    let total: f64 = records.iter().map(|r| rouge_2(&r.gold, &r.predicted)).sum();
    Ok(total / records.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn token_f1_hand_cases() {
        assert_eq!(token_f1("The cat sat", "the cat sat"), 1.0);
        assert_eq!(token_f1("a b", "c d"), 0.0);
        assert_eq!(token_f1("a b c", "a b d"), 2.0 / 3.0);
        assert_eq!(token_f1("", ""), 1.0);
        assert_eq!(token_f1("a", ""), 0.0);
        // Multiset: repeated tokens only match as often as they occur.
        assert_eq!(token_f1("a a b", "a a a"), 2.0 * 2.0 / 6.0);
    }

    #[test]
    fn rouge_2_hand_cases() {
        assert_eq!(rouge_2("the cat sat on the mat", "the cat sat on the mat"), 1.0);
        assert_eq!(rouge_2("a b c", "x y z"), 0.0);
        assert_eq!(rouge_2("the cat sat", "the cat ran"), 0.5);
        // Single tokens have no bigrams.
        assert_eq!(rouge_2("a", "a"), 1.0);
        assert_eq!(rouge_2("a", "a b"), 0.0);
        assert_eq!(rouge_2("", ""), 1.0);
    }

    #[test]
    fn mean_variants_average_per_record_scores() {
        let records = vec![
            PredictionRecord {
                instance_id: "a".into(),
                gold: "the cat sat".into(),
                predicted: "the cat sat".into(),
                confidence: None,
                group_tags: vec![],
                perturbation: None,
            },
            PredictionRecord {
                instance_id: "b".into(),
                gold: "the cat sat".into(),
                predicted: "the cat ran".into(),
                confidence: None,
                group_tags: vec![],
                perturbation: None,
            },
        ];
        assert_eq!(mean_rouge_2(&records).unwrap(), 0.75);
        assert!(mean_token_f1(&[]).is_err());
    }

    fn text_strategy() -> impl Strategy<Value = String> {
        proptest::collection::vec("[a-d]{1,3}", 0..8).prop_map(|words| words.join(" "))
    }

    proptest! {
        #[test]
        fn overlap_metrics_are_symmetric(a in text_strategy(), b in text_strategy()) {
            prop_assert_eq!(token_f1(&a, &b), token_f1(&b, &a));
            prop_assert_eq!(rouge_2(&a, &b), rouge_2(&b, &a));
        }

        #[test]
        fn perfect_score_means_equal_multisets(a in text_strategy(), b in text_strategy()) {
            let mut a_tokens: Vec<_> = a.split_whitespace().collect();
            let mut b_tokens: Vec<_> = b.split_whitespace().collect();
            a_tokens.sort_unstable();
            b_tokens.sort_unstable();
            prop_assert_eq!(token_f1(&a, &b) == 1.0, a_tokens == b_tokens);
        }

        #[test]
        fn scores_stay_in_unit_interval(a in text_strategy(), b in text_strategy()) {
            let f1 = token_f1(&a, &b);
            let r2 = rouge_2(&a, &b);
            prop_assert!((0.0..=1.0).contains(&f1));
            prop_assert!((0.0..=1.0).contains(&r2));
        }
    }
}
