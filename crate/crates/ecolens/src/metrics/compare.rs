//! Cross-model comparison: head-to-head win rates over a model-by-scenario
//! score table, and per-scenario correlation between two metrics.

use std::collections::{BTreeMap, BTreeSet};

use crate::{Error, Result};

/// A model-by-scenario score table; cells may be absent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    cells: BTreeMap<(String, String), f64>,
}

impl ScoreTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the score of `model` on `scenario`, replacing any previous value.
    pub fn insert(&mut self, model: &str, scenario: &str, score: f64) -> Result<()> {
        if !score.is_finite() {
            return Err(Error::invalid(format!(
                "score of {model} on {scenario} must be finite"
            )));
        }
        self.cells
            .insert((model.to_string(), scenario.to_string()), score);
        Ok(())
    }

    pub fn get(&self, model: &str, scenario: &str) -> Option<f64> {
        self.cells
            .get(&(model.to_string(), scenario.to_string()))
            .copied()
    }

    pub fn models(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.cells.keys().map(|(m, _)| m).collect();
        set.into_iter().cloned().collect()
    }

    pub fn scenarios(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.cells.keys().map(|(_, s)| s).collect();
        set.into_iter().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Win/comparison tally for one model. Wins accrue in halves, so the count is
/// exact in f64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinRecord {
    pub wins: f64,
    pub comparisons: usize,
}

impl WinRecord {
    pub fn rate(&self) -> f64 {
        self.wins / self.comparisons as f64
    }
}

/// Pairwise win rates across all scenarios where both models of a pair have
/// scores. A win counts 1, a loss 0, a tie 0.5 for each side; models that are
/// never comparable map to `None`.
pub fn head_to_head_win_rates(
    table: &ScoreTable,
    higher_is_better: bool,
) -> Result<BTreeMap<String, Option<WinRecord>>> {
    let models = table.models();
    if models.len() < 2 {
        return Err(Error::invalid("win rates need at least two models"));
    }
    let scenarios = table.scenarios();
    let mut tallies: BTreeMap<&str, WinRecord> = models
        .iter()
        .map(|m| {
            (
                m.as_str(),
                WinRecord {
                    wins: 0.0,
                    comparisons: 0,
                },
            )
        })
        .collect();
    for (i, a) in models.iter().enumerate() {
        for b in &models[i + 1..] {
            for scenario in &scenarios {
                let (Some(sa), Some(sb)) = (table.get(a, scenario), table.get(b, scenario)) else {
                    continue;
                };
                let (a_wins, b_wins) = match sa.partial_cmp(&sb).expect("scores are finite") {
                    std::cmp::Ordering::Equal => (0.5, 0.5),
                    std::cmp::Ordering::Greater if higher_is_better => (1.0, 0.0),
                    std::cmp::Ordering::Less if !higher_is_better => (1.0, 0.0),
                    _ => (0.0, 1.0),
                };
                let ta = tallies.get_mut(a.as_str()).unwrap();
                ta.wins += a_wins;
                ta.comparisons += 1;
                let tb = tallies.get_mut(b.as_str()).unwrap();
                tb.wins += b_wins;
                tb.comparisons += 1;
            }
        }
    }
    Ok(models
        .iter()
        .map(|m| {
            let t = tallies[m.as_str()];
            (m.clone(), (t.comparisons > 0).then_some(t))
        })
        .collect())
}

/// Correlation method for [`metric_correlation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
}

/// Per-scenario coefficients plus their mean over defined scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    /// `None` marks scenarios with fewer than two jointly scored models or a
    /// zero-variance metric; those are excluded from the summary.
    pub per_scenario: BTreeMap<String, Option<f64>>,
    pub summary: Option<f64>,
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx).powi(2);
        vy += (y - my).powi(2);
    }
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx.sqrt() * vy.sqrt()))
}

/// Average ranks (1-based), ties sharing the mean of their rank range.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}

/// Correlates two metrics' per-scenario model scores.
///
/// Scenarios come from the union of both tables; a scenario contributes a
/// coefficient only when at least two models carry both metrics and neither
/// metric is constant there. The summary is the mean over defined scenarios.
pub fn metric_correlation(
    metric_a: &ScoreTable,
    metric_b: &ScoreTable,
    method: CorrelationMethod,
) -> CorrelationReport {
    let scenarios: BTreeSet<String> = metric_a
        .scenarios()
        .into_iter()
        .chain(metric_b.scenarios())
        .collect();
    let models: BTreeSet<String> = metric_a
        .models()
        .into_iter()
        .chain(metric_b.models())
        .collect();

    let mut per_scenario = BTreeMap::new();
    for scenario in scenarios {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for model in &models {
            if let (Some(x), Some(y)) = (
                metric_a.get(model, &scenario),
                metric_b.get(model, &scenario),
            ) {
                xs.push(x);
                ys.push(y);
            }
        }
        let coefficient = if xs.len() < 2 {
            None
        } else {
            match method {
                CorrelationMethod::Pearson => pearson(&xs, &ys),
                CorrelationMethod::Spearman => {
                    pearson(&average_ranks(&xs), &average_ranks(&ys))
                }
            }
        };
        per_scenario.insert(scenario, coefficient);
    }
    let defined: Vec<f64> = per_scenario.values().flatten().copied().collect();
    let summary = if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    };
    CorrelationReport {
        per_scenario,
        summary,
    }
}
