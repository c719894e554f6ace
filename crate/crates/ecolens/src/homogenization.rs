//! Outcome-profile analysis for instances evaluated by several models:
//! observed failure-count distributions against the independence baseline.
//!
//! The central object is the binary failure matrix. Row `i` is the outcome
//! profile of one instance; `cells[i][j] = 1` means model `j` failed on it.
//! Correlated model failures show up as excess mass at the endpoints of the
//! outcome-count distribution relative to a Poisson-Binomial baseline built
//! from the per-model failure rates alone.

use crate::pbdist::{poisson_binomial_pmf, Pmf, ProbVector};
use crate::{Error, Result};

/// A binary failure matrix over N instances and k models.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureMatrix {
    instance_ids: Vec<String>,
    model_ids: Vec<String>,
    cells: Vec<Vec<u8>>,
}

/// Everything `analyze` derives from one failure matrix.
///
/// `model_failure_rates` is in canonical column order (ascending rate, ties by
/// model id). `endpoint_excess` holds the signed observed-minus-baseline mass
/// differences at t = 0 and t = k; no scalar polarization score is derived.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogenizationReport {
    pub model_failure_rates: Vec<(String, f64)>,
    pub observed: Pmf,
    pub baseline: Pmf,
    pub systemic_failure_rate: f64,
    pub endpoint_excess: (f64, f64),
}

impl FailureMatrix {
    /// Builds a matrix, validating shape, id uniqueness, and cell values.
    pub fn new(
        instance_ids: Vec<String>,
        model_ids: Vec<String>,
        cells: Vec<Vec<u8>>,
    ) -> Result<Self> {
        if instance_ids.is_empty() {
            return Err(Error::invalid("failure matrix needs at least one instance"));
        }
        if model_ids.is_empty() {
            return Err(Error::invalid("failure matrix needs at least one model"));
        }
        check_unique("instance id", &instance_ids)?;
        check_unique("model id", &model_ids)?;
        if cells.len() != instance_ids.len() {
            return Err(Error::invalid(format!(
                "expected {} rows, got {}",
                instance_ids.len(),
                cells.len()
            )));
        }
        for (i, row) in cells.iter().enumerate() {
            if row.len() != model_ids.len() {
                return Err(Error::invalid(format!(
                    "row {i} has {} cells, expected {}",
                    row.len(),
                    model_ids.len()
                )));
            }
            if let Some(bad) = row.iter().find(|&&c| c > 1) {
                return Err(Error::invalid(format!(
                    "row {i} contains cell value {bad}; failure cells must be 0 or 1"
                )));
            }
        }
        Ok(Self {
            instance_ids,
            model_ids,
            cells,
        })
    }

    pub fn n_instances(&self) -> usize {
        self.instance_ids.len()
    }

    pub fn n_models(&self) -> usize {
        self.model_ids.len()
    }

    pub fn instance_ids(&self) -> &[String] {
        &self.instance_ids
    }

    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.cells
    }

    /// Per-model failure rates in the matrix's current column order.
    pub fn failure_rates(&self) -> Vec<f64> {
        let n = self.n_instances() as f64;
        (0..self.n_models())
            .map(|j| self.cells.iter().map(|row| row[j] as u64).sum::<u64>() as f64 / n)
            .collect()
    }

    /// Reorders columns by ascending failure rate, ties by model id.
    /// Idempotent; rows (and therefore row sums) are untouched.
    pub fn canonicalize(&self) -> FailureMatrix {
        let rates = self.failure_rates();
        let mut order: Vec<usize> = (0..self.n_models()).collect();
        order.sort_by(|&a, &b| {
            rates[a]
                .total_cmp(&rates[b])
                .then_with(|| self.model_ids[a].cmp(&self.model_ids[b]))
        });
        FailureMatrix {
            instance_ids: self.instance_ids.clone(),
            model_ids: order.iter().map(|&j| self.model_ids[j].clone()).collect(),
            cells: self
                .cells
                .iter()
                .map(|row| order.iter().map(|&j| row[j]).collect())
                .collect(),
        }
    }

    /// Distribution of per-instance failure counts: mass[t] is the fraction
    /// of instances on which exactly t models fail.
    pub fn observed_distribution(&self) -> Result<Pmf> {
        let mut counts = vec![0u64; self.n_models() + 1];
        for row in &self.cells {
            let t: usize = row.iter().map(|&c| c as usize).sum();
            counts[t] += 1;
        }
        let n = self.n_instances() as f64;
        Pmf::new(counts.into_iter().map(|c| c as f64 / n).collect())
    }

    /// Failure-count distribution under the assumption that models fail
    /// independently at their marginal rates.
    pub fn baseline_distribution(&self) -> Result<Pmf> {
        let rates = ProbVector::new(self.failure_rates())?;
        Ok(poisson_binomial_pmf(&rates))
    }

    /// Fraction of instances on which every model fails.
    pub fn systemic_failure_rate(&self) -> f64 {
        let k = self.n_models();
        let all_ones = self
            .cells
            .iter()
            .filter(|row| row.iter().all(|&c| c == 1))
            .count();
        debug_assert!(k > 0);
        all_ones as f64 / self.n_instances() as f64
    }

    /// Full observed-vs-baseline comparison in canonical column order.
    pub fn analyze(&self) -> Result<HomogenizationReport> {
        let canonical = self.canonicalize();
        let rates = canonical.failure_rates();
        let observed = canonical.observed_distribution()?;
        let baseline = canonical.baseline_distribution()?;
        let k = canonical.n_models();
        let endpoint_excess = (
            observed.at(0) - baseline.at(0),
            observed.at(k) - baseline.at(k),
        );
        Ok(HomogenizationReport {
            model_failure_rates: canonical
                .model_ids
                .iter()
                .cloned()
                .zip(rates)
                .collect(),
            systemic_failure_rate: canonical.systemic_failure_rate(),
            observed,
            baseline,
            endpoint_excess,
        })
    }
}

fn check_unique(what: &str, ids: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::invalid(format!("duplicate {what}: {id}")));
        }
    }
    Ok(())
}
