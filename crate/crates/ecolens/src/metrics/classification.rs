//! Accuracy-family metrics: exact match, calibration, selective prediction,
//! worst-case robustness, and per-group disparities.

use std::collections::BTreeMap;

use crate::{Error, Result};

use super::PredictionRecord;

/// Equal-mass bin count used when none is configured.
pub const DEFAULT_ECE_BINS: usize = 10;

/// Mean exact-match correctness.
pub fn accuracy(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::invalid("accuracy of an empty log is undefined"));
    }
    let correct = records.iter().filter(|r| r.is_correct()).count();
    Ok(correct as f64 / records.len() as f64)
}

fn confidence_of(r: &PredictionRecord) -> Result<f64> {
    let c = r.confidence.ok_or_else(|| {
        Error::invalid(format!("record {} has no confidence", r.instance_id))
    })?;
    if !c.is_finite() || !(0.0..=1.0).contains(&c) {
        return Err(Error::invalid(format!(
            "record {} has confidence {c}, expected [0, 1]",
            r.instance_id
        )));
    }
    Ok(c)
}

/// Expected calibration error over `bins` equal-mass bins.
///
/// Records are stably sorted by ascending confidence and split into
/// contiguous bins whose sizes differ by at most one; when N is not a
/// multiple of `bins`, the lowest-confidence bins take one extra record.
pub fn ece(records: &[PredictionRecord], bins: usize) -> Result<f64> {
    if bins == 0 {
        return Err(Error::invalid("ece needs at least one bin"));
    }
    if records.len() < bins {
        return Err(Error::invalid(format!(
            "ece with {bins} bins needs at least {bins} records, got {}",
            records.len()
        )));
    }
    let mut scored: Vec<(f64, bool)> = records
        .iter()
        .map(|r| Ok((confidence_of(r)?, r.is_correct())))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = scored.len();
    let base = n / bins;
    let remainder = n % bins;
    let mut error = 0.0;
    let mut start = 0;
    for b in 0..bins {
        let size = base + usize::from(b < remainder);
        let bin = &scored[start..start + size];
        start += size;
        let mean_conf: f64 = bin.iter().map(|(c, _)| c).sum::<f64>() / size as f64;
        let acc = bin.iter().filter(|(_, ok)| *ok).count() as f64 / size as f64;
        error += (size as f64 / n as f64) * (mean_conf - acc).abs();
    }
    Ok(error)
}

/// Indices of `records` sorted by descending confidence, stable so that ties
/// keep input order.
fn descending_confidence_order(records: &[PredictionRecord]) -> Result<Vec<usize>> {
    let confidences: Vec<f64> = records.iter().map(confidence_of).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| confidences[b].total_cmp(&confidences[a]));
    Ok(order)
}

fn accuracy_of_top(records: &[PredictionRecord], order: &[usize], m: usize) -> f64 {
    let correct = order[..m]
        .iter()
        .filter(|&&i| records[i].is_correct())
        .count();
    correct as f64 / m as f64
}

/// Accuracy over the `ceil(coverage * N)` records with highest confidence.
pub fn selective_accuracy(records: &[PredictionRecord], coverage: f64) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::invalid("selective accuracy of an empty log is undefined"));
    }
    if !coverage.is_finite() || coverage <= 0.0 || coverage > 1.0 {
        return Err(Error::invalid(format!(
            "coverage must lie in (0, 1], got {coverage}"
        )));
    }
    let n = records.len();
    let m = ((coverage * n as f64).ceil() as usize).clamp(1, n);
    let order = descending_confidence_order(records)?;
    Ok(accuracy_of_top(records, &order, m))
}

/// Selective accuracy at every coverage i/N for i = 1..N, as (coverage,
/// accuracy) pairs suitable for plotting.
pub fn coverage_accuracy_curve(records: &[PredictionRecord]) -> Result<Vec<(f64, f64)>> {
    if records.is_empty() {
        return Err(Error::invalid("coverage-accuracy curve of an empty log is undefined"));
    }
    let order = descending_confidence_order(records)?;
    let n = records.len();
    let mut correct_so_far = 0usize;
    let mut curve = Vec::with_capacity(n);
    for (rank, &i) in order.iter().enumerate() {
        let m = rank + 1;
        correct_so_far += usize::from(records[i].is_correct());
        curve.push((m as f64 / n as f64, correct_so_far as f64 / m as f64));
    }
    Ok(curve)
}

/// Mean selective accuracy over coverages i/N for i = 1..N: the area under
/// the coverage-accuracy curve.
pub fn coverage_accuracy_auc(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::invalid("coverage-accuracy AUC of an empty log is undefined"));
    }
    let curve = coverage_accuracy_curve(records)?;
    let total: f64 = curve.iter().map(|&(_, acc)| acc).sum();
    Ok(total / curve.len() as f64)
}

/// Fraction of instances on which every perturbation variant (including the
/// original) is predicted correctly.
pub fn worst_case_accuracy(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::invalid("worst-case accuracy of an empty log is undefined"));
    }
    let mut groups: BTreeMap<&str, (bool, bool)> = BTreeMap::new();
    for r in records {
        let entry = groups.entry(r.instance_id.as_str()).or_insert((false, true));
        entry.0 |= r.is_original();
        entry.1 &= r.is_correct();
    }
    for (instance, (has_original, _)) in &groups {
        if !has_original {
            return Err(Error::invalid(format!(
                "instance {instance} has no original variant"
            )));
        }
    }
    let passing = groups.values().filter(|(_, all_ok)| *all_ok).count();
    Ok(passing as f64 / groups.len() as f64)
}

/// Accuracy restricted to the records carrying each group tag. Groups with no
/// records simply do not appear.
pub fn performance_disparities(records: &[PredictionRecord]) -> BTreeMap<String, f64> {
    let mut tallies: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in records {
        for tag in &r.group_tags {
            let (total, correct) = tallies.entry(tag.as_str()).or_insert((0, 0));
            *total += 1;
            *correct += usize::from(r.is_correct());
        }
    }
    tallies
        .into_iter()
        .map(|(tag, (total, correct))| (tag.to_string(), correct as f64 / total as f64))
        .collect()
}
