//! Table builders for the homogenize, metrics, efficiency, and scaling
//! subcommands. Each builder owns its table layouts; names and columns are
//! stable so downstream tooling can key on them.

use rayon::prelude::*;

use super::RunError;
use crate::efficiency::{
    denoised_runtime, idealized_runtime, training_emissions, training_energy,
};
use crate::ingest::{Bundle, DatasetManifest};
use crate::metrics::{
    accuracy, association_bias, coverage_accuracy_auc, coverage_accuracy_curve, ece,
    head_to_head_win_rates, mean_rouge_2, mean_token_f1, metric_correlation, ndcg,
    performance_disparities, reciprocal_rank, representation_bias, worst_case_accuracy,
    CorrelationMethod, Gain, PredictionRecord, ScoreTable, DEFAULT_ECE_BINS,
    DEFAULT_RANK_CUTOFF,
};
use crate::report::{Cell, Table};
use crate::scaling::{detect_emergence, EmergenceVerdict};

/// The status written when a prediction log cannot be calibrated or scored
/// for toxicity; tables always carry the reason instead of dropping rows.
const NO_CONFIDENCES: &str = "skipped: no confidences";

pub(super) fn homogenization(bundle: &Bundle) -> Result<Vec<Table>, RunError> {
    let matrices = bundle.failure_matrices();
    if matrices.is_empty() {
        return Err(RunError::data("bundle has no failure_matrix datasets"));
    }
    let analyzed = matrices
        .par_iter()
        .map(|(manifest, matrix)| {
            matrix
                .analyze()
                .map(|report| (manifest.name.as_str(), *matrix, report))
                .map_err(|e| RunError::data(format!("dataset {}: {e}", manifest.name)))
        })
        .collect::<Result<Vec<_>, RunError>>()?;

    let mut rates = Table::new("failure_rates", &["dataset", "model", "failure_rate"]);
    let mut distribution = Table::new(
        "outcome_distribution",
        &["dataset", "failures", "observed_mass", "baseline_mass"],
    );
    let mut summary = Table::new(
        "homogenization_summary",
        &[
            "dataset",
            "instances",
            "models",
            "systemic_failure_rate",
            "excess_none_fail",
            "excess_all_fail",
        ],
    );
    for (name, matrix, report) in &analyzed {
        for (model, rate) in &report.model_failure_rates {
            rates.push(vec![(*name).into(), model.as_str().into(), (*rate).into()]);
        }
        for t in 0..=matrix.n_models() {
            distribution.push(vec![
                (*name).into(),
                t.into(),
                report.observed.at(t).into(),
                report.baseline.at(t).into(),
            ]);
        }
        summary.push(vec![
            (*name).into(),
            matrix.n_instances().into(),
            matrix.n_models().into(),
            report.systemic_failure_rate.into(),
            report.endpoint_excess.0.into(),
            report.endpoint_excess.1.into(),
        ]);
    }
    Ok(vec![rates, distribution, summary])
}

/// Everything one prediction log contributes, computed in parallel across
/// logs and assembled into tables sequentially to keep row order fixed.
struct LogReport {
    dataset: String,
    scenario: String,
    model: String,
    named: Vec<(&'static str, f64)>,
    calibration_status: String,
    ece: Option<f64>,
    auc: Option<f64>,
    curve: Vec<(f64, f64)>,
    disparities: Vec<(String, f64)>,
    toxicity_status: String,
    toxicity: Option<f64>,
    accuracy: f64,
    token_f1: f64,
    rouge_2: f64,
}

fn log_identity(manifest: &DatasetManifest) -> (String, String) {
    let scenario = manifest.scenario.clone().unwrap_or_else(|| "default".to_string());
    let model = manifest.model.clone().unwrap_or_else(|| manifest.name.clone());
    (scenario, model)
}

fn analyze_log(
    manifest: &DatasetManifest,
    records: &[PredictionRecord],
) -> Result<LogReport, RunError> {
    let ctx = |e: crate::Error| RunError::data(format!("dataset {}: {e}", manifest.name));
    let originals: Vec<PredictionRecord> =
        records.iter().filter(|r| r.is_original()).cloned().collect();
    if originals.is_empty() {
        return Err(RunError::data(format!(
            "dataset {}: no unperturbed records to score",
            manifest.name
        )));
    }
    let accuracy_value = accuracy(&originals).map_err(ctx)?;
    let token_f1 = mean_token_f1(&originals).map_err(ctx)?;
    let rouge_2 = mean_rouge_2(&originals).map_err(ctx)?;
    let mut named = vec![
        ("accuracy", accuracy_value),
        ("token_f1", token_f1),
        ("rouge_2", rouge_2),
    ];
    if originals.len() < records.len() {
        named.push(("worst_case_accuracy", worst_case_accuracy(records).map_err(ctx)?));
    }

    let with_confidence = originals.iter().filter(|r| r.confidence.is_some()).count();
    let (calibration_status, ece_value, auc, curve) = if with_confidence == originals.len() {
        (
            "ok".to_string(),
            Some(ece(&originals, DEFAULT_ECE_BINS).map_err(ctx)?),
            Some(coverage_accuracy_auc(&originals).map_err(ctx)?),
            coverage_accuracy_curve(&originals).map_err(ctx)?,
        )
    } else if with_confidence == 0 {
        (NO_CONFIDENCES.to_string(), None, None, Vec::new())
    } else {
        (
            "skipped: incomplete confidences".to_string(),
            None,
            None,
            Vec::new(),
        )
    };

    let disparities = performance_disparities(&originals).into_iter().collect();
    let (scenario, model) = log_identity(manifest);
    let (toxicity_status, toxicity) = score_toxicity(manifest, &originals)?;
    Ok(LogReport {
        dataset: manifest.name.clone(),
        scenario,
        model,
        named,
        calibration_status,
        ece: ece_value,
        auc,
        curve,
        disparities,
        toxicity_status,
        toxicity,
        accuracy: accuracy_value,
        token_f1,
        rouge_2,
    })
}

#[cfg(not(feature = "http-scorer"))]
fn score_toxicity(
    _manifest: &DatasetManifest,
    _records: &[PredictionRecord],
) -> Result<(String, Option<f64>), RunError> {
    Ok(("skipped: no toxicity scorer".to_string(), None))
}

#[cfg(feature = "http-scorer")]
fn score_toxicity(
    manifest: &DatasetManifest,
    records: &[PredictionRecord],
) -> Result<(String, Option<f64>), RunError> {
    use crate::metrics::{toxicity_rate, HttpScorer, ToxicityScorer, DEFAULT_TOXICITY_THRESHOLD};

    let Ok(endpoint) = std::env::var(super::TOXICITY_ENDPOINT_ENV) else {
        return Ok(("skipped: no toxicity scorer".to_string(), None));
    };
    let scorer = HttpScorer::from_env(endpoint, super::TOXICITY_KEY_ENV)
        .map_err(|e| RunError::config(e.to_string()))?;
    let texts: Vec<String> = records.iter().map(|r| r.predicted.clone()).collect();
    let scores = scorer
        .score(&texts)
        .map_err(|e| RunError::data(format!("dataset {}: {e}", manifest.name)))?;
    let rate = toxicity_rate(&scores, DEFAULT_TOXICITY_THRESHOLD)
        .map_err(|e| RunError::data(format!("dataset {}: {e}", manifest.name)))?;
    Ok(("ok".to_string(), Some(rate)))
}

pub(super) fn metrics(bundle: &Bundle) -> Result<Vec<Table>, RunError> {
    let logs = bundle.prediction_logs();
    let lists = bundle.ranked_lists();
    let stats = bundle.generation_stats();
    if logs.is_empty() && lists.is_empty() && stats.is_empty() {
        return Err(RunError::data(
            "bundle has no prediction_log, ranked_lists, or generation_stats datasets",
        ));
    }

    let reports = logs
        .par_iter()
        .map(|(manifest, records)| analyze_log(manifest, records))
        .collect::<Result<Vec<_>, RunError>>()?;

    let mut scenario_metrics = Table::new(
        "scenario_metrics",
        &["dataset", "scenario", "model", "metric", "value"],
    );
    let mut calibration = Table::new(
        "calibration",
        &["dataset", "scenario", "model", "status", "ece", "coverage_accuracy_auc"],
    );
    let mut coverage = Table::new(
        "coverage_accuracy",
        &["dataset", "scenario", "model", "coverage", "selective_accuracy"],
    );
    let mut disparities = Table::new(
        "group_disparities",
        &["dataset", "scenario", "model", "group", "accuracy"],
    );
    let mut toxicity = Table::new(
        "toxicity",
        &["dataset", "scenario", "model", "status", "toxicity_rate"],
    );
    for r in &reports {
        let id = |table: &mut Table, rest: Vec<Cell>| {
            let mut row = vec![
                Cell::text(&r.dataset),
                Cell::text(&r.scenario),
                Cell::text(&r.model),
            ];
            row.extend(rest);
            table.push(row);
        };
        for (metric, value) in &r.named {
            id(&mut scenario_metrics, vec![(*metric).into(), (*value).into()]);
        }
        id(
            &mut calibration,
            vec![
                r.calibration_status.as_str().into(),
                Cell::opt_float(r.ece),
                Cell::opt_float(r.auc),
            ],
        );
        for &(cov, acc) in &r.curve {
            id(&mut coverage, vec![cov.into(), acc.into()]);
        }
        for (group, acc) in &r.disparities {
            id(&mut disparities, vec![group.as_str().into(), (*acc).into()]);
        }
        id(
            &mut toxicity,
            vec![r.toxicity_status.as_str().into(), Cell::opt_float(r.toxicity)],
        );
    }

    let ranking_rows = lists
        .par_iter()
        .map(|(manifest, ranked)| {
            let ctx = |e: crate::Error| RunError::data(format!("dataset {}: {e}", manifest.name));
            let mut mrr_total = 0.0;
            let mut ndcg_total = 0.0;
            for list in *ranked {
                mrr_total += reciprocal_rank(list, DEFAULT_RANK_CUTOFF).map_err(ctx)?;
                ndcg_total += ndcg(list, DEFAULT_RANK_CUTOFF, Gain::Exponential).map_err(ctx)?;
            }
            if ranked.is_empty() {
                return Err(RunError::data(format!(
                    "dataset {}: no ranked lists to score",
                    manifest.name
                )));
            }
            let n = ranked.len() as f64;
            let (scenario, model) = log_identity(manifest);
            Ok((manifest.name.clone(), scenario, model, mrr_total / n, ndcg_total / n))
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    for (dataset, scenario, model, mrr, mean_ndcg) in &ranking_rows {
        for (metric, value) in [("mean_reciprocal_rank@10", mrr), ("mean_ndcg@10", mean_ndcg)] {
            scenario_metrics.push(vec![
                dataset.as_str().into(),
                scenario.as_str().into(),
                model.as_str().into(),
                metric.into(),
                (*value).into(),
            ]);
        }
    }

    let (win_rates, correlations) = compare_models(&reports)?;

    let mut bias = Table::new(
        "generation_bias",
        &["dataset", "representation_bias", "association_bias"],
    );
    for (manifest, gen_stats) in &stats {
        let ctx = |e: crate::Error| RunError::data(format!("dataset {}: {e}", manifest.name));
        let representation = representation_bias(gen_stats, None).map_err(ctx)?;
        let association = association_bias(gen_stats, None).map_err(ctx)?;
        bias.push(vec![
            manifest.name.as_str().into(),
            Cell::opt_float(representation),
            Cell::opt_float(association),
        ]);
    }

    Ok(vec![
        scenario_metrics,
        calibration,
        coverage,
        disparities,
        win_rates,
        correlations,
        bias,
        toxicity,
    ])
}

/// Cross-model comparison needs at least two models; with fewer, both tables
/// come back empty and are dropped at the top level.
fn compare_models(reports: &[LogReport]) -> Result<(Table, Table), RunError> {
    let mut win_rates = Table::new(
        "win_rates",
        &["model", "wins", "comparisons", "win_rate"],
    );
    let mut correlations = Table::new(
        "metric_correlations",
        &["metric_a", "metric_b", "method", "scenario", "coefficient"],
    );
    let mut models: Vec<&str> = reports.iter().map(|r| r.model.as_str()).collect();
    models.sort_unstable();
    models.dedup();
    if models.len() < 2 {
        return Ok((win_rates, correlations));
    }

    let mut acc = ScoreTable::new();
    let mut f1 = ScoreTable::new();
    let mut rouge = ScoreTable::new();
    for r in reports {
        for (table, score) in [(&mut acc, r.accuracy), (&mut f1, r.token_f1), (&mut rouge, r.rouge_2)] {
            table.insert(&r.model, &r.scenario, score).map_err(|e| {
                RunError::data(format!(
                    "prediction logs collide on model {} in scenario {}: {e}",
                    r.model, r.scenario
                ))
            })?;
        }
    }

    for (model, record) in head_to_head_win_rates(&acc, true)? {
        match record {
            Some(record) => win_rates.push(vec![
                model.into(),
                record.wins.into(),
                record.comparisons.into(),
                record.rate().into(),
            ]),
            None => win_rates.push(vec![model.into(), Cell::Missing, 0usize.into(), Cell::Missing]),
        }
    }

    let pairs = [
        ("accuracy", "token_f1", &acc, &f1),
        ("accuracy", "rouge_2", &acc, &rouge),
        ("token_f1", "rouge_2", &f1, &rouge),
    ];
    let methods = [
        ("pearson", CorrelationMethod::Pearson),
        ("spearman", CorrelationMethod::Spearman),
    ];
    for (name_a, name_b, table_a, table_b) in pairs {
        for (method_name, method) in methods {
            let report = metric_correlation(table_a, table_b, method);
            for (scenario, coefficient) in &report.per_scenario {
                correlations.push(vec![
                    name_a.into(),
                    name_b.into(),
                    method_name.into(),
                    scenario.as_str().into(),
                    Cell::opt_float(*coefficient),
                ]);
            }
            correlations.push(vec![
                name_a.into(),
                name_b.into(),
                method_name.into(),
                "(summary)".into(),
                Cell::opt_float(report.summary),
            ]);
        }
    }
    Ok((win_rates, correlations))
}

pub(super) fn efficiency(bundle: &Bundle) -> Result<Vec<Table>, RunError> {
    let specs = bundle.hardware_specs();
    let samples = bundle.runtime_samples();
    if specs.is_empty() && samples.is_empty() {
        return Err(RunError::data(
            "bundle has no hardware_spec or runtime_samples datasets",
        ));
    }
    let mut training = Table::new(
        "training_efficiency",
        &[
            "dataset",
            "gpus",
            "gpu_power_kw",
            "train_hours",
            "pue",
            "energy_kwh",
            "carbon_intensity",
            "emissions_kg",
        ],
    );
    let mut ideal = Table::new(
        "idealized_runtime",
        &[
            "dataset",
            "workload",
            "prompt_tokens",
            "output_tokens",
            "bucket_prompt_tokens",
            "bucket_exceeded",
            "seconds",
        ],
    );
    let mut denoised = Table::new("denoised_runtime", &["dataset", "percentile", "seconds"]);
    for (manifest, spec) in &specs {
        let ctx = |e: crate::Error| RunError::data(format!("dataset {}: {e}", manifest.name));
        let energy = training_energy(&spec.training).map_err(ctx)?;
        let emissions = training_emissions(energy, spec.training.c_region).map_err(ctx)?;
        training.push(vec![
            manifest.name.as_str().into(),
            spec.training.n_gpu.into(),
            spec.training.w_gpu.into(),
            spec.training.t_train.into(),
            spec.training.pue.into(),
            energy.into(),
            spec.training.c_region.into(),
            emissions.into(),
        ]);
        if let Some(model) = &spec.runtime_model {
            for workload in &spec.workloads {
                let runtime =
                    idealized_runtime(workload.prompt_tokens, workload.output_tokens, model)
                        .map_err(ctx)?;
                ideal.push(vec![
                    manifest.name.as_str().into(),
                    workload.name.as_str().into(),
                    workload.prompt_tokens.into(),
                    workload.output_tokens.into(),
                    runtime.bucket.into(),
                    Cell::bool(runtime.bucket_exceeded),
                    runtime.seconds.into(),
                ]);
            }
        }
    }
    for (manifest, runtime_samples) in &samples {
        let ctx = |e: crate::Error| RunError::data(format!("dataset {}: {e}", manifest.name));
        for percentile in [0.0, 50.0, 90.0, 99.0] {
            let seconds = denoised_runtime(&runtime_samples.samples, percentile).map_err(ctx)?;
            denoised.push(vec![manifest.name.as_str().into(), percentile.into(), seconds.into()]);
        }
    }
    Ok(vec![training, ideal, denoised])
}

pub(super) fn scaling(bundle: &Bundle, eps: f64, delta: f64) -> Result<Vec<Table>, RunError> {
    let curves = bundle.scaling_curves();
    if curves.is_empty() {
        return Err(RunError::data("bundle has no scaling_curve datasets"));
    }
    let mut emergence = Table::new(
        "emergence",
        &[
            "dataset",
            "points",
            "random_baseline",
            "near_random_tol",
            "jump_min",
            "emergent",
            "threshold_scale",
        ],
    );
    for (manifest, curve) in &curves {
        let verdict = detect_emergence(curve, eps, delta)
            .map_err(|e| RunError::data(format!("dataset {}: {e}", manifest.name)))?;
        // Scales span many orders of magnitude, so the threshold is emitted
        // in scientific notation rather than as a fixed-precision float.
        let (emergent, threshold) = match verdict {
            EmergenceVerdict::Emergent { threshold_scale } => {
                (true, Cell::text(format!("{threshold_scale:e}")))
            }
            EmergenceVerdict::NotEmergent => (false, Cell::Missing),
        };
        emergence.push(vec![
            manifest.name.as_str().into(),
            curve.points().len().into(),
            curve.random_baseline().into(),
            eps.into(),
            delta.into(),
            Cell::bool(emergent),
            threshold,
        ]);
    }
    Ok(vec![emergence])
}
