//! Per-kind file loaders. Every loader validates the target type's
//! invariants and reports failures as (file, line, field) triples.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use super::{
    Dataset, DatasetKind, DatasetManifest, HardwareSpec, IngestError, ManifestDoc,
    RuntimeSamples, SHEET_COLUMNS,
};
use crate::homogenization::FailureMatrix;
use crate::index::{IndicatorSchema, ScoreSheet, ScoreValue};
use crate::metrics::{GenerationStats, PredictionRecord, RankedList};
use crate::scaling::{CurvePoint, ScalingCurve};
use crate::{Error, Result};

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| IngestError::new(path, format!("cannot read file: {e}")).into())
}

fn json_error(path: &Path, e: &serde_json::Error) -> Error {
    let err = IngestError::new(path, format!("invalid JSON: {e}"));
    if e.line() > 0 {
        err.with_line(e.line() as u64).into()
    } else {
        err.into()
    }
}

fn csv_error(path: &Path, e: &csv::Error) -> Error {
    let err = IngestError::new(path, format!("invalid CSV: {e}"));
    match e.position() {
        Some(pos) => err.with_line(pos.line()).into(),
        None => err.into(),
    }
}

/// Unwraps the message of a validation error so it can be re-wrapped with
/// file context.
fn inner_message(e: Error) -> String {
    match e {
        Error::InvalidInput(msg) => msg,
        other => other.to_string(),
    }
}

/// Loads and validates the manifest document itself.
pub fn load_manifest(path: &Path) -> Result<ManifestDoc> {
    let text = read_text(path)?;
    let doc: ManifestDoc =
        serde_json::from_str(&text).map_err(|e| json_error(path, &e))?;
    doc.validate()
        .map_err(|msg| Error::from(IngestError::new(path, msg)))?;
    Ok(doc)
}

/// Loads one manifest entry. Relative paths resolve against `base_dir`
/// (conventionally the manifest's directory).
pub fn load_dataset(base_dir: &Path, entry: &DatasetManifest) -> Result<Dataset> {
    let raw = Path::new(&entry.path);
    let path: PathBuf = if raw.is_absolute() {
        raw.to_path_buf()
    } else {
        base_dir.join(raw)
    };
    match entry.kind {
        DatasetKind::PredictionLog => Ok(Dataset::PredictionLog(load_prediction_log(&path)?)),
        DatasetKind::FailureMatrix => Ok(Dataset::FailureMatrix(load_failure_matrix(&path)?)),
        DatasetKind::RankedLists => Ok(Dataset::RankedLists(load_ranked_lists(&path)?)),
        DatasetKind::GenerationStats => {
            Ok(Dataset::GenerationStats(load_generation_stats(&path)?))
        }
        DatasetKind::ScoreSheet => Ok(Dataset::ScoreSheet(load_score_sheet(&path, entry)?)),
        DatasetKind::Schema => Ok(Dataset::Schema(load_schema(&path)?)),
        DatasetKind::HardwareSpec => Ok(Dataset::HardwareSpec(load_hardware_spec(&path)?)),
        DatasetKind::RuntimeSamples => Ok(Dataset::RuntimeSamples(load_runtime_samples(
            &path,
            entry.format,
        )?)),
        DatasetKind::ScalingCurve => Ok(Dataset::ScalingCurve(load_scaling_curve(&path)?)),
    }
}

fn load_prediction_log(path: &Path) -> Result<Vec<PredictionRecord>> {
    let text = read_text(path)?;
    let mut records = Vec::new();
    let mut seen: BTreeSet<(String, Option<String>)> = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = (i + 1) as u64;
        if line.trim().is_empty() {
            return Err(IngestError::new(path, "blank line in JSONL file")
                .with_line(lineno)
                .into());
        }
        let record: PredictionRecord = serde_json::from_str(line).map_err(|e| {
            Error::from(
                IngestError::new(path, format!("invalid record: {e}")).with_line(lineno),
            )
        })?;
        if let Some(c) = record.confidence {
            if !c.is_finite() || !(0.0..=1.0).contains(&c) {
                return Err(IngestError::new(
                    path,
                    format!("confidence must be within [0, 1], got {c}"),
                )
                .with_line(lineno)
                .with_field("confidence")
                .into());
            }
        }
        let variant = record
            .perturbation
            .as_ref()
            .map(|p| format!("{}/{}", p.family, p.variant));
        if !seen.insert((record.instance_id.clone(), variant)) {
            return Err(IngestError::new(
                path,
                format!(
                    "duplicate prediction for instance {} (same perturbation)",
                    record.instance_id
                ),
            )
            .with_line(lineno)
            .with_field("instance_id")
            .into());
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(IngestError::new(path, "prediction log has no records").into());
    }
    Ok(records)
}

fn load_failure_matrix(path: &Path) -> Result<FailureMatrix> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, &e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, &e))?.clone();
    if headers.is_empty() || &headers[0] != "instance_id" {
        return Err(IngestError::new(path, "first column must be instance_id")
            .with_line(1)
            .into());
    }
    if headers.len() < 2 {
        return Err(IngestError::new(path, "no model columns")
            .with_line(1)
            .into());
    }
    let model_ids: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();

    let mut instance_ids = Vec::new();
    let mut seen = BTreeSet::new();
    let mut cells = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, &e))?;
        let lineno = record.position().map(|p| p.line()).unwrap_or(0);
        let instance = record[0].to_string();
        if !seen.insert(instance.clone()) {
            return Err(
                IngestError::new(path, format!("duplicate instance id: {instance}"))
                    .with_line(lineno)
                    .with_field("instance_id")
                    .into(),
            );
        }
        let mut row = Vec::with_capacity(model_ids.len());
        for (model, cell) in model_ids.iter().zip(record.iter().skip(1)) {
            let bit = match cell {
                "0" => 0u8,
                "1" => 1u8,
                other => {
                    return Err(IngestError::new(
                        path,
                        format!("cell must be 0 or 1, got {other:?}"),
                    )
                    .with_line(lineno)
                    .with_field(model.clone())
                    .into())
                }
            };
            row.push(bit);
        }
        instance_ids.push(instance);
        cells.push(row);
    }
    FailureMatrix::new(instance_ids, model_ids, cells)
        .map_err(|e| IngestError::new(path, inner_message(e)).into())
}

fn load_ranked_lists(path: &Path) -> Result<Vec<RankedList>> {
    let text = read_text(path)?;
    let mut lists = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = (i + 1) as u64;
        if line.trim().is_empty() {
            return Err(IngestError::new(path, "blank line in JSONL file")
                .with_line(lineno)
                .into());
        }
        let list: RankedList = serde_json::from_str(line).map_err(|e| {
            Error::from(IngestError::new(path, format!("invalid record: {e}")).with_line(lineno))
        })?;
        list.validate().map_err(|e| {
            Error::from(IngestError::new(path, inner_message(e)).with_line(lineno))
        })?;
        if !seen.insert(list.query_id.clone()) {
            return Err(
                IngestError::new(path, format!("duplicate query id: {}", list.query_id))
                    .with_line(lineno)
                    .with_field("query_id")
                    .into(),
            );
        }
        lists.push(list);
    }
    if lists.is_empty() {
        return Err(IngestError::new(path, "ranked-list file has no records").into());
    }
    Ok(lists)
}

fn load_generation_stats(path: &Path) -> Result<GenerationStats> {
    let text = read_text(path)?;
    let stats: GenerationStats =
        serde_json::from_str(&text).map_err(|e| json_error(path, &e))?;
    Ok(stats)
}

fn parse_score(cell: &str) -> std::result::Result<Option<ScoreValue>, String> {
    match cell {
        "" => Ok(None),
        "na" => Ok(Some(ScoreValue::NotApplicable)),
        other => other
            .parse::<u32>()
            .map(|v| Some(ScoreValue::Scored(v)))
            .map_err(|_| format!("score must be a non-negative integer or \"na\", got {other:?}")),
    }
}

fn load_score_sheet(path: &Path, entry: &DatasetManifest) -> Result<ScoreSheet> {
    match entry.format {
        super::DataFormat::Csv => load_score_sheet_csv(path, entry),
        super::DataFormat::Json => load_score_sheet_json(path, entry),
        super::DataFormat::Jsonl => unreachable!("manifest validation rejects jsonl sheets"),
    }
}

fn load_score_sheet_csv(path: &Path, entry: &DatasetManifest) -> Result<ScoreSheet> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, &e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, &e))?;
    let expected: Vec<&str> = SHEET_COLUMNS.to_vec();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(IngestError::new(
            path,
            format!(
                "header must be {}, got {}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        )
        .with_line(1)
        .into());
    }

    // CSV sheets carry no identity columns; the manifest supplies them.
    let entity = entry.entity.clone().ok_or_else(|| {
        Error::from(IngestError::new(path, "manifest entry declares no entity for this sheet"))
    })?;
    let rater = entry.rater.clone().unwrap_or_else(|| "final".to_string());
    let mut sheet = ScoreSheet::new(rater, entity);

    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, &e))?;
        let lineno = record.position().map(|p| p.line()).unwrap_or(0);
        let fail = |field: &str, msg: String| -> Error {
            IngestError::new(path, msg)
                .with_line(lineno)
                .with_field(field)
                .into()
        };

        let id = record[0].to_string();
        if id.is_empty() {
            return Err(fail("indicator_id", "empty indicator id".into()));
        }
        if sheet.scores.contains_key(&id) {
            return Err(fail("indicator_id", format!("duplicate indicator id: {id}")));
        }
        let score = parse_score(&record[1])
            .map_err(|msg| fail("score", msg))?
            .ok_or_else(|| {
                fail(
                    "score",
                    "empty score; omit the row entirely for unscored indicators".into(),
                )
            })?;
        let flagged = match &record[4] {
            "true" => true,
            "false" | "" => false,
            other => {
                return Err(fail(
                    "new_information",
                    format!("must be true or false, got {other:?}"),
                ))
            }
        };
        if flagged && !matches!(score, ScoreValue::Scored(_)) {
            return Err(fail(
                "new_information",
                "new-information flag on a not-applicable score".into(),
            ));
        }

        if !record[2].is_empty() {
            sheet.sources.insert(id.clone(), record[2].to_string());
        }
        if !record[3].is_empty() {
            sheet.justifications.insert(id.clone(), record[3].to_string());
        }
        if flagged {
            sheet.new_information.insert(id.clone());
        }
        sheet.scores.insert(id, score);
    }

    if sheet.scores.is_empty() {
        return Err(IngestError::new(path, "score sheet has no rows").into());
    }
    Ok(sheet)
}

fn load_score_sheet_json(path: &Path, entry: &DatasetManifest) -> Result<ScoreSheet> {
    let text = read_text(path)?;
    let sheet: ScoreSheet = serde_json::from_str(&text).map_err(|e| json_error(path, &e))?;
    if sheet.entity_id.is_empty() || sheet.rater_id.is_empty() {
        return Err(IngestError::new(path, "sheet must name entity_id and rater_id").into());
    }
    // Inline identity must agree with whatever the manifest also declares.
    for (manifest_value, inline_value, field) in [
        (entry.entity.as_deref(), sheet.entity_id.as_str(), "entity"),
        (entry.rater.as_deref(), sheet.rater_id.as_str(), "rater"),
    ] {
        if let Some(declared) = manifest_value {
            if declared != inline_value {
                return Err(IngestError::new(
                    path,
                    format!("manifest declares {field} {declared}, file says {inline_value}"),
                )
                .with_field(field)
                .into());
            }
        }
    }
    for id in &sheet.new_information {
        if !matches!(sheet.scores.get(id), Some(ScoreValue::Scored(_))) {
            return Err(IngestError::new(
                path,
                format!("new-information flag on unscored indicator {id}"),
            )
            .with_field("new_information")
            .into());
        }
    }
    if sheet.scores.is_empty() {
        return Err(IngestError::new(path, "score sheet has no scores").into());
    }
    Ok(sheet)
}

fn load_schema(path: &Path) -> Result<IndicatorSchema> {
    let text = read_text(path)?;
    let schema: IndicatorSchema =
        serde_json::from_str(&text).map_err(|e| json_error(path, &e))?;
    schema
        .validate()
        .map_err(|e| Error::from(IngestError::new(path, inner_message(e))))?;
    Ok(schema)
}

fn load_hardware_spec(path: &Path) -> Result<HardwareSpec> {
    let text = read_text(path)?;
    let spec: HardwareSpec = serde_json::from_str(&text).map_err(|e| json_error(path, &e))?;
    spec.validate()
        .map_err(|e| Error::from(IngestError::new(path, inner_message(e))))?;
    Ok(spec)
}

fn load_runtime_samples(path: &Path, format: super::DataFormat) -> Result<RuntimeSamples> {
    let samples = match format {
        super::DataFormat::Json => {
            let text = read_text(path)?;
            let parsed: RuntimeSamples =
                serde_json::from_str(&text).map_err(|e| json_error(path, &e))?;
            for (i, s) in parsed.samples.iter().enumerate() {
                if !s.is_finite() || *s < 0.0 {
                    return Err(IngestError::new(
                        path,
                        format!("sample {i} must be a non-negative finite number, got {s}"),
                    )
                    .with_field("samples")
                    .into());
                }
            }
            parsed.samples
        }
        super::DataFormat::Csv => {
            let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, &e))?;
            let headers = reader.headers().map_err(|e| csv_error(path, &e))?;
            if headers.iter().collect::<Vec<_>>() != vec!["seconds"] {
                return Err(IngestError::new(path, "header must be a single seconds column")
                    .with_line(1)
                    .into());
            }
            let mut samples = Vec::new();
            for record in reader.records() {
                let record = record.map_err(|e| csv_error(path, &e))?;
                let lineno = record.position().map(|p| p.line()).unwrap_or(0);
                let value: f64 = record[0].parse().map_err(|_| {
                    Error::from(
                        IngestError::new(path, format!("not a number: {:?}", &record[0]))
                            .with_line(lineno)
                            .with_field("seconds"),
                    )
                })?;
                if !value.is_finite() || value < 0.0 {
                    return Err(IngestError::new(
                        path,
                        format!("sample must be a non-negative finite number, got {value}"),
                    )
                    .with_line(lineno)
                    .with_field("seconds")
                    .into());
                }
                samples.push(value);
            }
            samples
        }
        super::DataFormat::Jsonl => unreachable!("manifest validation rejects jsonl samples"),
    };
    if samples.is_empty() {
        return Err(IngestError::new(path, "no runtime samples").into());
    }
    Ok(RuntimeSamples { samples })
}

fn load_scaling_curve(path: &Path) -> Result<ScalingCurve> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_error(path, &e))?;
    let mut records = reader.records();

    let parse_number = |cell: &str, lineno: u64, field: &str| -> Result<f64> {
        let value: f64 = cell.parse().map_err(|_| {
            Error::from(
                IngestError::new(path, format!("not a number: {cell:?}"))
                    .with_line(lineno)
                    .with_field(field),
            )
        })?;
        if !value.is_finite() {
            return Err(IngestError::new(path, format!("{field} must be finite, got {value}"))
                .with_line(lineno)
                .with_field(field)
                .into());
        }
        Ok(value)
    };

    let baseline_row = records
        .next()
        .ok_or_else(|| Error::from(IngestError::new(path, "empty scaling curve file")))?
        .map_err(|e| csv_error(path, &e))?;
    if baseline_row.len() != 2 || &baseline_row[0] != "random_baseline" {
        return Err(
            IngestError::new(path, "first row must be random_baseline,<value>")
                .with_line(1)
                .into(),
        );
    }
    let baseline = parse_number(&baseline_row[1], 1, "random_baseline")?;

    let header_row = records
        .next()
        .ok_or_else(|| Error::from(IngestError::new(path, "missing scale,performance header")))?
        .map_err(|e| csv_error(path, &e))?;
    if header_row.iter().collect::<Vec<_>>() != vec!["scale", "performance"] {
        return Err(IngestError::new(path, "second row must be scale,performance")
            .with_line(2)
            .into());
    }

    let mut points = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(path, &e))?;
        let lineno = record.position().map(|p| p.line()).unwrap_or(0);
        points.push(CurvePoint {
            scale: parse_number(&record[0], lineno, "scale")?,
            performance: parse_number(&record[1], lineno, "performance")?,
        });
    }
    ScalingCurve::new(points, baseline)
        .map_err(|e| IngestError::new(path, inner_message(e)).into())
}
