//! Re-serialization of loaded datasets. Loading a saved dataset gives back
//! an equal value (round-trip fixed point), which the tests here pin down
//! for every kind and format.

use std::path::Path;

use super::{DataFormat, Dataset, IngestError};
use crate::index::ScoreSheet;
use crate::{Error, Result};

fn to_json_pretty<T: serde::Serialize>(value: &T, path: &Path) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| IngestError::new(path, format!("cannot serialize: {e}")).into())
}

fn to_jsonl<T: serde::Serialize>(records: &[T], path: &Path) -> Result<String> {
    let mut out = String::new();
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|e| Error::from(IngestError::new(path, format!("cannot serialize: {e}"))))?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn sheet_to_csv(sheet: &ScoreSheet) -> String {
    let mut out = String::new();
    out.push_str(&super::SHEET_COLUMNS.join(","));
    out.push('\n');
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for (id, score) in &sheet.scores {
        let flagged = sheet.new_information.contains(id);
        writer
            .write_record([
                id.as_str(),
                &score.to_string(),
                sheet.sources.get(id).map(String::as_str).unwrap_or(""),
                sheet.justifications.get(id).map(String::as_str).unwrap_or(""),
                if flagged { "true" } else { "false" },
            ])
            .expect("writing to a Vec cannot fail");
    }
    out.push_str(&String::from_utf8(writer.into_inner().expect("no partial flush")).unwrap());
    out
}

/// Writes a dataset back to disk in the given format. The format must be one
/// the dataset's kind supports.
pub fn save_dataset(data: &Dataset, format: DataFormat, path: &Path) -> Result<()> {
    if !data.kind().supports(format) {
        return Err(Error::invalid(format!(
            "kind {} does not support format {}",
            data.kind().name(),
            format.extension()
        )));
    }
    let contents = match (data, format) {
        (Dataset::PredictionLog(records), DataFormat::Jsonl) => to_jsonl(records, path)?,
        (Dataset::RankedLists(lists), DataFormat::Jsonl) => to_jsonl(lists, path)?,
        (Dataset::FailureMatrix(matrix), DataFormat::Csv) => {
            let mut out = String::new();
            out.push_str("instance_id,");
            out.push_str(&matrix.model_ids().join(","));
            out.push('\n');
            for (instance, row) in matrix.instance_ids().iter().zip(matrix.rows()) {
                out.push_str(instance);
                for cell in row {
                    out.push(',');
                    out.push(if *cell == 1 { '1' } else { '0' });
                }
                out.push('\n');
            }
            out
        }
        (Dataset::GenerationStats(stats), DataFormat::Json) => to_json_pretty(stats, path)?,
        (Dataset::ScoreSheet(sheet), DataFormat::Csv) => sheet_to_csv(sheet),
        (Dataset::ScoreSheet(sheet), DataFormat::Json) => to_json_pretty(sheet, path)?,
        (Dataset::Schema(schema), DataFormat::Json) => to_json_pretty(schema, path)?,
        (Dataset::HardwareSpec(spec), DataFormat::Json) => to_json_pretty(spec, path)?,
        (Dataset::RuntimeSamples(samples), DataFormat::Json) => to_json_pretty(samples, path)?,
        (Dataset::RuntimeSamples(samples), DataFormat::Csv) => {
            let mut out = String::from("seconds\n");
            for s in &samples.samples {
                out.push_str(&format!("{s}\n"));
            }
            out
        }
        (Dataset::ScalingCurve(curve), DataFormat::Csv) => {
            let mut out = format!("random_baseline,{}\n", curve.random_baseline());
            out.push_str("scale,performance\n");
            for p in curve.points() {
                out.push_str(&format!("{},{}\n", p.scale, p.performance));
            }
            out
        }
        _ => unreachable!("kind/format support checked above"),
    };
    std::fs::write(path, contents)
        .map_err(|e| IngestError::new(path, format!("cannot write file: {e}")).into())
}

#[cfg(test)]
mod tests {
    use super::super::{load_dataset, DatasetKind, DatasetManifest};
    use super::*;
    use crate::homogenization::FailureMatrix;
    use crate::index::{Indicator, IndicatorSchema, Scale, ScoreValue};
    use crate::metrics::{GenerationStats, Perturbation, PredictionRecord, RankedList};
    use crate::scaling::{CurvePoint, ScalingCurve};
    use std::collections::BTreeMap;

    fn entry(kind: DatasetKind, path: &Path, format: DataFormat) -> DatasetManifest {
        DatasetManifest {
            name: "roundtrip".into(),
            kind,
            path: path.to_string_lossy().into_owned(),
            format,
            scenario: None,
            model: None,
            entity: if kind == DatasetKind::ScoreSheet {
                Some("acme".into())
            } else {
                None
            },
            rater: if kind == DatasetKind::ScoreSheet {
                Some("r1".into())
            } else {
                None
            },
            cohort: None,
            edition: None,
        }
    }

    /// save -> load -> save again: the reloaded value equals the original
    /// and the second save is byte-identical to the first.
    fn assert_fixed_point(data: Dataset, format: DataFormat) {
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join(format!("first.{}", format.extension()));
        let second = dir.path().join(format!("second.{}", format.extension()));

        save_dataset(&data, format, &first).unwrap();
        let e1 = entry(data.kind(), &first, format);
        let reloaded = load_dataset(dir.path(), &e1).unwrap();
        assert_eq!(reloaded, data, "reload differs for {:?}", data.kind());

        save_dataset(&reloaded, format, &second).unwrap();
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap(),
            "second save differs for {:?}",
            data.kind()
        );
    }

    #[test]
    fn prediction_log_roundtrips() {
        let records = vec![
            PredictionRecord {
                instance_id: "q1".into(),
                gold: "yes".into(),
                predicted: "yes".into(),
                confidence: Some(0.875),
                group_tags: vec!["dialect:a".into()],
                perturbation: None,
            },
            PredictionRecord {
                instance_id: "q1".into(),
                gold: "yes".into(),
                predicted: "no".into(),
                confidence: None,
                group_tags: vec![],
                perturbation: Some(Perturbation {
                    family: "typo".into(),
                    variant: "swap".into(),
                }),
            },
        ];
        assert_fixed_point(Dataset::PredictionLog(records), DataFormat::Jsonl);
    }

    #[test]
    fn failure_matrix_roundtrips() {
        let matrix = FailureMatrix::new(
            vec!["i1".into(), "i2".into(), "i3".into()],
            vec!["m1".into(), "m2".into()],
            vec![vec![0, 1], vec![1, 1], vec![0, 0]],
        )
        .unwrap();
        assert_fixed_point(Dataset::FailureMatrix(matrix), DataFormat::Csv);
    }

    #[test]
    fn ranked_lists_roundtrip() {
        let list = RankedList::new(
            "q1".into(),
            vec!["d1".into(), "d2".into()],
            BTreeMap::from([("d1".to_string(), 3.0), ("d9".to_string(), 1.0)]),
        )
        .unwrap();
        assert_fixed_point(Dataset::RankedLists(vec![list]), DataFormat::Jsonl);
    }

    #[test]
    fn generation_stats_roundtrip() {
        let mut stats = GenerationStats::default();
        stats.group_counts.insert("group-a".into(), 30);
        stats.group_counts.insert("group-b".into(), 10);
        stats
            .cooccurrence
            .entry("ceo".into())
            .or_default()
            .insert("group-a".into(), 5);
        assert_fixed_point(Dataset::GenerationStats(stats), DataFormat::Json);
    }

    #[test]
    fn score_sheet_roundtrips_in_both_formats() {
        let mut sheet = ScoreSheet::new("r1", "acme");
        sheet.scores.insert("data-1".into(), ScoreValue::Scored(1));
        sheet.scores.insert("data-2".into(), ScoreValue::NotApplicable);
        sheet.scores.insert("rubric-1".into(), ScoreValue::Scored(3));
        sheet.sources.insert("data-1".into(), "model card".into());
        sheet
            .justifications
            .insert("rubric-1".into(), "per policy, see appendix".into());
        sheet.new_information.insert("data-1".into());
        assert_fixed_point(Dataset::ScoreSheet(sheet.clone()), DataFormat::Json);
        assert_fixed_point(Dataset::ScoreSheet(sheet), DataFormat::Csv);
    }

    #[test]
    fn csv_sheet_quoting_survives_commas_and_quotes() {
        let mut sheet = ScoreSheet::new("r1", "acme");
        sheet.scores.insert("data-1".into(), ScoreValue::Scored(1));
        sheet
            .justifications
            .insert("data-1".into(), "stated, with \"caveats\", twice".into());
        assert_fixed_point(Dataset::ScoreSheet(sheet), DataFormat::Csv);
    }

    #[test]
    fn schema_roundtrips() {
        let schema = IndicatorSchema::new(
            vec![
                Indicator {
                    id: "data-1".into(),
                    name: "data 1".into(),
                    domain: "upstream".into(),
                    subdomain: "data".into(),
                    scale: Scale::Binary,
                },
                Indicator {
                    id: "rubric-1".into(),
                    name: "rubric 1".into(),
                    domain: "model".into(),
                    subdomain: "safety".into(),
                    scale: Scale::Ordinal { max: 4 },
                },
            ],
            true,
        )
        .unwrap();
        assert_fixed_point(Dataset::Schema(schema), DataFormat::Json);
    }

    #[test]
    fn hardware_spec_roundtrips() {
        let spec = super::super::HardwareSpec {
            training: crate::efficiency::TrainingHardwareSpec {
                n_gpu: 8,
                w_gpu: 0.4,
                t_train: 100.0,
                pue: 1.1,
                c_region: 0.5,
            },
            units: super::super::Units::expected(),
            runtime_model: Some(crate::efficiency::RuntimeModel {
                encode_table: BTreeMap::from([(128, 0.05), (512, 0.12), (2048, 0.4)]),
                per_token: 0.003,
            }),
            workloads: vec![super::super::Workload {
                name: "chat-short".into(),
                prompt_tokens: 100,
                output_tokens: 200,
            }],
        };
        assert_fixed_point(Dataset::HardwareSpec(spec), DataFormat::Json);
    }

    #[test]
    fn runtime_samples_roundtrip_in_both_formats() {
        let samples = super::super::RuntimeSamples {
            samples: vec![1.5, 0.25, 2.125, 19.75],
        };
        assert_fixed_point(Dataset::RuntimeSamples(samples.clone()), DataFormat::Json);
        assert_fixed_point(Dataset::RuntimeSamples(samples), DataFormat::Csv);
    }

    #[test]
    fn scaling_curve_roundtrips() {
        let curve = ScalingCurve::new(
            vec![
                CurvePoint {
                    scale: 1e20,
                    performance: 0.24,
                },
                CurvePoint {
                    scale: 1e21,
                    performance: 0.26,
                },
                CurvePoint {
                    scale: 1e22,
                    performance: 0.85,
                },
            ],
            0.25,
        )
        .unwrap();
        assert_fixed_point(Dataset::ScalingCurve(curve), DataFormat::Csv);
    }

    #[test]
    fn unsupported_save_format_is_rejected() {
        let samples = super::super::RuntimeSamples { samples: vec![1.0] };
        let dir = tempfile::tempdir().unwrap();
        let err = save_dataset(
            &Dataset::RuntimeSamples(samples),
            DataFormat::Jsonl,
            &dir.path().join("x.jsonl"),
        );
        assert!(err.is_err());
    }
}
