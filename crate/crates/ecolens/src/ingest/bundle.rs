//! Whole-bundle loading and cross-dataset consistency checks.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use super::{
    load_dataset, load_manifest, Dataset, DatasetManifest, HardwareSpec, IngestError,
    RuntimeSamples,
};
use crate::homogenization::FailureMatrix;
use crate::index::{IndicatorSchema, ScoreSheet};
use crate::metrics::{GenerationStats, PredictionRecord, RankedList};
use crate::scaling::ScalingCurve;
use crate::{Error, Result};

/// One manifest entry together with its loaded data.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedEntry {
    pub manifest: DatasetManifest,
    pub data: Dataset,
}

/// All datasets of one manifest, loaded and individually validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub name: String,
    /// Directory dataset paths were resolved against.
    pub base_dir: PathBuf,
    pub entries: Vec<LoadedEntry>,
}

macro_rules! kind_accessor {
    ($name:ident, $variant:ident, $ty:ty) => {
        pub fn $name(&self) -> Vec<(&DatasetManifest, &$ty)> {
            self.entries
                .iter()
                .filter_map(|e| match &e.data {
                    Dataset::$variant(value) => Some((&e.manifest, value)),
                    _ => None,
                })
                .collect()
        }
    };
}

impl Bundle {
    kind_accessor!(prediction_logs, PredictionLog, Vec<PredictionRecord>);
    kind_accessor!(failure_matrices, FailureMatrix, FailureMatrix);
    kind_accessor!(ranked_lists, RankedLists, Vec<RankedList>);
    kind_accessor!(generation_stats, GenerationStats, GenerationStats);
    kind_accessor!(score_sheets, ScoreSheet, ScoreSheet);
    kind_accessor!(schemas, Schema, IndicatorSchema);
    kind_accessor!(hardware_specs, HardwareSpec, HardwareSpec);
    kind_accessor!(runtime_samples, RuntimeSamples, RuntimeSamples);
    kind_accessor!(scaling_curves, ScalingCurve, ScalingCurve);
}

/// Loads the manifest at `manifest_path` and every dataset it lists. When
/// the bundle carries a schema, score sheets are checked against it here, so
/// an unknown indicator id or out-of-scale score fails the load.
pub fn load_bundle(manifest_path: &Path) -> Result<Bundle> {
    let doc = load_manifest(manifest_path)?;
    let base_dir = manifest_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();

    let mut entries = Vec::new();
    for manifest in doc.datasets {
        let data = load_dataset(&base_dir, &manifest)?;
        entries.push(LoadedEntry { manifest, data });
    }
    let bundle = Bundle {
        name: doc.name,
        base_dir,
        entries,
    };

    let schemas = bundle.schemas();
    if !schemas.is_empty() {
        for (manifest, sheet) in bundle.score_sheets() {
            let mut first_err = None;
            let fits_some = schemas.iter().any(|(_, schema)| match sheet.validate(schema) {
                Ok(()) => true,
                Err(e) => {
                    first_err.get_or_insert(e);
                    false
                }
            });
            if !fits_some {
                let msg = match first_err.expect("at least one schema was tried") {
                    Error::InvalidInput(m) => m,
                    other => other.to_string(),
                };
                return Err(IngestError::new(bundle.base_dir.join(&manifest.path), msg).into());
            }
        }
    }
    Ok(bundle)
}

/// One cross-dataset inconsistency. Violations are findings, not failures:
/// an inconsistent bundle still loads, and callers decide what is fatal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Manifest name of the dataset the violation is about.
    pub dataset: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.dataset, self.message)
    }
}

/// Cross-file consistency checks over a loaded bundle.
pub fn validate_cross(bundle: &Bundle) -> Vec<Violation> {
    let mut violations = Vec::new();

    let schemas = bundle.schemas();
    for (manifest, sheet) in bundle.score_sheets() {
        if schemas.is_empty() {
            violations.push(Violation {
                dataset: manifest.name.clone(),
                message: "score sheet references no schema (bundle has none)".into(),
            });
            continue;
        }
        if !schemas.iter().any(|(_, s)| sheet.validate(s).is_ok()) {
            violations.push(Violation {
                dataset: manifest.name.clone(),
                message: format!(
                    "sheet {}/{} fits no bundled schema",
                    sheet.entity_id, sheet.rater_id
                ),
            });
        }
    }

    for (manifest, records) in bundle.prediction_logs() {
        let mut originals = BTreeSet::new();
        let mut perturbed = BTreeSet::new();
        for record in records {
            if record.is_original() {
                originals.insert(&record.instance_id);
            } else {
                perturbed.insert(&record.instance_id);
            }
        }
        for instance in perturbed.difference(&originals) {
            violations.push(Violation {
                dataset: manifest.name.clone(),
                message: format!(
                    "instance {instance} has perturbed variants but no original record"
                ),
            });
        }
    }

    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    const SCHEMA: &str = r#"{"indicators":[
        {"id":"data-1","name":"data 1","domain":"upstream","subdomain":"data","scale":{"type":"binary"}},
        {"id":"data-2","name":"data 2","domain":"upstream","subdomain":"data","scale":{"type":"binary"}}
    ]}"#;

    fn manifest_with(datasets: &str) -> String {
        format!(r#"{{"name":"test-bundle","datasets":[{datasets}]}}"#)
    }

    #[test]
    fn consistent_bundle_loads_and_passes_cross_checks() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "schema.json", SCHEMA);
        write_file(
            dir.path(),
            "sheet.csv",
            "indicator_id,score,source,justification,new_information\ndata-1,1,,,\ndata-2,0,,,\n",
        );
        write_file(
            dir.path(),
            "log.jsonl",
            concat!(
                r#"{"instance_id":"q1","gold":"a","predicted":"a"}"#,
                "\n",
                r#"{"instance_id":"q1","gold":"a","predicted":"b","perturbation":{"family":"typo","variant":"swap"}}"#,
            ),
        );
        let manifest = write_file(
            dir.path(),
            "manifest.json",
            &manifest_with(
                r#"{"name":"schema","kind":"schema","path":"schema.json","format":"json"},
                   {"name":"sheet","kind":"score_sheet","path":"sheet.csv","format":"csv","entity":"acme"},
                   {"name":"log","kind":"prediction_log","path":"log.jsonl","format":"jsonl"}"#,
            ),
        );

        let bundle = load_bundle(&manifest).unwrap();
        assert_eq!(bundle.entries.len(), 3);
        assert_eq!(bundle.score_sheets().len(), 1);
        assert_eq!(validate_cross(&bundle), vec![]);
    }

    #[test]
    fn unknown_indicator_in_sheet_fails_the_load_naming_the_id() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "schema.json", SCHEMA);
        write_file(
            dir.path(),
            "sheet.csv",
            "indicator_id,score,source,justification,new_information\nghost-9,1,,,\n",
        );
        let manifest = write_file(
            dir.path(),
            "manifest.json",
            &manifest_with(
                r#"{"name":"schema","kind":"schema","path":"schema.json","format":"json"},
                   {"name":"sheet","kind":"score_sheet","path":"sheet.csv","format":"csv","entity":"acme"}"#,
            ),
        );
        let err = load_bundle(&manifest).unwrap_err().to_string();
        assert!(err.contains("ghost-9"), "{err}");
    }

    #[test]
    fn sheet_without_any_schema_is_a_cross_violation() {
        let dir = tempfile::tempdir().unwrap();
        write_file(
            dir.path(),
            "sheet.csv",
            "indicator_id,score,source,justification,new_information\ndata-1,1,,,\n",
        );
        let manifest = write_file(
            dir.path(),
            "manifest.json",
            &manifest_with(
                r#"{"name":"sheet","kind":"score_sheet","path":"sheet.csv","format":"csv","entity":"acme"}"#,
            ),
        );
        let bundle = load_bundle(&manifest).unwrap();
        let violations = validate_cross(&bundle);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].message.contains("no schema"), "{}", violations[0]);
    }

    #[test]
    fn perturbed_instance_without_original_is_a_cross_violation() {
        let dir = tempfile::tempdir().unwrap();
        write_file(
            dir.path(),
            "log.jsonl",
            r#"{"instance_id":"q7","gold":"a","predicted":"b","perturbation":{"family":"typo","variant":"swap"}}"#,
        );
        let manifest = write_file(
            dir.path(),
            "manifest.json",
            &manifest_with(
                r#"{"name":"log","kind":"prediction_log","path":"log.jsonl","format":"jsonl"}"#,
            ),
        );
        let bundle = load_bundle(&manifest).unwrap();
        let violations = validate_cross(&bundle);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].message.contains("q7"), "{}", violations[0]);
        assert_eq!(violations[0].dataset, "log");
    }

    #[test]
    fn missing_file_reports_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_file(
            dir.path(),
            "manifest.json",
            &manifest_with(
                r#"{"name":"log","kind":"prediction_log","path":"absent.jsonl","format":"jsonl"}"#,
            ),
        );
        let err = load_bundle(&manifest).unwrap_err().to_string();
        assert!(err.contains("absent.jsonl"), "{err}");
    }

    #[test]
    fn explicit_original_variant_counts_as_original() {
        let dir = tempfile::tempdir().unwrap();
        write_file(
            dir.path(),
            "log.jsonl",
            concat!(
                r#"{"instance_id":"q1","gold":"a","predicted":"a","perturbation":{"family":"typo","variant":"original"}}"#,
                "\n",
                r#"{"instance_id":"q1","gold":"a","predicted":"b","perturbation":{"family":"typo","variant":"swap"}}"#,
            ),
        );
        let manifest = write_file(
            dir.path(),
            "manifest.json",
            &manifest_with(
                r#"{"name":"log","kind":"prediction_log","path":"log.jsonl","format":"jsonl"}"#,
            ),
        );
        let bundle = load_bundle(&manifest).unwrap();
        assert_eq!(validate_cross(&bundle), vec![]);
    }
}
