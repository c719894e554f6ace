//! Strict, validating loaders and writers for the dataset formats the CLI
//! understands. FORMATS.md in the repository root is the normative format
//! reference; the golden fixtures under `fixtures/` are the examples it
//! points at.

mod bundle;
mod load;
mod save;

pub use bundle::{load_bundle, validate_cross, Bundle, LoadedEntry, Violation};
pub use load::{load_dataset, load_manifest};
pub use save::save_dataset;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::efficiency::{RuntimeModel, TrainingHardwareSpec};
use crate::homogenization::FailureMatrix;
use crate::index::{IndicatorSchema, ScoreSheet};
use crate::metrics::{GenerationStats, PredictionRecord, RankedList};
use crate::scaling::ScalingCurve;
use crate::{Error, Result};

/// Structured ingestion failure: which file, where in it, which field.
#[derive(Debug)]
pub struct IngestError {
    /// File the failure occurred in.
    pub file: PathBuf,
    /// 1-based line (line-oriented formats) or record index, when known.
    pub line: Option<u64>,
    /// Field or column the failure is about, when known.
    pub field: Option<String>,
    pub message: String,
}

impl IngestError {
    pub fn new(file: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Self {
            file: file.into(),
            line: None,
            field: None,
            message: message.into(),
        }
    }

    pub fn with_line(mut self, line: u64) -> Self {
        self.line = Some(line);
        self
    }

    pub fn with_field(mut self, field: impl Into<String>) -> Self {
        self.field = Some(field.into());
        self
    }
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file.display())?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ": field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for IngestError {}

/// What a dataset file contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    PredictionLog,
    FailureMatrix,
    RankedLists,
    GenerationStats,
    ScoreSheet,
    Schema,
    HardwareSpec,
    RuntimeSamples,
    ScalingCurve,
}

impl DatasetKind {
    pub fn allowed_formats(&self) -> &'static [DataFormat] {
        use DataFormat::*;
        match self {
            DatasetKind::PredictionLog => &[Jsonl],
            DatasetKind::FailureMatrix => &[Csv],
            DatasetKind::RankedLists => &[Jsonl],
            DatasetKind::GenerationStats => &[Json],
            DatasetKind::ScoreSheet => &[Csv, Json],
            DatasetKind::Schema => &[Json],
            DatasetKind::HardwareSpec => &[Json],
            DatasetKind::RuntimeSamples => &[Json, Csv],
            DatasetKind::ScalingCurve => &[Csv],
        }
    }

    pub fn supports(&self, format: DataFormat) -> bool {
        self.allowed_formats().contains(&format)
    }

    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::PredictionLog => "prediction_log",
            DatasetKind::FailureMatrix => "failure_matrix",
            DatasetKind::RankedLists => "ranked_lists",
            DatasetKind::GenerationStats => "generation_stats",
            DatasetKind::ScoreSheet => "score_sheet",
            DatasetKind::Schema => "schema",
            DatasetKind::HardwareSpec => "hardware_spec",
            DatasetKind::RuntimeSamples => "runtime_samples",
            DatasetKind::ScalingCurve => "scaling_curve",
        }
    }
}

/// On-disk encoding of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    Jsonl,
    Csv,
    Json,
}

impl DataFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            DataFormat::Jsonl => "jsonl",
            DataFormat::Csv => "csv",
            DataFormat::Json => "json",
        }
    }
}

/// One manifest entry: a named dataset file with its kind and format, plus
/// optional identity metadata the file format itself cannot carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub kind: DatasetKind,
    /// Path to the file, resolved relative to the manifest's directory.
    pub path: String,
    pub format: DataFormat,
    /// Scenario a prediction log or ranked-list file belongs to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    /// Model a prediction log or ranked-list file belongs to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Entity a score sheet covers. Required for CSV sheets; JSON sheets
    /// carry it inline and must agree when both are present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity: Option<String>,
    /// Rater of a score sheet. CSV sheets default to "final".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rater: Option<String>,
    /// Cohort label for grouped index analyses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohort: Option<String>,
    /// Edition label for longitudinal index analyses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edition: Option<String>,
}

impl DatasetManifest {
    fn check_metadata(&self) -> std::result::Result<(), String> {
        let mut stray = Vec::new();
        let eval_kind = matches!(
            self.kind,
            DatasetKind::PredictionLog | DatasetKind::RankedLists
        );
        let sheet_kind = self.kind == DatasetKind::ScoreSheet;
        if self.scenario.is_some() && !eval_kind {
            stray.push("scenario");
        }
        if self.model.is_some() && !eval_kind {
            stray.push("model");
        }
        for (present, name) in [
            (self.entity.is_some(), "entity"),
            (self.rater.is_some(), "rater"),
            (self.cohort.is_some(), "cohort"),
            (self.edition.is_some(), "edition"),
        ] {
            if present && !sheet_kind {
                stray.push(name);
            }
        }
        if stray.is_empty() {
            Ok(())
        } else {
            Err(format!(
                "metadata {} does not apply to kind {}",
                stray.join(", "),
                self.kind.name()
            ))
        }
    }
}

/// The manifest document: a named list of dataset entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestDoc {
    pub name: String,
    pub datasets: Vec<DatasetManifest>,
}

impl ManifestDoc {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.datasets.is_empty() {
            return Err("manifest lists no datasets".into());
        }
        let mut names = std::collections::BTreeSet::new();
        for entry in &self.datasets {
            if entry.name.is_empty() {
                return Err("dataset with empty name".into());
            }
            if !names.insert(&entry.name) {
                return Err(format!("duplicate dataset name: {}", entry.name));
            }
            if entry.path.is_empty() {
                return Err(format!("dataset {}: empty path", entry.name));
            }
            if !entry.kind.supports(entry.format) {
                return Err(format!(
                    "dataset {}: kind {} does not support format {} (expected one of: {})",
                    entry.name,
                    entry.kind.name(),
                    entry.format.extension(),
                    entry
                        .kind
                        .allowed_formats()
                        .iter()
                        .map(|f| f.extension())
                        .collect::<Vec<_>>()
                        .join(", ")
                ));
            }
            if let Err(msg) = entry.check_metadata() {
                return Err(format!("dataset {}: {msg}", entry.name));
            }
            if entry.kind == DatasetKind::ScoreSheet
                && entry.format == DataFormat::Csv
                && entry.entity.is_none()
            {
                return Err(format!(
                    "dataset {}: CSV score sheets need an entity in the manifest",
                    entry.name
                ));
            }
        }
        Ok(())
    }
}

/// Measurement units a hardware spec declares. Only one set is accepted;
/// the declaration exists so a file in other units fails loudly instead of
/// silently producing wrong energy figures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Units {
    pub power: String,
    pub time: String,
    pub energy: String,
    pub mass: String,
}

impl Units {
    const EXPECTED: [(&'static str, &'static str); 4] = [
        ("power", "kW"),
        ("time", "h"),
        ("energy", "kWh"),
        ("mass", "kg"),
    ];

    pub fn expected() -> Self {
        Self {
            power: "kW".into(),
            time: "h".into(),
            energy: "kWh".into(),
            mass: "kg".into(),
        }
    }

    fn check(&self) -> std::result::Result<(), (String, String)> {
        let actual = [
            ("power", self.power.as_str()),
            ("time", self.time.as_str()),
            ("energy", self.energy.as_str()),
            ("mass", self.mass.as_str()),
        ];
        for ((field, expected), (_, got)) in Self::EXPECTED.iter().zip(actual) {
            if *expected != got {
                return Err((
                    field.to_string(),
                    format!("unit must be {expected}, got {got}"),
                ));
            }
        }
        Ok(())
    }
}

/// A named inference workload for idealized-runtime estimates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    pub name: String,
    pub prompt_tokens: u64,
    pub output_tokens: u64,
}

/// Hardware description file: training-run parameters, declared units, and
/// optionally an inference runtime model with workloads to evaluate it on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareSpec {
    pub training: TrainingHardwareSpec,
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_model: Option<RuntimeModel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub workloads: Vec<Workload>,
}

impl HardwareSpec {
    pub fn validate(&self) -> Result<()> {
        self.training.validate()?;
        if let Err((field, msg)) = self.units.check() {
            return Err(Error::invalid(format!("units.{field}: {msg}")));
        }
        if let Some(model) = &self.runtime_model {
            model.validate()?;
        }
        let mut names = std::collections::BTreeSet::new();
        for w in &self.workloads {
            if !names.insert(&w.name) {
                return Err(Error::invalid(format!("duplicate workload name: {}", w.name)));
            }
        }
        Ok(())
    }
}

/// Runtime measurements, seconds per request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeSamples {
    pub samples: Vec<f64>,
}

/// A loaded, validated dataset of any supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    PredictionLog(Vec<PredictionRecord>),
    FailureMatrix(FailureMatrix),
    RankedLists(Vec<RankedList>),
    GenerationStats(GenerationStats),
    ScoreSheet(ScoreSheet),
    Schema(IndicatorSchema),
    HardwareSpec(HardwareSpec),
    RuntimeSamples(RuntimeSamples),
    ScalingCurve(ScalingCurve),
}

impl Dataset {
    pub fn kind(&self) -> DatasetKind {
        match self {
            Dataset::PredictionLog(_) => DatasetKind::PredictionLog,
            Dataset::FailureMatrix(_) => DatasetKind::FailureMatrix,
            Dataset::RankedLists(_) => DatasetKind::RankedLists,
            Dataset::GenerationStats(_) => DatasetKind::GenerationStats,
            Dataset::ScoreSheet(_) => DatasetKind::ScoreSheet,
            Dataset::Schema(_) => DatasetKind::Schema,
            Dataset::HardwareSpec(_) => DatasetKind::HardwareSpec,
            Dataset::RuntimeSamples(_) => DatasetKind::RuntimeSamples,
            Dataset::ScalingCurve(_) => DatasetKind::ScalingCurve,
        }
    }
}

/// Score-sheet CSV column order. FORMATS.md documents these names.
pub(crate) const SHEET_COLUMNS: [&str; 5] = [
    "indicator_id",
    "score",
    "source",
    "justification",
    "new_information",
];
