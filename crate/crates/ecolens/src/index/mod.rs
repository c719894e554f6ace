//! Composite-index engine for binary transparency indicators and ordinal
//! compliance rubrics: schemas, multi-rater score sheets, agreement
//! statistics, aggregation, cross-entity correlation, cohorts, and
//! longitudinal comparison.
//!
//! Arithmetic is exact throughout (integer points, rational percentages);
//! rounding happens only when reports are emitted.

mod agreement;
mod aggregate;
mod analysis;

pub use agreement::{agreement_rate, cohens_kappa, resolve};
pub use aggregate::{aggregate, new_information_split, AggregateReport, LevelScore};
pub use analysis::{
    group_compare, longitudinal_diff, smc_matrix, CohortReport, CohortStats, DiffEntry,
    DiffReport, SmcMatrix,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Scoring scale of one indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Scale {
    /// Disclosed or not: {0, 1}.
    Binary,
    /// Graded rubric: {0, ..., max}, max >= 1.
    Ordinal { max: u32 },
}

impl Scale {
    pub fn max(&self) -> u32 {
        match self {
            Scale::Binary => 1,
            Scale::Ordinal { max } => *max,
        }
    }
}

/// One indicator of the index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Indicator {
    pub id: String,
    pub name: String,
    pub domain: String,
    pub subdomain: String,
    pub scale: Scale,
}

/// The full set of indicators, partitioned into subdomains nested in domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSchema {
    pub indicators: Vec<Indicator>,
    /// When set, indicators missing from a sheet aggregate as 0 instead of
    /// being an error.
    #[serde(default)]
    pub default_zero: bool,
}

impl IndicatorSchema {
    pub fn new(indicators: Vec<Indicator>, default_zero: bool) -> Result<Self> {
        let schema = Self {
            indicators,
            default_zero,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.indicators.is_empty() {
            return Err(Error::invalid("schema has no indicators"));
        }
        let mut ids = BTreeSet::new();
        let mut subdomain_domain: BTreeMap<&str, &str> = BTreeMap::new();
        for ind in &self.indicators {
            if !ids.insert(ind.id.as_str()) {
                return Err(Error::invalid(format!("duplicate indicator id: {}", ind.id)));
            }
            if ind.scale.max() < 1 {
                return Err(Error::invalid(format!(
                    "indicator {}: scale max must be at least 1",
                    ind.id
                )));
            }
            match subdomain_domain.get(ind.subdomain.as_str()) {
                None => {
                    subdomain_domain.insert(&ind.subdomain, &ind.domain);
                }
                Some(&domain) if domain == ind.domain => {}
                Some(&domain) => {
                    return Err(Error::invalid(format!(
                        "subdomain {} appears under both {domain} and {}",
                        ind.subdomain, ind.domain
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn indicator(&self, id: &str) -> Option<&Indicator> {
        self.indicators.iter().find(|i| i.id == id)
    }

    /// Domain names in first-appearance order.
    pub fn domains(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for ind in &self.indicators {
            if !seen.contains(&ind.domain.as_str()) {
                seen.push(ind.domain.as_str());
            }
        }
        seen
    }

    /// Subdomain names in first-appearance order.
    pub fn subdomains(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for ind in &self.indicators {
            if !seen.contains(&ind.subdomain.as_str()) {
                seen.push(ind.subdomain.as_str());
            }
        }
        seen
    }
}

/// A sheet entry: either a score within the indicator's scale, or an explicit
/// marker that the indicator does not apply to this entity (which removes it
/// from the entity's maximum).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreValue {
    Scored(u32),
    NotApplicable,
}

impl ScoreValue {
    pub fn as_points(self) -> Option<u32> {
        match self {
            ScoreValue::Scored(v) => Some(v),
            ScoreValue::NotApplicable => None,
        }
    }
}

impl fmt::Display for ScoreValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreValue::Scored(v) => write!(f, "{v}"),
            ScoreValue::NotApplicable => write!(f, "na"),
        }
    }
}

impl Serialize for ScoreValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ScoreValue::Scored(v) => serializer.serialize_u32(*v),
            ScoreValue::NotApplicable => serializer.serialize_str("na"),
        }
    }
}

impl<'de> Deserialize<'de> for ScoreValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(deserializer)?;
        match &value {
            serde_json::Value::Number(n) => n
                .as_u64()
                .and_then(|v| u32::try_from(v).ok())
                .map(ScoreValue::Scored)
                .ok_or_else(|| D::Error::custom(format!("score {n} is not a small non-negative integer"))),
            serde_json::Value::String(s) if s == "na" => Ok(ScoreValue::NotApplicable),
            other => Err(D::Error::custom(format!(
                "expected an integer score or \"na\", got {other}"
            ))),
        }
    }
}

/// One rater's (or the resolved) scores for one entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSheet {
    pub rater_id: String,
    /// Developer plus flagship model, e.g. `acme/condor-34b`.
    pub entity_id: String,
    pub scores: BTreeMap<String, ScoreValue>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sources: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub justifications: BTreeMap<String, String>,
    /// Indicators whose information was newly disclosed for this edition.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub new_information: BTreeSet<String>,
}

impl ScoreSheet {
    pub fn new(rater_id: impl Into<String>, entity_id: impl Into<String>) -> Self {
        Self {
            rater_id: rater_id.into(),
            entity_id: entity_id.into(),
            scores: BTreeMap::new(),
            sources: BTreeMap::new(),
            justifications: BTreeMap::new(),
            new_information: BTreeSet::new(),
        }
    }

    /// Checks every entry against the schema: known ids, scores within scale,
    /// and new-information flags only on actually scored indicators.
    pub fn validate(&self, schema: &IndicatorSchema) -> Result<()> {
        for (id, value) in &self.scores {
            let indicator = schema.indicator(id).ok_or_else(|| {
                Error::invalid(format!("sheet {}: unknown indicator {id}", self.describe()))
            })?;
            if let ScoreValue::Scored(v) = value {
                if *v > indicator.scale.max() {
                    return Err(Error::invalid(format!(
                        "sheet {}: score {v} for {id} exceeds scale max {}",
                        self.describe(),
                        indicator.scale.max()
                    )));
                }
            }
        }
        for id in &self.new_information {
            match self.scores.get(id) {
                Some(ScoreValue::Scored(_)) => {}
                _ => {
                    return Err(Error::invalid(format!(
                        "sheet {}: new-information flag on unscored indicator {id}",
                        self.describe()
                    )))
                }
            }
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!("{}/{}", self.entity_id, self.rater_id)
    }

    /// Indicator ids carrying a numeric score (not-applicable excluded).
    pub fn scored_ids(&self) -> impl Iterator<Item = &str> {
        self.scores.iter().filter_map(|(id, v)| match v {
            ScoreValue::Scored(_) => Some(id.as_str()),
            ScoreValue::NotApplicable => None,
        })
    }
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    #[test]
    fn schema_validation_catches_structural_errors() {
        let mut schema = toy_schema();
        assert!(schema.validate().is_ok());

        let mut dup = schema.clone();
        dup.indicators.push(dup.indicators[0].clone());
        assert!(dup.validate().is_err());

        // Same subdomain name under two domains.
        schema.indicators.push(Indicator {
            id: "odd".into(),
            name: "odd".into(),
            domain: "downstream".into(),
            subdomain: "data".into(),
            scale: Scale::Binary,
        });
        assert!(schema.validate().is_err());

        assert!(IndicatorSchema::new(vec![], false).is_err());
    }

    #[test]
    fn sheet_validation_enforces_scale_and_flags() {
        let schema = toy_schema();
        let mut sheet = sheet_with("r1", "acme", &[("data-1", 1), ("data-2", 0)]);
        assert!(sheet.validate(&schema).is_ok());

        sheet.scores.insert("data-1".into(), ScoreValue::Scored(2));
        assert!(sheet.validate(&schema).is_err());
        sheet.scores.insert("data-1".into(), ScoreValue::Scored(1));

        sheet.scores.insert("ghost".into(), ScoreValue::Scored(1));
        assert!(sheet.validate(&schema).is_err());
        sheet.scores.remove("ghost");

        sheet.new_information.insert("access-1".into());
        assert!(sheet.validate(&schema).is_err());
        sheet.new_information.clear();
        sheet.new_information.insert("data-1".into());
        assert!(sheet.validate(&schema).is_ok());

        // Flags on not-applicable entries are rejected too.
        sheet.scores.insert("data-1".into(), ScoreValue::NotApplicable);
        assert!(sheet.validate(&schema).is_err());
    }

    #[test]
    fn score_values_roundtrip_through_json() {
        let scored: ScoreValue = serde_json::from_str("3").unwrap();
        assert_eq!(scored, ScoreValue::Scored(3));
        let na: ScoreValue = serde_json::from_str("\"na\"").unwrap();
        assert_eq!(na, ScoreValue::NotApplicable);
        assert!(serde_json::from_str::<ScoreValue>("-1").is_err());
        assert!(serde_json::from_str::<ScoreValue>("\"maybe\"").is_err());
        assert_eq!(serde_json::to_string(&ScoreValue::Scored(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&ScoreValue::NotApplicable).unwrap(), "\"na\"");
    }
}
