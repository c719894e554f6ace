//! Pointwise aggregation of a resolved score sheet into overall, domain, and
//! subdomain totals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{IndicatorSchema, ScoreSheet, ScoreValue};
use crate::{Error, Result};

/// Points earned at one level of the taxonomy, against the maximum
/// attainable there. Indicators marked not-applicable are removed from the
/// maximum, so `max` can drop below the schema's nominal total; when every
/// indicator at a level is not-applicable, `max` is 0 and the percentage is
/// undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelScore {
    pub points: u64,
    pub max: u64,
    pub percentage: Option<f64>,
}

impl LevelScore {
    fn from_totals(points: u64, max: u64) -> Self {
        let percentage = if max == 0 {
            None
        } else {
            Some(points as f64 / max as f64)
        };
        Self {
            points,
            max,
            percentage,
        }
    }
}

/// Totals for one entity: overall plus a breakdown per domain and per
/// subdomain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub entity_id: String,
    pub overall: LevelScore,
    pub per_domain: BTreeMap<String, LevelScore>,
    pub per_subdomain: BTreeMap<String, LevelScore>,
}

/// Sums a sheet's points against the schema.
///
/// Every schema indicator must be present in the sheet unless the schema
/// sets `default_zero`, in which case missing indicators count 0 points
/// toward an unchanged maximum. Extra sheet entries and out-of-scale scores
/// are rejected by sheet validation.
pub fn aggregate(sheet: &ScoreSheet, schema: &IndicatorSchema) -> Result<AggregateReport> {
    sheet.validate(schema)?;

    let mut overall = (0u64, 0u64);
    let mut per_domain: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut per_subdomain: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    // Seed every level so a fully not-applicable subdomain still appears,
    // with max 0.
    for ind in &schema.indicators {
        per_domain.entry(ind.domain.clone()).or_default();
        per_subdomain.entry(ind.subdomain.clone()).or_default();
    }

    for ind in &schema.indicators {
        let (points, max) = match sheet.scores.get(&ind.id) {
            Some(ScoreValue::Scored(v)) => (u64::from(*v), u64::from(ind.scale.max())),
            Some(ScoreValue::NotApplicable) => continue,
            None if schema.default_zero => (0, u64::from(ind.scale.max())),
            None => {
                return Err(Error::invalid(format!(
                    "sheet {}/{} has no score for {}",
                    sheet.entity_id, sheet.rater_id, ind.id
                )))
            }
        };
        overall.0 += points;
        overall.1 += max;
        let d = per_domain.entry(ind.domain.clone()).or_default();
        d.0 += points;
        d.1 += max;
        let s = per_subdomain.entry(ind.subdomain.clone()).or_default();
        s.0 += points;
        s.1 += max;
    }

    Ok(AggregateReport {
        entity_id: sheet.entity_id.clone(),
        overall: LevelScore::from_totals(overall.0, overall.1),
        per_domain: per_domain
            .into_iter()
            .map(|(k, (p, m))| (k, LevelScore::from_totals(p, m)))
            .collect(),
        per_subdomain: per_subdomain
            .into_iter()
            .map(|(k, (p, m))| (k, LevelScore::from_totals(p, m)))
            .collect(),
    })
}

/// Splits an entity's total points into (previously public, newly disclosed)
/// according to the sheet's new-information flags. The two parts sum to the
/// overall point total.
pub fn new_information_split(
    sheet: &ScoreSheet,
    schema: &IndicatorSchema,
) -> Result<(u64, u64)> {
    sheet.validate(schema)?;
    let mut pre_existing = 0u64;
    let mut newly_disclosed = 0u64;
    for ind in &schema.indicators {
        match sheet.scores.get(&ind.id) {
            Some(ScoreValue::Scored(v)) => {
                if sheet.new_information.contains(&ind.id) {
                    newly_disclosed += u64::from(*v);
                } else {
                    pre_existing += u64::from(*v);
                }
            }
            Some(ScoreValue::NotApplicable) => {}
            None if schema.default_zero => {}
            None => {
                return Err(Error::invalid(format!(
                    "sheet {}/{} has no score for {}",
                    sheet.entity_id, sheet.rater_id, ind.id
                )))
            }
        }
    }
    Ok((pre_existing, newly_disclosed))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::super::{Indicator, Scale};
    use super::*;

    fn full_sheet(entity: &str, value: u32) -> ScoreSheet {
        sheet_with(
            "r1",
            entity,
            &[
                ("data-1", value),
                ("data-2", value),
                ("compute-1", value),
                ("access-1", value),
                ("access-2", value),
                ("impact-1", value),
            ],
        )
    }

    #[test]
    fn all_ones_scores_the_full_maximum() {
        let report = aggregate(&full_sheet("acme", 1), &toy_schema()).unwrap();
        assert_eq!(report.overall.points, 6);
        assert_eq!(report.overall.max, 6);
        assert_eq!(report.overall.percentage, Some(1.0));
        assert_eq!(report.per_domain["upstream"].points, 3);
        assert_eq!(report.per_domain["downstream"].points, 3);
        assert_eq!(report.per_subdomain["data"].points, 2);
        assert_eq!(report.per_subdomain["access"].max, 2);
    }

    #[test]
    fn all_zeros_scores_nothing_but_keeps_the_maximum() {
        let report = aggregate(&full_sheet("acme", 0), &toy_schema()).unwrap();
        assert_eq!(report.overall.points, 0);
        assert_eq!(report.overall.max, 6);
        assert_eq!(report.overall.percentage, Some(0.0));
    }

    #[test]
    fn ordinal_scales_contribute_their_own_maximum() {
        let indicators = vec![
            Indicator {
                id: "rubric-1".into(),
                name: "rubric 1".into(),
                domain: "model".into(),
                subdomain: "safety".into(),
                scale: Scale::Ordinal { max: 4 },
            },
            Indicator {
                id: "rubric-2".into(),
                name: "rubric 2".into(),
                domain: "model".into(),
                subdomain: "safety".into(),
                scale: Scale::Binary,
            },
        ];
        let schema = IndicatorSchema::new(indicators, false).unwrap();
        let sheet = sheet_with("r1", "acme", &[("rubric-1", 3), ("rubric-2", 1)]);
        let report = aggregate(&sheet, &schema).unwrap();
        assert_eq!(report.overall.points, 4);
        assert_eq!(report.overall.max, 5);
        assert_eq!(report.overall.percentage, Some(0.8));
    }

    #[test]
    fn not_applicable_shrinks_the_maximum() {
        let mut sheet = full_sheet("acme", 1);
        sheet
            .scores
            .insert("access-1".into(), ScoreValue::NotApplicable);
        let report = aggregate(&sheet, &toy_schema()).unwrap();
        assert_eq!(report.overall.points, 5);
        assert_eq!(report.overall.max, 5);
        assert_eq!(report.overall.percentage, Some(1.0));
        assert_eq!(report.per_subdomain["access"].points, 1);
        assert_eq!(report.per_subdomain["access"].max, 1);
    }

    #[test]
    fn fully_not_applicable_level_has_no_percentage() {
        let mut sheet = full_sheet("acme", 1);
        sheet
            .scores
            .insert("data-1".into(), ScoreValue::NotApplicable);
        sheet
            .scores
            .insert("data-2".into(), ScoreValue::NotApplicable);
        let report = aggregate(&sheet, &toy_schema()).unwrap();
        let data = &report.per_subdomain["data"];
        assert_eq!((data.points, data.max), (0, 0));
        assert_eq!(data.percentage, None);
        assert_eq!(report.overall.max, 4);
    }

    #[test]
    fn missing_indicator_errors_unless_schema_defaults_to_zero() {
        let mut sheet = full_sheet("acme", 1);
        sheet.scores.remove("impact-1");

        let err = aggregate(&sheet, &toy_schema()).unwrap_err();
        assert!(err.to_string().contains("impact-1"));

        let mut schema = toy_schema();
        schema.default_zero = true;
        let report = aggregate(&sheet, &schema).unwrap();
        assert_eq!(report.overall.points, 5);
        assert_eq!(report.overall.max, 6);
    }

    #[test]
    fn new_information_split_partitions_the_total() {
        let schema = toy_schema();

        let mut sheet = full_sheet("acme", 1);
        assert_eq!(new_information_split(&sheet, &schema).unwrap(), (6, 0));

        for id in ["data-1", "data-2", "compute-1", "access-1", "access-2", "impact-1"] {
            sheet.new_information.insert(id.into());
        }
        assert_eq!(new_information_split(&sheet, &schema).unwrap(), (0, 6));

        sheet.new_information.clear();
        sheet.new_information.insert("data-1".into());
        sheet.new_information.insert("impact-1".into());
        let (pre, new) = new_information_split(&sheet, &schema).unwrap();
        assert_eq!((pre, new), (4, 2));
        let report = aggregate(&sheet, &schema).unwrap();
        assert_eq!(pre + new, report.overall.points);
    }
}
