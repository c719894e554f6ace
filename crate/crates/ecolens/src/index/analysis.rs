//! Cross-entity analysis: score-vector similarity, cohort summaries, and
//! edition-over-edition deltas.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{AggregateReport, ScoreSheet};
use crate::{Error, Result};

/// Simple-matching-coefficient matrix over the entities' final sheets.
/// Entities are sorted by id; `values` is square in that order. A pair with
/// no commonly scored indicator has no coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmcMatrix {
    pub entities: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl SmcMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.entities.iter().position(|e| e == a)?;
        let j = self.entities.iter().position(|e| e == b)?;
        self.values[i][j]
    }
}

/// Pairwise simple matching coefficients between final sheets, one per
/// entity. Comparison is pairwise-complete: indicators either sheet left
/// unscored or marked not-applicable are excluded from both numerator and
/// denominator. The diagonal is exactly 1.
pub fn smc_matrix(sheets: &[ScoreSheet]) -> Result<SmcMatrix> {
    if sheets.len() < 2 {
        return Err(Error::invalid("similarity matrix needs at least two sheets"));
    }
    let mut by_entity: BTreeMap<&str, &ScoreSheet> = BTreeMap::new();
    for sheet in sheets {
        if by_entity.insert(&sheet.entity_id, sheet).is_some() {
            return Err(Error::invalid(format!(
                "multiple sheets for entity {}",
                sheet.entity_id
            )));
        }
    }
    let entities: Vec<String> = by_entity.keys().map(|e| e.to_string()).collect();
    let ordered: Vec<&ScoreSheet> = by_entity.values().copied().collect();

    let n = ordered.len();
    let mut values = vec![vec![None; n]; n];
    for i in 0..n {
        values[i][i] = Some(1.0);
        for j in (i + 1)..n {
            let common = super::agreement::common_scored(ordered[i], ordered[j]);
            let smc = if common.is_empty() {
                None
            } else {
                let matches = common.iter().filter(|(_, va, vb)| va == vb).count();
                Some(matches as f64 / common.len() as f64)
            };
            values[i][j] = smc;
            values[j][i] = smc;
        }
    }
    Ok(SmcMatrix { entities, values })
}

/// Mean and midpoint-median of one cohort's scores at one aggregation level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohortStats {
    pub mean: f64,
    pub median: f64,
}

fn stats_over(points: &mut [u64]) -> CohortStats {
    points.sort_unstable();
    let n = points.len();
    let mean = points.iter().sum::<u64>() as f64 / n as f64;
    let median = if n % 2 == 1 {
        points[n / 2] as f64
    } else {
        (points[n / 2 - 1] + points[n / 2]) as f64 / 2.0
    };
    CohortStats { mean, median }
}

/// Per-cohort summary: entity count, overall stats, and per-subdomain stats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortReport {
    pub per_cohort: BTreeMap<String, CohortLevels>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortLevels {
    pub count: usize,
    pub overall: CohortStats,
    pub per_subdomain: BTreeMap<String, CohortStats>,
}

/// Summarizes aggregate point totals by cohort, overall and per subdomain.
///
/// `grouping` must assign a cohort to exactly the entities present in
/// `reports`, and all reports must break down into the same subdomains.
pub fn group_compare(
    reports: &BTreeMap<String, AggregateReport>,
    grouping: &BTreeMap<String, String>,
) -> Result<CohortReport> {
    if reports.is_empty() {
        return Err(Error::invalid("no reports to group"));
    }
    for entity in reports.keys() {
        if !grouping.contains_key(entity) {
            return Err(Error::invalid(format!("entity {entity} has no cohort")));
        }
    }
    for entity in grouping.keys() {
        if !reports.contains_key(entity) {
            return Err(Error::invalid(format!(
                "cohort assignment for unknown entity {entity}"
            )));
        }
    }
    let subdomains: BTreeSet<&String> = reports
        .values()
        .next()
        .map(|r| r.per_subdomain.keys().collect())
        .unwrap_or_default();
    for report in reports.values() {
        if report.per_subdomain.keys().collect::<BTreeSet<_>>() != subdomains {
            return Err(Error::invalid(format!(
                "report for {} breaks down into different subdomains",
                report.entity_id
            )));
        }
    }

    let mut members: BTreeMap<&str, Vec<&AggregateReport>> = BTreeMap::new();
    for (entity, cohort) in grouping {
        members.entry(cohort).or_default().push(&reports[entity]);
    }

    let mut per_cohort = BTreeMap::new();
    for (cohort, reports) in members {
        let mut overall: Vec<u64> = reports.iter().map(|r| r.overall.points).collect();
        let mut per_subdomain = BTreeMap::new();
        for sub in &subdomains {
            let mut points: Vec<u64> = reports
                .iter()
                .map(|r| r.per_subdomain[*sub].points)
                .collect();
            per_subdomain.insert((*sub).clone(), stats_over(&mut points));
        }
        per_cohort.insert(
            cohort.to_string(),
            CohortLevels {
                count: reports.len(),
                overall: stats_over(&mut overall),
                per_subdomain,
            },
        );
    }
    Ok(CohortReport { per_cohort })
}

/// One entity's change between two editions, in points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub overall: i64,
    pub per_subdomain: BTreeMap<String, i64>,
}

/// Edition-over-edition changes for the entities present in both editions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    pub per_entity: BTreeMap<String, DiffEntry>,
    pub mean_overall: f64,
    pub mean_per_subdomain: BTreeMap<String, f64>,
}

/// Computes new − old per entity over the intersection of the two maps,
/// plus mean deltas. Entities appearing in only one edition are ignored;
/// an empty intersection is an error. Old and new reports for an entity must
/// share the same subdomain breakdown.
pub fn longitudinal_diff(
    old: &BTreeMap<String, AggregateReport>,
    new: &BTreeMap<String, AggregateReport>,
) -> Result<DiffReport> {
    let mut per_entity = BTreeMap::new();
    for (entity, old_report) in old {
        let Some(new_report) = new.get(entity) else {
            continue;
        };
        if old_report.per_subdomain.keys().ne(new_report.per_subdomain.keys()) {
            return Err(Error::invalid(format!(
                "editions break {entity} down into different subdomains"
            )));
        }
        let per_subdomain = old_report
            .per_subdomain
            .iter()
            .map(|(sub, old_level)| {
                let delta = new_report.per_subdomain[sub].points as i64 - old_level.points as i64;
                (sub.clone(), delta)
            })
            .collect();
        per_entity.insert(
            entity.clone(),
            DiffEntry {
                overall: new_report.overall.points as i64 - old_report.overall.points as i64,
                per_subdomain,
            },
        );
    }
    if per_entity.is_empty() {
        return Err(Error::invalid("no entity appears in both editions"));
    }

    let n = per_entity.len() as f64;
    let mean_overall = per_entity.values().map(|d| d.overall as f64).sum::<f64>() / n;
    let mut mean_per_subdomain = BTreeMap::new();
    let subdomains: BTreeSet<&String> = per_entity
        .values()
        .flat_map(|d| d.per_subdomain.keys())
        .collect();
    for sub in subdomains {
        let deltas: Vec<f64> = per_entity
            .values()
            .filter_map(|d| d.per_subdomain.get(sub).map(|v| *v as f64))
            .collect();
        mean_per_subdomain.insert(sub.clone(), deltas.iter().sum::<f64>() / deltas.len() as f64);
    }
    Ok(DiffReport {
        per_entity,
        mean_overall,
        mean_per_subdomain,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::super::{aggregate, ScoreValue};
    use super::*;
    use proptest::prelude::*;

    fn report(entity: &str, overall: u64, subdomains: &[(&str, u64)]) -> AggregateReport {
        use super::super::LevelScore;
        AggregateReport {
            entity_id: entity.into(),
            overall: LevelScore {
                points: overall,
                max: 100,
                percentage: Some(overall as f64 / 100.0),
            },
            per_domain: BTreeMap::new(),
            per_subdomain: subdomains
                .iter()
                .map(|(s, p)| {
                    (
                        s.to_string(),
                        LevelScore {
                            points: *p,
                            max: 10,
                            percentage: Some(*p as f64 / 10.0),
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn identical_sheets_have_unit_smc() {
        let a = sheet_with("final", "acme", &[("data-1", 1), ("data-2", 0)]);
        let b = sheet_with("final", "zephyr", &[("data-1", 1), ("data-2", 0)]);
        let matrix = smc_matrix(&[a, b]).unwrap();
        assert_eq!(matrix.get("acme", "zephyr"), Some(1.0));
        assert_eq!(matrix.get("acme", "acme"), Some(1.0));
    }

    #[test]
    fn total_disagreement_has_zero_smc() {
        let a = sheet_with("final", "acme", &[("data-1", 1), ("data-2", 0)]);
        let b = sheet_with("final", "zephyr", &[("data-1", 0), ("data-2", 1)]);
        let matrix = smc_matrix(&[a, b]).unwrap();
        assert_eq!(matrix.get("acme", "zephyr"), Some(0.0));
    }

    #[test]
    fn smc_87_of_100() {
        let mut a = ScoreSheet::new("final", "acme");
        let mut b = ScoreSheet::new("final", "zephyr");
        for i in 0..100 {
            let id = format!("ind-{i:03}");
            a.scores.insert(id.clone(), ScoreValue::Scored(1));
            b.scores
                .insert(id, ScoreValue::Scored(u32::from(i >= 13)));
        }
        let matrix = smc_matrix(&[a, b]).unwrap();
        assert_eq!(matrix.get("acme", "zephyr"), Some(0.87));
    }

    #[test]
    fn smc_skips_unshared_indicators_and_marks_disjoint_pairs_missing() {
        let a = sheet_with("final", "acme", &[("data-1", 1), ("data-2", 1)]);
        let mut b = sheet_with("final", "zephyr", &[("data-1", 1), ("compute-1", 0)]);
        b.scores.insert("data-2".into(), ScoreValue::NotApplicable);
        let c = sheet_with("final", "orion", &[("access-1", 1)]);

        let matrix = smc_matrix(&[a, b, c]).unwrap();
        // Only data-1 is scored by both acme and zephyr.
        assert_eq!(matrix.get("acme", "zephyr"), Some(1.0));
        assert_eq!(matrix.get("acme", "orion"), None);
        assert_eq!(matrix.get("orion", "orion"), Some(1.0));
    }

    #[test]
    fn smc_rejects_degenerate_inputs() {
        let a = sheet_with("final", "acme", &[("data-1", 1)]);
        assert!(smc_matrix(std::slice::from_ref(&a)).is_err());
        let dup = a.clone();
        assert!(smc_matrix(&[a, dup]).is_err());
    }

    #[test]
    fn cohort_means_and_medians() {
        let reports = BTreeMap::from([
            ("acme".to_string(), report("acme", 50, &[("data", 5)])),
            ("nova".to_string(), report("nova", 60, &[("data", 7)])),
            ("zephyr".to_string(), report("zephyr", 40, &[("data", 2)])),
        ]);
        let grouping = BTreeMap::from([
            ("acme".to_string(), "open".to_string()),
            ("nova".to_string(), "open".to_string()),
            ("zephyr".to_string(), "closed".to_string()),
        ]);
        let cohorts = group_compare(&reports, &grouping).unwrap();

        let open = &cohorts.per_cohort["open"];
        assert_eq!(open.count, 2);
        assert_eq!(open.overall.mean, 55.0);
        // Even-sized cohort: median is the midpoint of the middle pair.
        assert_eq!(open.overall.median, 55.0);
        assert_eq!(open.per_subdomain["data"].mean, 6.0);

        let closed = &cohorts.per_cohort["closed"];
        assert_eq!(closed.count, 1);
        assert_eq!(closed.overall.mean, 40.0);
        assert_eq!(closed.overall.median, 40.0);
    }

    #[test]
    fn odd_cohort_median_is_the_middle_value() {
        let reports = BTreeMap::from([
            ("a".to_string(), report("a", 10, &[])),
            ("b".to_string(), report("b", 90, &[])),
            ("c".to_string(), report("c", 30, &[])),
        ]);
        let grouping: BTreeMap<String, String> = reports
            .keys()
            .map(|e| (e.clone(), "all".to_string()))
            .collect();
        let cohorts = group_compare(&reports, &grouping).unwrap();
        assert_eq!(cohorts.per_cohort["all"].overall.median, 30.0);
    }

    #[test]
    fn grouping_must_cover_exactly_the_reported_entities() {
        let reports = BTreeMap::from([("acme".to_string(), report("acme", 50, &[]))]);
        assert!(group_compare(&reports, &BTreeMap::new()).is_err());
        let grouping = BTreeMap::from([
            ("acme".to_string(), "open".to_string()),
            ("ghost".to_string(), "open".to_string()),
        ]);
        assert!(group_compare(&reports, &grouping).is_err());
    }

    #[test]
    fn diff_of_identical_editions_is_zero() {
        let reports = BTreeMap::from([
            ("acme".to_string(), report("acme", 50, &[("data", 5)])),
            ("nova".to_string(), report("nova", 60, &[("data", 7)])),
        ]);
        let diff = longitudinal_diff(&reports, &reports).unwrap();
        assert_eq!(diff.per_entity["acme"].overall, 0);
        assert_eq!(diff.mean_overall, 0.0);
        assert_eq!(diff.mean_per_subdomain["data"], 0.0);
    }

    #[test]
    fn diff_reports_per_entity_change_over_the_intersection() {
        let old = BTreeMap::from([
            ("acme".to_string(), report("acme", 30, &[("data", 2)])),
            ("gone".to_string(), report("gone", 70, &[("data", 9)])),
        ]);
        let new = BTreeMap::from([
            ("acme".to_string(), report("acme", 80, &[("data", 8)])),
            ("fresh".to_string(), report("fresh", 20, &[("data", 1)])),
        ]);
        let diff = longitudinal_diff(&old, &new).unwrap();
        assert_eq!(diff.per_entity.len(), 1);
        assert_eq!(diff.per_entity["acme"].overall, 50);
        assert_eq!(diff.per_entity["acme"].per_subdomain["data"], 6);
        assert_eq!(diff.mean_overall, 50.0);
    }

    #[test]
    fn diff_mean_over_eight_entities() {
        let mut old = BTreeMap::new();
        let mut new = BTreeMap::new();
        // Deltas: 19*8 = 152 split as constructed below.
        let deltas: [i64; 8] = [50, 30, 25, 20, 15, 10, 2, 0];
        assert_eq!(deltas.iter().sum::<i64>(), 152);
        for (i, d) in deltas.iter().enumerate() {
            let entity = format!("dev-{i}");
            old.insert(entity.clone(), report(&entity, 30, &[]));
            new.insert(entity.clone(), report(&entity, (30 + d) as u64, &[]));
        }
        let diff = longitudinal_diff(&old, &new).unwrap();
        assert_eq!(diff.mean_overall, 19.0);
    }

    #[test]
    fn diff_requires_a_shared_entity() {
        let old = BTreeMap::from([("acme".to_string(), report("acme", 30, &[]))]);
        let new = BTreeMap::from([("nova".to_string(), report("nova", 80, &[]))]);
        assert!(longitudinal_diff(&old, &new).is_err());
    }

    #[test]
    fn aggregate_reports_feed_cohorts_end_to_end() {
        let schema = toy_schema();
        let full = sheet_with(
            "final",
            "acme",
            &[
                ("data-1", 1),
                ("data-2", 1),
                ("compute-1", 1),
                ("access-1", 1),
                ("access-2", 1),
                ("impact-1", 1),
            ],
        );
        let sparse = sheet_with(
            "final",
            "nova",
            &[
                ("data-1", 0),
                ("data-2", 1),
                ("compute-1", 0),
                ("access-1", 1),
                ("access-2", 0),
                ("impact-1", 0),
            ],
        );
        let reports = BTreeMap::from([
            ("acme".to_string(), aggregate(&full, &schema).unwrap()),
            ("nova".to_string(), aggregate(&sparse, &schema).unwrap()),
        ]);
        let grouping = BTreeMap::from([
            ("acme".to_string(), "all".to_string()),
            ("nova".to_string(), "all".to_string()),
        ]);
        let cohorts = group_compare(&reports, &grouping).unwrap();
        assert_eq!(cohorts.per_cohort["all"].overall.mean, 4.0);
    }

    proptest! {
        #[test]
        fn smc_matrix_is_symmetric_with_unit_diagonal(
            cells in proptest::collection::vec(
                proptest::collection::vec(proptest::option::of(0u32..2), 8),
                2..5,
            )
        ) {
            let sheets: Vec<ScoreSheet> = cells
                .iter()
                .enumerate()
                .map(|(e, values)| {
                    let mut sheet = ScoreSheet::new("final", format!("entity-{e}"));
                    for (i, v) in values.iter().enumerate() {
                        if let Some(v) = v {
                            sheet.scores.insert(format!("ind-{i}"), ScoreValue::Scored(*v));
                        }
                    }
                    sheet
                })
                .collect();
            let matrix = smc_matrix(&sheets).unwrap();
            let n = matrix.entities.len();
            for i in 0..n {
                prop_assert_eq!(matrix.values[i][i], Some(1.0));
                for j in 0..n {
                    prop_assert_eq!(matrix.values[i][j], matrix.values[j][i]);
                    if let Some(v) = matrix.values[i][j] {
                        prop_assert!((0.0..=1.0).contains(&v));
                    }
                }
            }
        }
    }
}
