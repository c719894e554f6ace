//! Table builders for the index subcommand: scoring, rater agreement and
//! resolution, cross-entity correlation, cohort comparison, and
//! edition-over-edition diffs.
//!
//! Sheets group by (entity, edition); operations that need one canonical
//! sheet per group reject bundles still carrying multiple raters and point
//! at `index agree` / `index resolve` instead.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{IndexOp, RunError, Sink};
use crate::index::{
    aggregate, agreement_rate, cohens_kappa, group_compare, longitudinal_diff,
    new_information_split, resolve, smc_matrix, IndicatorSchema, LevelScore, ScoreSheet,
    ScoreValue,
};
use crate::ingest::{save_dataset, Bundle, DataFormat, Dataset, DatasetManifest};
use crate::report::{Cell, OutputFormat, Table};

type SheetRef<'a> = (&'a DatasetManifest, &'a ScoreSheet);

pub(super) fn run(op: &IndexOp, bundle: &Bundle, sink: &Sink<'_>) -> Result<Vec<Table>, RunError> {
    match op {
        IndexOp::Score => {
            let sheets = sheets_or_err(bundle)?;
            score_tables(bundle, &sheets)
        }
        IndexOp::Aggregate => {
            let finals = finals(bundle)?;
            score_tables(bundle, &finals)
        }
        IndexOp::Agree => agree(bundle),
        IndexOp::Resolve { resolutions } => resolve_pairs(bundle, resolutions, sink),
        IndexOp::Correlate => correlate(bundle),
        IndexOp::Cohorts => cohorts(bundle),
        IndexOp::Diff => diff(bundle),
    }
}

fn sheets_or_err(bundle: &Bundle) -> Result<Vec<SheetRef<'_>>, RunError> {
    let sheets = bundle.score_sheets();
    if sheets.is_empty() {
        return Err(RunError::data("bundle has no score_sheet datasets"));
    }
    Ok(sheets)
}

/// First bundled schema the sheet validates against. Load already enforced
/// this when schemas are present, so a miss here means none were bundled.
fn schema_for<'a>(
    bundle: &'a Bundle,
    sheet: &ScoreSheet,
    label: &str,
) -> Result<&'a IndicatorSchema, RunError> {
    let schemas = bundle.schemas();
    if schemas.is_empty() {
        return Err(RunError::data("bundle has no schema dataset to score against"));
    }
    schemas
        .iter()
        .map(|(_, schema)| *schema)
        .find(|schema| sheet.validate(schema).is_ok())
        .ok_or_else(|| RunError::data(format!("{label}: sheet does not fit any bundled schema")))
}

fn grouped<'a>(sheets: &[SheetRef<'a>]) -> BTreeMap<(String, Option<String>), Vec<SheetRef<'a>>> {
    let mut groups: BTreeMap<(String, Option<String>), Vec<SheetRef<'a>>> = BTreeMap::new();
    for &(manifest, sheet) in sheets {
        groups
            .entry((sheet.entity_id.clone(), manifest.edition.clone()))
            .or_default()
            .push((manifest, sheet));
    }
    groups
}

/// One sheet per (entity, edition), in key order.
fn finals(bundle: &Bundle) -> Result<Vec<SheetRef<'_>>, RunError> {
    let sheets = sheets_or_err(bundle)?;
    let mut finals = Vec::new();
    for ((entity, edition), members) in grouped(&sheets) {
        if members.len() > 1 {
            let label = match edition {
                Some(e) => format!("entity {entity} in edition {e}"),
                None => format!("entity {entity}"),
            };
            return Err(RunError::data(format!(
                "{label} has {} sheets; expected one final sheet per entity \
                 (merge raters first, see `index agree` and `index resolve`)",
                members.len()
            )));
        }
        finals.push(members[0]);
    }
    Ok(finals)
}

fn opt_text(value: &Option<String>) -> Cell {
    value.clone().map(Cell::Text).unwrap_or(Cell::Missing)
}

fn level_cells(score: &LevelScore) -> [Cell; 3] {
    [
        score.points.into(),
        score.max.into(),
        Cell::opt_float(score.percentage),
    ]
}

fn score_tables(bundle: &Bundle, sheets: &[SheetRef<'_>]) -> Result<Vec<Table>, RunError> {
    let mut overall = Table::new(
        "index_overall",
        &["dataset", "entity", "rater", "edition", "points", "max", "percentage"],
    );
    let mut domains = Table::new(
        "index_domains",
        &["entity", "rater", "edition", "domain", "points", "max", "percentage"],
    );
    let mut subdomains = Table::new(
        "index_subdomains",
        &["entity", "rater", "edition", "subdomain", "points", "max", "percentage"],
    );
    let mut new_information = Table::new(
        "new_information",
        &["entity", "rater", "edition", "pre_existing_points", "newly_disclosed_points"],
    );
    for &(manifest, sheet) in sheets {
        let ctx = |e: crate::Error| RunError::data(format!("dataset {}: {e}", manifest.name));
        let schema = schema_for(bundle, sheet, &manifest.name)?;
        let report = aggregate(sheet, schema).map_err(ctx)?;
        let identity = [
            Cell::text(&sheet.entity_id),
            Cell::text(&sheet.rater_id),
            opt_text(&manifest.edition),
        ];
        let mut row = vec![Cell::text(&manifest.name)];
        row.extend(identity.clone());
        row.extend(level_cells(&report.overall));
        overall.push(row);
        for (domain, score) in &report.per_domain {
            let mut row = identity.to_vec();
            row.push(domain.as_str().into());
            row.extend(level_cells(score));
            domains.push(row);
        }
        for (subdomain, score) in &report.per_subdomain {
            let mut row = identity.to_vec();
            row.push(subdomain.as_str().into());
            row.extend(level_cells(score));
            subdomains.push(row);
        }
        let (pre_existing, newly_disclosed) = new_information_split(sheet, schema).map_err(ctx)?;
        let mut row = identity.to_vec();
        row.push(pre_existing.into());
        row.push(newly_disclosed.into());
        new_information.push(row);
    }
    Ok(vec![overall, domains, subdomains, new_information])
}

fn agree(bundle: &Bundle) -> Result<Vec<Table>, RunError> {
    let sheets = sheets_or_err(bundle)?;
    let mut agreement = Table::new(
        "rater_agreement",
        &[
            "entity",
            "edition",
            "rater_a",
            "rater_b",
            "common_indicators",
            "agreement_rate",
            "kappa",
        ],
    );
    let mut disagreements = Table::new(
        "rater_disagreements",
        &["entity", "edition", "indicator", "rater_a", "value_a", "rater_b", "value_b"],
    );
    let mut any_multi = false;
    for ((entity, edition), mut members) in grouped(&sheets) {
        if members.len() < 2 {
            continue;
        }
        any_multi = true;
        members.sort_by(|x, y| x.1.rater_id.cmp(&y.1.rater_id));
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let a = members[i].1;
                let b = members[j].1;
                let ctx = |e: crate::Error| {
                    RunError::data(format!(
                        "entity {entity}, raters {} and {}: {e}",
                        a.rater_id, b.rater_id
                    ))
                };
                let rate = agreement_rate(a, b).map_err(ctx)?;
                let kappa = cohens_kappa(a, b).map_err(ctx)?;
                let common = a
                    .scores
                    .iter()
                    .filter(|(id, value)| {
                        matches!(value, ScoreValue::Scored(_))
                            && matches!(b.scores.get(*id), Some(ScoreValue::Scored(_)))
                    })
                    .count();
                agreement.push(vec![
                    entity.as_str().into(),
                    opt_text(&edition),
                    a.rater_id.as_str().into(),
                    b.rater_id.as_str().into(),
                    common.into(),
                    rate.into(),
                    Cell::opt_float(kappa),
                ]);
                for (id, value_a) in &a.scores {
                    let Some(value_b) = b.scores.get(id) else {
                        continue;
                    };
                    if value_a != value_b {
                        disagreements.push(vec![
                            entity.as_str().into(),
                            opt_text(&edition),
                            id.as_str().into(),
                            a.rater_id.as_str().into(),
                            value_a.to_string().into(),
                            b.rater_id.as_str().into(),
                            value_b.to_string().into(),
                        ]);
                    }
                }
            }
        }
    }
    if !any_multi {
        return Err(RunError::data("no entity has sheets from more than one rater"));
    }
    Ok(vec![agreement, disagreements])
}

fn resolve_pairs(
    bundle: &Bundle,
    resolutions_path: &Path,
    sink: &Sink<'_>,
) -> Result<Vec<Table>, RunError> {
    let text = std::fs::read_to_string(resolutions_path).map_err(|e| {
        RunError::config(format!("cannot read {}: {e}", resolutions_path.display()))
    })?;
    let adjudications: BTreeMap<String, BTreeMap<String, ScoreValue>> =
        serde_json::from_str(&text)
            .map_err(|e| RunError::data(format!("{}: {e}", resolutions_path.display())))?;
    if adjudications.is_empty() {
        return Err(RunError::data(format!(
            "{}: no entities to resolve",
            resolutions_path.display()
        )));
    }
    let sheets = sheets_or_err(bundle)?;
    let schemas = bundle.schemas();
    std::fs::create_dir_all(sink.out_dir).map_err(|e| {
        RunError::config(format!("cannot create {}: {e}", sink.out_dir.display()))
    })?;
    let mut resolved = Table::new(
        "resolved_sheet",
        &["entity", "rater", "indicator", "score", "source", "justification", "new_information"],
    );
    for (entity, decisions) in &adjudications {
        let pair: Vec<SheetRef<'_>> = sheets
            .iter()
            .copied()
            .filter(|(_, sheet)| sheet.entity_id == *entity)
            .collect();
        if pair.len() != 2 {
            return Err(RunError::data(format!(
                "entity {entity} has {} sheets; resolve expects exactly two raters",
                pair.len()
            )));
        }
        let (first, second) = if pair[0].1.rater_id <= pair[1].1.rater_id {
            (pair[0].1, pair[1].1)
        } else {
            (pair[1].1, pair[0].1)
        };
        let merged = resolve(first, second, decisions)
            .map_err(|e| RunError::data(format!("entity {entity}: {e}")))?;
        if !schemas.is_empty()
            && !schemas.iter().any(|(_, schema)| merged.validate(schema).is_ok())
        {
            return Err(RunError::data(format!(
                "resolved sheet for {entity} does not fit any bundled schema; \
                 check the adjudicated scores"
            )));
        }
        for (id, value) in &merged.scores {
            resolved.push(vec![
                entity.as_str().into(),
                merged.rater_id.as_str().into(),
                id.as_str().into(),
                value.to_string().into(),
                merged.sources.get(id).map(Cell::text).unwrap_or(Cell::Missing),
                merged.justifications.get(id).map(Cell::text).unwrap_or(Cell::Missing),
                Cell::bool(merged.new_information.contains(id)),
            ]);
        }
        let base = format!("resolved_{}", sanitize(entity));
        for format in sink.formats {
            let data_format = match format {
                OutputFormat::Csv => DataFormat::Csv,
                OutputFormat::Json => DataFormat::Json,
                OutputFormat::Md => continue,
            };
            let path = sink.out_dir.join(format!("{base}.{}", data_format.extension()));
            save_dataset(&Dataset::ScoreSheet(merged.clone()), data_format, &path)
                .map_err(|e| RunError::config(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok(vec![resolved])
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

fn correlate(bundle: &Bundle) -> Result<Vec<Table>, RunError> {
    let finals = finals(bundle)?;
    let mut by_edition: BTreeMap<Option<String>, Vec<&ScoreSheet>> = BTreeMap::new();
    for (manifest, sheet) in &finals {
        by_edition.entry(manifest.edition.clone()).or_default().push(sheet);
    }
    let mut table = Table::new("smc_matrix", &["edition", "entity_a", "entity_b", "smc"]);
    let mut any_pair = false;
    for (edition, sheets) in &by_edition {
        if sheets.len() < 2 {
            continue;
        }
        any_pair = true;
        let owned: Vec<ScoreSheet> = sheets.iter().map(|s| (*s).clone()).collect();
        let matrix = smc_matrix(&owned).map_err(|e| RunError::data(e.to_string()))?;
        for i in 0..matrix.entities.len() {
            for j in (i + 1)..matrix.entities.len() {
                table.push(vec![
                    opt_text(edition),
                    matrix.entities[i].as_str().into(),
                    matrix.entities[j].as_str().into(),
                    Cell::opt_float(matrix.values[i][j]),
                ]);
            }
        }
    }
    if !any_pair {
        return Err(RunError::data(
            "no edition has final sheets from at least two entities",
        ));
    }
    Ok(vec![table])
}

fn cohorts(bundle: &Bundle) -> Result<Vec<Table>, RunError> {
    let finals = finals(bundle)?;
    let mut by_edition: BTreeMap<Option<String>, Vec<SheetRef<'_>>> = BTreeMap::new();
    for &(manifest, sheet) in &finals {
        by_edition.entry(manifest.edition.clone()).or_default().push((manifest, sheet));
    }
    let mut table = Table::new(
        "index_cohorts",
        &["edition", "cohort", "level", "entities", "mean_points", "median_points"],
    );
    for (edition, members) in &by_edition {
        let mut reports = BTreeMap::new();
        let mut grouping = BTreeMap::new();
        for &(manifest, sheet) in members {
            let Some(cohort) = manifest.cohort.clone() else {
                return Err(RunError::data(format!(
                    "dataset {} has no cohort label; cohorts needs one on every sheet",
                    manifest.name
                )));
            };
            let schema = schema_for(bundle, sheet, &manifest.name)?;
            let report = aggregate(sheet, schema)
                .map_err(|e| RunError::data(format!("dataset {}: {e}", manifest.name)))?;
            reports.insert(sheet.entity_id.clone(), report);
            grouping.insert(sheet.entity_id.clone(), cohort);
        }
        let comparison =
            group_compare(&reports, &grouping).map_err(|e| RunError::data(e.to_string()))?;
        for (cohort, levels) in &comparison.per_cohort {
            table.push(vec![
                opt_text(edition),
                cohort.as_str().into(),
                "overall".into(),
                levels.count.into(),
                levels.overall.mean.into(),
                levels.overall.median.into(),
            ]);
            for (subdomain, stats) in &levels.per_subdomain {
                table.push(vec![
                    opt_text(edition),
                    cohort.as_str().into(),
                    subdomain.as_str().into(),
                    levels.count.into(),
                    stats.mean.into(),
                    stats.median.into(),
                ]);
            }
        }
    }
    Ok(vec![table])
}

fn diff(bundle: &Bundle) -> Result<Vec<Table>, RunError> {
    let finals = finals(bundle)?;
    let mut editions: BTreeSet<&str> = BTreeSet::new();
    for (manifest, _) in &finals {
        let Some(edition) = manifest.edition.as_deref() else {
            return Err(RunError::data(format!(
                "dataset {} has no edition label; diff needs one on every sheet",
                manifest.name
            )));
        };
        editions.insert(edition);
    }
    if editions.len() != 2 {
        let found: Vec<&str> = editions.into_iter().collect();
        return Err(RunError::data(format!(
            "diff needs exactly two editions, found {}: {}",
            found.len(),
            found.join(", ")
        )));
    }
    let mut ordered = editions.into_iter();
    let old_edition = ordered.next().expect("two editions");
    let new_edition = ordered.next().expect("two editions");
    let mut old = BTreeMap::new();
    let mut new = BTreeMap::new();
    for &(manifest, sheet) in &finals {
        let schema = schema_for(bundle, sheet, &manifest.name)?;
        let report = aggregate(sheet, schema)
            .map_err(|e| RunError::data(format!("dataset {}: {e}", manifest.name)))?;
        if manifest.edition.as_deref() == Some(old_edition) {
            old.insert(sheet.entity_id.clone(), report);
        } else {
            new.insert(sheet.entity_id.clone(), report);
        }
    }
    let report = longitudinal_diff(&old, &new).map_err(|e| RunError::data(e.to_string()))?;
    let mut table = Table::new(
        "index_diff",
        &["old_edition", "new_edition", "entity", "level", "old_points", "new_points", "delta"],
    );
    for (entity, entry) in &report.per_entity {
        let old_report = &old[entity];
        let new_report = &new[entity];
        table.push(vec![
            old_edition.into(),
            new_edition.into(),
            entity.as_str().into(),
            "overall".into(),
            old_report.overall.points.into(),
            new_report.overall.points.into(),
            entry.overall.into(),
        ]);
        for (subdomain, delta) in &entry.per_subdomain {
            table.push(vec![
                old_edition.into(),
                new_edition.into(),
                entity.as_str().into(),
                subdomain.as_str().into(),
                old_report.per_subdomain[subdomain].points.into(),
                new_report.per_subdomain[subdomain].points.into(),
                (*delta).into(),
            ]);
        }
    }
    table.push(vec![
        old_edition.into(),
        new_edition.into(),
        "(mean)".into(),
        "overall".into(),
        Cell::Missing,
        Cell::Missing,
        report.mean_overall.into(),
    ]);
    for (subdomain, delta) in &report.mean_per_subdomain {
        table.push(vec![
            old_edition.into(),
            new_edition.into(),
            "(mean)".into(),
            subdomain.as_str().into(),
            Cell::Missing,
            Cell::Missing,
            (*delta).into(),
        ]);
    }
    Ok(vec![table])
}
