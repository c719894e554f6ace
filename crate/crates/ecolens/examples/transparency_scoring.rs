// Scoring developer transparency against an indicator rubric: two raters
// score the same entity, disagreements get adjudicated, and the resolved
// sheet aggregates into domain and overall scores. A second entity makes
// the similarity matrix worth printing.

use std::collections::BTreeMap;

use ecolens::index::{
    aggregate, agreement_rate, cohens_kappa, resolve, smc_matrix, Indicator, IndicatorSchema,
    Scale, ScoreSheet, ScoreValue,
};

fn schema() -> IndicatorSchema {
    let mut indicators = Vec::new();
    let spec: [(&str, &str, &[&str]); 2] = [
        ("supply-chain", "data", &["data-sources", "data-consent", "data-labor"]),
        ("deployment", "access", &["model-access", "usage-policy", "incident-reporting"]),
    ];
    for (domain, subdomain, ids) in spec {
        for id in ids {
            indicators.push(Indicator {
                id: id.to_string(),
                name: id.replace('-', " "),
                domain: domain.to_string(),
                subdomain: subdomain.to_string(),
                scale: Scale::Binary,
            });
        }
    }
    IndicatorSchema::new(indicators, false).expect("well-formed rubric")
}

fn sheet(rater: &str, entity: &str, scores: [(&str, u32); 6]) -> ScoreSheet {
    let mut s = ScoreSheet::new(rater, entity);
    for (id, v) in scores {
        s.scores.insert(id.to_string(), ScoreValue::Scored(v));
    }
    s
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rubric = schema();

    let rater_a = sheet(
        "imani",
        "acme/condor-34b",
        [
            ("data-sources", 1),
            ("data-consent", 0),
            ("data-labor", 0),
            ("model-access", 1),
            ("usage-policy", 1),
            ("incident-reporting", 0),
        ],
    );
    let rater_b = sheet(
        "petra",
        "acme/condor-34b",
        [
            ("data-sources", 1),
            ("data-consent", 1), // reads the consent clause differently
            ("data-labor", 0),
            ("model-access", 1),
            ("usage-policy", 0), // found no published policy
            ("incident-reporting", 0),
        ],
    );

    println!("raw agreement  {:.3}", agreement_rate(&rater_a, &rater_b)?);
    if let Some(kappa) = cohens_kappa(&rater_a, &rater_b)? {
        println!("Cohen's kappa  {kappa:.3}");
    }

    // Adjudicated values for exactly the contested indicators.
    let rulings = BTreeMap::from([
        ("data-consent".to_string(), ScoreValue::Scored(0)),
        ("usage-policy".to_string(), ScoreValue::Scored(1)),
    ]);
    let resolved = resolve(&rater_a, &rater_b, &rulings)?;
    resolved.validate(&rubric)?;

    let report = aggregate(&resolved, &rubric)?;
    println!();
    println!(
        "{}: {} of {} points",
        report.entity_id, report.overall.points, report.overall.max
    );
    for (domain, score) in &report.per_domain {
        println!("  {domain:<13} {}/{}", score.points, score.max);
    }

    // A closed competitor scored by a single rater.
    let rival = sheet(
        "imani",
        "nimbus/stratus-1",
        [
            ("data-sources", 0),
            ("data-consent", 0),
            ("data-labor", 0),
            ("model-access", 1),
            ("usage-policy", 1),
            ("incident-reporting", 1),
        ],
    );
    let m = smc_matrix(&[resolved, rival])?;
    println!();
    println!("disclosure similarity (simple matching):");
    for (i, a) in m.entities.iter().enumerate() {
        for (j, b) in m.entities.iter().enumerate() {
            if i < j {
                match m.values[i][j] {
                    Some(v) => println!("  {a} vs {b}: {v:.3}"),
                    None => println!("  {a} vs {b}: no shared indicators"),
                }
            }
        }
    }
    Ok(())
}
