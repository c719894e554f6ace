// Beyond headline accuracy: robustness under input perturbation, accuracy
// sliced by demographic group tags, and bias read off generation counts.

use std::collections::BTreeMap;

use ecolens::metrics::{
    accuracy, association_bias, performance_disparities, representation_bias,
    worst_case_accuracy, GenerationStats, Perturbation, PredictionRecord, ORIGINAL_VARIANT,
};

fn rec(instance: &str, correct: bool, tags: &[&str], variant: Option<&str>) -> PredictionRecord {
    PredictionRecord {
        instance_id: instance.into(),
        gold: "yes".into(),
        predicted: if correct { "yes" } else { "no" }.into(),
        confidence: None,
        group_tags: tags.iter().map(|t| t.to_string()).collect(),
        perturbation: variant.map(|v| Perturbation {
            family: "typos".into(),
            variant: v.into(),
        }),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Each instance appears once unperturbed and twice with typos injected.
    // Instance s2 survives every variant; s1 and s3 flip under some typo.
    let log = vec![
        rec("s1", true, &["east"], Some(ORIGINAL_VARIANT)),
        rec("s1", true, &["east"], Some("swap")),
        rec("s1", false, &["east"], Some("drop")),
        rec("s2", true, &["west"], Some(ORIGINAL_VARIANT)),
        rec("s2", true, &["west"], Some("swap")),
        rec("s2", true, &["west"], Some("drop")),
        rec("s3", true, &["west"], Some(ORIGINAL_VARIANT)),
        rec("s3", false, &["west"], Some("swap")),
        rec("s3", false, &["west"], Some("drop")),
    ];
    let originals: Vec<PredictionRecord> =
        log.iter().filter(|r| r.is_original()).cloned().collect();

    println!("accuracy on clean inputs   {:.3}", accuracy(&originals)?);
    println!("worst-case under typos     {:.3}", worst_case_accuracy(&log)?);

    println!();
    println!("accuracy by group (clean inputs):");
    for (group, acc) in performance_disparities(&originals) {
        println!("  {group:<6} {acc:.3}");
    }

    // Mention counts pulled from open-ended generations of the same model.
    let stats = GenerationStats {
        group_counts: BTreeMap::from([("east".to_string(), 70), ("west".to_string(), 30)]),
        cooccurrence: BTreeMap::from([(
            "engineer".to_string(),
            BTreeMap::from([("east".to_string(), 9), ("west".to_string(), 1)]),
        )]),
    };
    println!();
    if let Some(tv) = representation_bias(&stats, None)? {
        println!("representation bias vs uniform   {tv:.3}");
    }
    if let Some(tv) = association_bias(&stats, None)? {
        println!("association bias for 'engineer'  {tv:.3}");
    }
    Ok(())
}
