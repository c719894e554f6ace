// Calibration of a confidence-emitting classifier: expected calibration
// error, then the accuracy it can buy by abstaining on low confidence.

use ecolens::metrics::{
    accuracy, coverage_accuracy_auc, coverage_accuracy_curve, ece, selective_accuracy,
    PredictionRecord, DEFAULT_ECE_BINS,
};

fn record(id: u32, correct: bool, confidence: f64) -> PredictionRecord {
    PredictionRecord {
        instance_id: format!("q{id}"),
        gold: "a".into(),
        predicted: if correct { "a" } else { "b" }.into(),
        confidence: Some(confidence),
        group_tags: vec![],
        perturbation: None,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Overconfident log: stated confidence runs ahead of actual accuracy.
    let mut log = Vec::new();
    for i in 0..40 {
        log.push(record(i, i % 4 != 0, 0.95)); // 75% correct, says 95%
    }
    for i in 40..80 {
        log.push(record(i, i % 2 == 0, 0.80)); // 50% correct, says 80%
    }

    println!("accuracy              {:.3}", accuracy(&log)?);
    println!("ECE ({DEFAULT_ECE_BINS} bins)          {:.3}", ece(&log, DEFAULT_ECE_BINS)?);
    println!();

    for coverage in [1.0, 0.75, 0.5, 0.25] {
        println!(
            "answer top {:>3.0}% confident  ->  accuracy {:.3}",
            coverage * 100.0,
            selective_accuracy(&log, coverage)?
        );
    }
    println!();
    println!(
        "area under the coverage-accuracy curve  {:.3}",
        coverage_accuracy_auc(&log)?
    );

    // The raw curve, thinned for display.
    let curve = coverage_accuracy_curve(&log)?;
    for (c, a) in curve.iter().step_by(16) {
        println!("  coverage {c:.2}  accuracy {a:.3}");
    }
    Ok(())
}
