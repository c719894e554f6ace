// Are model failures piling up on the same instances? Compare the observed
// failure-count distribution against the independence baseline built from
// each model's own failure rate.

use ecolens::homogenization::FailureMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Rows are instances, columns models, 1 marks a failure. The three
    // models fail on the same two instances, never separately.
    let rows = vec![
        vec![1, 1, 1],
        vec![0, 0, 0],
        vec![0, 0, 0],
        vec![1, 1, 1],
        vec![0, 0, 0],
        vec![0, 0, 0],
        vec![0, 0, 0],
        vec![0, 0, 0],
    ];
    let matrix = FailureMatrix::new(
        (0..rows.len()).map(|i| format!("case-{i}")).collect(),
        vec!["aurora".into(), "borealis".into(), "cascade".into()],
        rows,
    )?;

    let report = matrix.analyze()?;
    for (model, rate) in &report.model_failure_rates {
        println!("{model}: failure rate {rate:.3}");
    }
    println!();
    println!("failures  observed  independent");
    for t in 0..report.observed.mass().len() {
        println!(
            "{t:>8}  {:>8.4}  {:>11.4}",
            report.observed.at(t),
            report.baseline.at(t)
        );
    }
    println!();
    println!("systemic failure rate  {:.4}", report.systemic_failure_rate);
    println!(
        "excess mass vs independence: none fail +{:.4}, all fail +{:.4}",
        report.endpoint_excess.0, report.endpoint_excess.1
    );
    Ok(())
}
