// Head-to-head win rates over a model-by-scenario score table, plus a check
// on whether two metrics would rank the models the same way.

use ecolens::metrics::{
    head_to_head_win_rates, metric_correlation, CorrelationMethod, ScoreTable,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut accuracy = ScoreTable::new();
    let mut f1 = ScoreTable::new();
    let cells = [
        // model, scenario, accuracy, token F1
        ("aurora-70b", "news-qa", 0.81, 0.74),
        ("aurora-70b", "dialogue", 0.66, 0.61),
        ("aurora-70b", "code-docs", 0.72, 0.70),
        ("borealis-8b", "news-qa", 0.74, 0.69),
        ("borealis-8b", "dialogue", 0.66, 0.58),
        ("borealis-8b", "code-docs", 0.55, 0.51),
        ("cascade-mini", "news-qa", 0.52, 0.48),
        ("cascade-mini", "dialogue", 0.49, 0.55),
        ("cascade-mini", "code-docs", 0.31, 0.30),
    ];
    for (model, scenario, acc, tf1) in cells {
        accuracy.insert(model, scenario, acc)?;
        f1.insert(model, scenario, tf1)?;
    }

    println!("win rates on accuracy (ties split):");
    for (model, record) in head_to_head_win_rates(&accuracy, true)? {
        match record {
            Some(r) => println!(
                "  {model:<14} {:.3}  ({:.1} of {} comparisons)",
                r.rate(),
                r.wins,
                r.comparisons
            ),
            None => println!("  {model:<14} never comparable"),
        }
    }

    println!();
    for method in [CorrelationMethod::Pearson, CorrelationMethod::Spearman] {
        let report = metric_correlation(&accuracy, &f1, method);
        println!("accuracy vs token F1, {method:?}:");
        for (scenario, r) in &report.per_scenario {
            match r {
                Some(r) => println!("  {scenario:<12} {r:+.3}"),
                None => println!("  {scenario:<12} undefined"),
            }
        }
        if let Some(summary) = report.summary {
            println!("  mean         {summary:+.3}");
        }
    }
    Ok(())
}
