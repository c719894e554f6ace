// Loading a whole evaluation bundle from its manifest, checking
// cross-dataset consistency, and rendering a result table by hand.
//
// Runs against the fixture bundle shipped with the crate; point it at your
// own manifest with `cargo run --example bundle_walkthrough -- path/to/manifest.json`.

use std::path::{Path, PathBuf};

use ecolens::ingest::{load_bundle, validate_cross};
use ecolens::report::{Cell, Table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let manifest = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .join("manifest.json")
    });

    let bundle = load_bundle(&manifest)?;
    println!("bundle {:?} with {} datasets", bundle.name, bundle.entries.len());
    println!("  prediction logs   {}", bundle.prediction_logs().len());
    println!("  failure matrices  {}", bundle.failure_matrices().len());
    println!("  ranked lists      {}", bundle.ranked_lists().len());
    println!("  score sheets      {}", bundle.score_sheets().len());
    println!("  hardware specs    {}", bundle.hardware_specs().len());
    println!("  scaling curves    {}", bundle.scaling_curves().len());

    let violations = validate_cross(&bundle);
    if violations.is_empty() {
        println!("\ncross-dataset checks: clean");
    } else {
        for v in &violations {
            println!("\n{}: {}", v.dataset, v.message);
        }
    }

    // Any analysis can be rendered through the same table type the CLI uses.
    let mut table = Table::new("log_sizes", &["dataset", "scenario", "records"]);
    for (manifest, log) in bundle.prediction_logs() {
        table.push(vec![
            Cell::text(&manifest.name),
            manifest
                .scenario
                .clone()
                .map(Cell::text)
                .unwrap_or(Cell::Missing),
            Cell::from(log.len()),
        ]);
    }
    println!("\n{}", table.to_markdown(3));
    Ok(())
}
