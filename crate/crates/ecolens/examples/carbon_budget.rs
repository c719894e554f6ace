// Training energy and emissions from hardware disclosures, then serving
// latency from an idealized runtime model and from noisy measurements.

use std::collections::BTreeMap;

use ecolens::efficiency::{
    denoised_runtime, idealized_runtime, training_emissions, training_energy, RuntimeModel,
    TrainingHardwareSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = TrainingHardwareSpec {
        n_gpu: 512,
        w_gpu: 0.4,      // kW per accelerator
        t_train: 720.0,  // hours
        pue: 1.1,
        c_region: 0.37,  // kg CO2 per kWh
    };
    let energy = training_energy(&spec)?;
    println!("training energy     {energy:>12.0} kWh");
    println!(
        "training emissions  {:>12.0} kg CO2",
        training_emissions(energy, spec.c_region)?
    );

    // Encode latency by prompt bucket, then a constant per output token.
    let model = RuntimeModel {
        encode_table: BTreeMap::from([(512, 0.31), (2048, 0.54), (8192, 1.21)]),
        per_token: 0.038,
    };
    println!();
    for (name, prompt, output) in [
        ("short chat", 180, 60),
        ("long summary", 6000, 350),
        ("book-scale prompt", 40_000, 200),
    ] {
        let run = idealized_runtime(prompt, output, &model)?;
        let note = if run.bucket_exceeded {
            " (prompt exceeds the largest bucket)"
        } else {
            ""
        };
        println!(
            "{name:<18} {prompt:>6} -> {output:<4} tokens   {:.2} s via bucket {}{}",
            run.seconds, run.bucket, note
        );
    }

    // Measured latencies are contaminated by queueing; low percentiles
    // approximate the contention-free floor.
    let samples = vec![
        2.11, 1.94, 2.03, 5.61, 1.98, 2.07, 1.91, 2.44, 2.02, 9.80, 2.06, 1.97,
    ];
    println!();
    for p in [0.0, 50.0, 99.0] {
        println!("p{p:<4} measured latency  {:.2} s", denoised_runtime(&samples, p)?);
    }
    Ok(())
}
