// Flagging emergent capabilities: a curve counts as emergent when small
// scales sit within a tolerance band of random chance and some larger scale
// clears chance by a minimum jump. Both thresholds are explicit inputs.

use ecolens::scaling::{detect_emergence, CurvePoint, EmergenceVerdict, ScalingCurve};

fn curve(points: &[(f64, f64)], baseline: f64) -> ScalingCurve {
    let points = points
        .iter()
        .map(|&(scale, performance)| CurvePoint { scale, performance })
        .collect();
    ScalingCurve::new(points, baseline).expect("valid curve")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let near_random_tol = 0.05;
    let jump_min = 0.2;

    let tasks = [
        (
            "three-digit addition",
            curve(
                &[(1e20, 0.26), (1e21, 0.24), (1e22, 0.27), (1e23, 0.58), (1e24, 0.81)],
                0.25,
            ),
        ),
        (
            "sentiment",
            // Smooth improvement from the start; never near-random.
            curve(
                &[(1e20, 0.61), (1e21, 0.68), (1e22, 0.74), (1e23, 0.80), (1e24, 0.84)],
                0.50,
            ),
        ),
        (
            "cryptic crosswords",
            // Flat at chance throughout.
            curve(
                &[(1e20, 0.02), (1e21, 0.01), (1e22, 0.03), (1e23, 0.02), (1e24, 0.04)],
                0.02,
            ),
        ),
    ];

    println!("tolerance {near_random_tol}, minimum jump {jump_min}\n");
    for (name, c) in &tasks {
        match detect_emergence(c, near_random_tol, jump_min)? {
            EmergenceVerdict::Emergent { threshold_scale } => {
                println!("{name:<22} EMERGENT, first clears chance at scale {threshold_scale:e}")
            }
            EmergenceVerdict::NotEmergent => println!("{name:<22} not emergent"),
        }
    }
    Ok(())
}
