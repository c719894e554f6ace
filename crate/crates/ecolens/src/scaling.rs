//! Emergence detection on scaling curves: performance stays near the random
//! baseline at small scales, then jumps past it at some critical scale.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One measured point of a scaling curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Model scale in whatever unit the curve was measured (training FLOPs,
    /// parameters, ...). Only the ordering of scales matters for detection.
    pub scale: f64,
    pub performance: f64,
}

/// A performance-vs-scale curve with the chance level of its metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCurve {
    points: Vec<CurvePoint>,
    random_baseline: f64,
}

impl ScalingCurve {
    pub fn new(points: Vec<CurvePoint>, random_baseline: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("scaling curve needs at least two points"));
        }
        if !random_baseline.is_finite() {
            return Err(Error::invalid("random baseline must be finite"));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.scale.is_finite() || p.scale <= 0.0 {
                return Err(Error::invalid(format!(
                    "point {i}: scale must be a positive finite number, got {}",
                    p.scale
                )));
            }
            if !p.performance.is_finite() {
                return Err(Error::invalid(format!("point {i}: performance must be finite")));
            }
            if i > 0 && p.scale <= points[i - 1].scale {
                return Err(Error::invalid(format!(
                    "point {i}: scales must be strictly increasing ({} after {})",
                    p.scale,
                    points[i - 1].scale
                )));
            }
        }
        Ok(Self {
            points,
            random_baseline,
        })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn random_baseline(&self) -> f64 {
        self.random_baseline
    }
}

/// Outcome of emergence detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EmergenceVerdict {
    /// The curve sits near the baseline at its smallest scale and later
    /// clears it by the jump threshold; `threshold_scale` is the scale of
    /// the first clearing point.
    Emergent { threshold_scale: f64 },
    NotEmergent,
}

impl EmergenceVerdict {
    pub fn is_emergent(&self) -> bool {
        matches!(self, EmergenceVerdict::Emergent { .. })
    }
}

/// Two-threshold emergence rule.
///
/// The curve is emergent when there is a split index m >= 1 such that every
/// point before m performs within `near_random_tol` of the baseline and some
/// point at or after m exceeds the baseline by at least `jump_min`. Because
/// m = 1 imposes the weakest prefix requirement, this reduces to: the first
/// point is near-random and a later point clears the jump. Both thresholds
/// must be given explicitly, with `jump_min` strictly larger than
/// `near_random_tol` so a single point can never count as both.
pub fn detect_emergence(
    curve: &ScalingCurve,
    near_random_tol: f64,
    jump_min: f64,
) -> Result<EmergenceVerdict> {
    if !near_random_tol.is_finite() || near_random_tol < 0.0 {
        return Err(Error::invalid("near-random tolerance must be finite and non-negative"));
    }
    if !jump_min.is_finite() || jump_min <= near_random_tol {
        return Err(Error::invalid(format!(
            "jump threshold ({jump_min}) must exceed the near-random tolerance ({near_random_tol})"
        )));
    }

    let base = curve.random_baseline;
    let first = &curve.points[0];
    if (first.performance - base).abs() > near_random_tol {
        return Ok(EmergenceVerdict::NotEmergent);
    }
    for p in &curve.points[1..] {
        if p.performance - base >= jump_min {
            return Ok(EmergenceVerdict::Emergent {
                threshold_scale: p.scale,
            });
        }
    }
    Ok(EmergenceVerdict::NotEmergent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(points: &[(f64, f64)], baseline: f64) -> ScalingCurve {
        let points = points
            .iter()
            .map(|(s, p)| CurvePoint {
                scale: *s,
                performance: *p,
            })
            .collect();
        ScalingCurve::new(points, baseline).unwrap()
    }

    #[test]
    fn flat_curve_at_the_baseline_is_not_emergent() {
        let c = curve(&[(1e20, 0.25), (1e21, 0.25), (1e22, 0.25)], 0.25);
        assert_eq!(
            detect_emergence(&c, 0.02, 0.1).unwrap(),
            EmergenceVerdict::NotEmergent
        );
    }

    #[test]
    fn step_curve_is_emergent_at_the_step() {
        let c = curve(&[(1e20, 0.25), (1e21, 0.25), (1e22, 1.25)], 0.25);
        assert_eq!(
            detect_emergence(&c, 0.02, 0.1).unwrap(),
            EmergenceVerdict::Emergent {
                threshold_scale: 1e22
            }
        );
    }

    #[test]
    fn smooth_riser_with_no_near_random_prefix_is_not_emergent() {
        let c = curve(&[(1e20, 0.5), (1e21, 0.7), (1e22, 0.9)], 0.25);
        assert_eq!(
            detect_emergence(&c, 0.02, 0.1).unwrap(),
            EmergenceVerdict::NotEmergent
        );
    }

    #[test]
    fn threshold_is_the_first_clearing_point() {
        let c = curve(
            &[(1.0, 0.25), (2.0, 0.26), (3.0, 0.45), (4.0, 0.85)],
            0.25,
        );
        assert_eq!(
            detect_emergence(&c, 0.02, 0.1).unwrap(),
            EmergenceVerdict::Emergent {
                threshold_scale: 3.0
            }
        );
    }

    #[test]
    fn intermediate_middling_points_do_not_block_detection() {
        // A near-random start and a later jump suffice; the middle point is
        // neither near-random nor a jump, and the one-point prefix m = 1
        // already witnesses emergence.
        let c = curve(&[(1.0, 0.25), (2.0, 0.30), (3.0, 0.40)], 0.25);
        assert_eq!(
            detect_emergence(&c, 0.01, 0.1).unwrap(),
            EmergenceVerdict::Emergent {
                threshold_scale: 3.0
            }
        );
    }

    #[test]
    fn drops_below_baseline_count_as_near_random_not_jumps() {
        // Near-random is two-sided; the jump is one-sided.
        let c = curve(&[(1.0, 0.25), (2.0, 0.05)], 0.25);
        assert_eq!(
            detect_emergence(&c, 0.01, 0.1).unwrap(),
            EmergenceVerdict::NotEmergent
        );
    }

    #[test]
    fn thresholds_must_be_ordered() {
        let c = curve(&[(1.0, 0.25), (2.0, 0.85)], 0.25);
        assert!(detect_emergence(&c, 0.1, 0.1).is_err());
        assert!(detect_emergence(&c, 0.2, 0.1).is_err());
        assert!(detect_emergence(&c, -0.1, 0.1).is_err());
        assert!(detect_emergence(&c, 0.0, 0.1).is_ok());
    }

    #[test]
    fn curve_invariants_are_enforced() {
        let p = |s, perf| CurvePoint {
            scale: s,
            performance: perf,
        };
        assert!(ScalingCurve::new(vec![p(1.0, 0.5)], 0.25).is_err());
        assert!(ScalingCurve::new(vec![p(2.0, 0.5), p(1.0, 0.6)], 0.25).is_err());
        assert!(ScalingCurve::new(vec![p(1.0, 0.5), p(1.0, 0.6)], 0.25).is_err());
        assert!(ScalingCurve::new(vec![p(0.0, 0.5), p(1.0, 0.6)], 0.25).is_err());
        assert!(ScalingCurve::new(vec![p(1.0, f64::NAN), p(2.0, 0.6)], 0.25).is_err());
        assert!(ScalingCurve::new(vec![p(1.0, 0.5), p(2.0, 0.6)], f64::INFINITY).is_err());
    }

    fn arb_curve() -> impl Strategy<Value = (ScalingCurve, f64, f64)> {
        (
            proptest::collection::vec((0.1f64..10.0, -0.5f64..1.5), 2..10),
            0.0f64..0.5,
            0.0f64..0.15,
            0.01f64..0.5,
        )
            .prop_map(|(raw, baseline, eps, delta_gap)| {
                let mut scale = 0.0;
                let points = raw
                    .into_iter()
                    .map(|(step, perf)| {
                        scale += step;
                        CurvePoint {
                            scale,
                            performance: perf,
                        }
                    })
                    .collect();
                let curve = ScalingCurve::new(points, baseline).unwrap();
                (curve, eps, eps + delta_gap)
            })
    }

    proptest! {
        #[test]
        fn verdict_ignores_the_scale_units((c, eps, delta) in arb_curve(), factor in 0.5f64..100.0) {
            let scaled = ScalingCurve::new(
                c.points()
                    .iter()
                    .map(|p| CurvePoint { scale: p.scale * factor, performance: p.performance })
                    .collect(),
                c.random_baseline(),
            )
            .unwrap();
            let original = detect_emergence(&c, eps, delta).unwrap();
            let rescaled = detect_emergence(&scaled, eps, delta).unwrap();
            match (original, rescaled) {
                (
                    EmergenceVerdict::Emergent { threshold_scale: t },
                    EmergenceVerdict::Emergent { threshold_scale: ts },
                ) => prop_assert_eq!(ts, t * factor),
                (EmergenceVerdict::NotEmergent, EmergenceVerdict::NotEmergent) => {}
                (a, b) => prop_assert!(false, "verdicts diverged: {a:?} vs {b:?}"),
            }
        }

        #[test]
        fn widening_the_near_random_band_never_unflags((c, eps, delta) in arb_curve(), extra in 0.0f64..0.1) {
            prop_assume!(delta > eps + extra);
            let tight = detect_emergence(&c, eps, delta).unwrap();
            let loose = detect_emergence(&c, eps + extra, delta).unwrap();
            if tight.is_emergent() {
                prop_assert!(loose.is_emergent());
            }
        }

        #[test]
        fn lowering_the_jump_bar_never_unflags((c, eps, delta) in arb_curve(), shrink in 0.0f64..0.3) {
            let smaller = (delta - shrink).max(eps + 1e-9);
            let high = detect_emergence(&c, eps, delta).unwrap();
            let low = detect_emergence(&c, eps, smaller).unwrap();
            if high.is_emergent() {
                prop_assert!(low.is_emergent());
            }
        }
    }
}
