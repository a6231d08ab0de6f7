//! Kinematic trot model: two diagonal leg pairs alternate half a cycle apart
//! and the body advances by the mean stroke of the stance pair every half
//! cycle, with no slip.

use crate::error::{invalid, Error, Result};
use crate::limb::StrokeMetrics;

#[derive(Debug, Clone, PartialEq)]
pub struct GaitLeg {
    pub name: String,
    /// Name of the limb design this leg uses.
    pub limb: String,
    pub stroke: Option<StrokeMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitSpec {
    pub legs: Vec<GaitLeg>,
    /// Indices into `legs`; pair A at phase 0.
    pub pair_a: [usize; 2],
    /// Pair B at phase 0.5.
    pub pair_b: [usize; 2],
    /// Full gait cycles per second.
    pub frequencies: Vec<f64>,
}

impl GaitSpec {
    pub fn new(legs: Vec<GaitLeg>, pair_a: [usize; 2], pair_b: [usize; 2], frequencies: Vec<f64>) -> Result<Self> {
        if legs.len() != 4 {
            return Err(invalid(format!("a trot needs four legs, got {}", legs.len())));
        }
        let mut seen = [false; 4];
        for &i in pair_a.iter().chain(&pair_b) {
            if i >= 4 || seen[i] {
                return Err(invalid("each leg must belong to exactly one diagonal pair"));
            }
            seen[i] = true;
        }
        if let Some(f) = frequencies.iter().find(|f| !(f.is_finite() && **f >= 0.0)) {
            return Err(invalid(format!("gait frequency must be non-negative, got {f}")));
        }
        Ok(Self {
            legs,
            pair_a,
            pair_b,
            frequencies,
        })
    }

    /// Attach stroke metrics to every leg using `limb`.
    pub fn set_limb_stroke(&mut self, limb: &str, stroke: StrokeMetrics) {
        for leg in self.legs.iter_mut().filter(|l| l.limb == limb) {
            leg.stroke = Some(stroke);
        }
    }

    fn pair_stroke(&self, pair: [usize; 2]) -> Result<f64> {
        let mut sum = 0.0;
        for i in pair {
            let leg = &self.legs[i];
            let stroke = leg
                .stroke
                .ok_or_else(|| Error::MissingLimbMetrics(leg.name.clone()))?;
            sum += stroke.stroke_distance;
        }
        Ok(0.5 * sum)
    }

    /// Same gait with the two pairs exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            pair_a: self.pair_b,
            pair_b: self.pair_a,
            ..self.clone()
        }
    }
}

/// Body speed (m/s) at `frequency` full cycles per second.
pub fn body_speed(gait: &GaitSpec, frequency: f64) -> Result<f64> {
    let per_cycle = gait.pair_stroke(gait.pair_a)? + gait.pair_stroke(gait.pair_b)?;
    Ok(frequency * per_cycle)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpeedCurve {
    /// (Hz, m/s) in the order of the gait's frequency list.
    pub points: Vec<(f64, f64)>,
}

pub fn speed_curve(gait: &GaitSpec) -> Result<SpeedCurve> {
    let points = gait
        .frequencies
        .iter()
        .map(|&f| body_speed(gait, f).map(|v| (f, v)))
        .collect::<Result<_>>()?;
    Ok(SpeedCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gait(strokes: [f64; 4], freqs: Vec<f64>) -> GaitSpec {
        let names = ["front_left", "hind_right", "front_right", "hind_left"];
        let legs = names
            .iter()
            .zip(strokes)
            .map(|(n, s)| GaitLeg {
                name: n.to_string(),
                limb: n.to_string(),
                stroke: Some(StrokeMetrics {
                    stroke_distance: s,
                    stroke_ratio: 1.0,
                }),
            })
            .collect();
        GaitSpec::new(legs, [0, 1], [2, 3], freqs).unwrap()
    }

    #[test]
    fn zero_frequency_is_still() {
        assert_eq!(body_speed(&gait([0.02; 4], vec![]), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn uniform_strokes() {
        let v = body_speed(&gait([0.02; 4], vec![]), 1.0).unwrap();
        assert!((v - 0.04).abs() < 1e-15);
    }

    #[test]
    fn mean_of_pair() {
        let v = body_speed(&gait([0.020, 0.024, 0.018, 0.022], vec![]), 2.0).unwrap();
        assert!((v - 0.084).abs() < 1e-15);
    }

    #[test]
    fn curve_preserves_order_and_empty() {
        let c = speed_curve(&gait([0.02; 4], vec![0.0, 1.0, 2.0])).unwrap();
        assert_eq!(c.points.len(), 3);
        assert!((c.points[1].1 - 0.04).abs() < 1e-15);
        assert!((c.points[2].1 - 0.08).abs() < 1e-15);
        assert!(speed_curve(&gait([0.02; 4], vec![])).unwrap().points.is_empty());
    }

    #[test]
    fn missing_metrics_reported() {
        let mut g = gait([0.02; 4], vec![1.0]);
        g.legs[2].stroke = None;
        assert_eq!(body_speed(&g, 1.0), Err(Error::MissingLimbMetrics("front_right".into())));
    }

    #[test]
    fn pairs_must_partition_legs() {
        let g = gait([0.02; 4], vec![]);
        assert!(GaitSpec::new(g.legs.clone(), [0, 1], [1, 3], vec![]).is_err());
        assert!(GaitSpec::new(g.legs[..3].to_vec(), [0, 1], [2, 3], vec![]).is_err());
    }
}
