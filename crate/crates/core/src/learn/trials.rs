use rand::Rng;
use serde::Serialize;

use super::{erm_interval, erm_threshold, right_deviation_count, NoisySample, ThresholdScenario};
use crate::error::{domain, Result};

/// Where the sample points of a threshold trial sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    /// `per_band` evenly spaced points strictly inside each of
    /// `[a*−ε, a*)` and `(a*, a*+ε]`, plus `outside` points beyond each band.
    Bands { per_band: usize, outside: usize },
    /// `per_side` points at unit spacing on each side, the closest at
    /// distance ½ from `a*`.
    Integer { per_side: usize },
    /// `m` independent uniform points on `[0, 1]`.
    Uniform { m: usize },
}

impl Design {
    fn points<R: Rng + ?Sized>(&self, scenario: &ThresholdScenario, rng: &mut R) -> Result<Vec<f64>> {
        let a = scenario.a_star;
        let eps = scenario.epsilon;
        Ok(match *self {
            Design::Bands { per_band, outside } => {
                if per_band == 0 {
                    return domain("a band design needs at least one point per band");
                }
                let step = eps / per_band as f64;
                let offsets: Vec<f64> = (0..per_band)
                    .map(|k| (k as f64 + 0.5) * step)
                    .chain((1..=outside).map(|k| eps + k as f64 * step))
                    .collect();
                let mut pts: Vec<f64> = offsets.iter().rev().map(|d| a - d).collect();
                pts.extend(offsets.iter().map(|d| a + d));
                pts
            }
            Design::Integer { per_side } => {
                if per_side == 0 {
                    return domain("an integer design needs at least one point per side");
                }
                let mut pts: Vec<f64> = (0..per_side).rev().map(|k| a - (k as f64 + 0.5)).collect();
                pts.extend((0..per_side).map(|k| a + (k as f64 + 0.5)));
                pts
            }
            Design::Uniform { m } => {
                if m == 0 {
                    return domain("a uniform design needs at least one point");
                }
                let mut pts: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
                pts.sort_by(f64::total_cmp);
                pts
            }
        })
    }
}

/// Outcome of one noisy threshold-learning trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdTrial {
    pub deviation: f64,
    pub success: bool,
    pub mistake_count: u64,
    /// [`right_deviation_count`] of the noisy sample.
    pub right_count: usize,
}

fn noisy_labels<R: Rng + ?Sized>(points: &[f64], a_star: f64, eta: f64, rng: &mut R) -> Vec<i8> {
    points
        .iter()
        .map(|&x| {
            let clean: i8 = if x >= a_star { 1 } else { -1 };
            if eta > 0.0 && rng.random_bool(eta) {
                -clean
            } else {
                clean
            }
        })
        .collect()
}

/// Label the design by `h_{a*}`, flip each label with probability `η`, run
/// [`erm_threshold`] and compare the worst deviation with `ε`.
pub fn run_threshold_trial<R: Rng + ?Sized>(
    scenario: &ThresholdScenario,
    design: Design,
    rng: &mut R,
) -> Result<ThresholdTrial> {
    let points = design.points(scenario, rng)?;
    let labels = noisy_labels(&points, scenario.a_star, scenario.eta, rng);
    let sample = NoisySample::new(points, labels)?;
    let sol = erm_threshold(&sample, Some(scenario.a_star))?;
    let deviation = sol.worst_deviation.expect("target supplied");
    Ok(ThresholdTrial {
        deviation,
        success: deviation <= scenario.epsilon,
        mistake_count: sol.mistake_count,
        right_count: right_deviation_count(&sample, scenario.a_star),
    })
}

/// Outcome of one uniform-draw trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacTrial {
    /// Worst `|â − a*|` over the optimal cells, ends clipped to `[0, 1]`.
    pub error: f64,
    pub success: bool,
}

/// `m` uniform points on `[0, 1]` labelled by `h_{a*}` under noise `η`; the
/// error is the generalization error of the worst ERM threshold under the
/// uniform distribution.
pub fn run_pac_uniform<R: Rng + ?Sized>(
    scenario: &ThresholdScenario,
    m: usize,
    rng: &mut R,
) -> Result<PacTrial> {
    if !(0.0..=1.0).contains(&scenario.a_star) {
        return domain(format!("target must lie in [0, 1] (got {})", scenario.a_star));
    }
    let points = Design::Uniform { m }.points(scenario, rng)?;
    let labels = noisy_labels(&points, scenario.a_star, scenario.eta, rng);
    let sample = NoisySample::new(points, labels)?;
    let sol = erm_threshold(&sample, None)?;
    let error = sol.worst_deviation_clipped(scenario.a_star);
    Ok(PacTrial {
        error,
        success: error <= scenario.epsilon,
    })
}

/// Outcome of one uniform-draw interval trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalTrial {
    /// Worst endpoint distance over the optimal cells, ends clipped to `[0, 1]`.
    pub error: f64,
    pub success: bool,
    pub mistake_count: u64,
}

/// `m` uniform points on `[0, 1]` labelled `+1` on `[a, b]` under noise
/// `eta`; success when both endpoints of every optimal interval lie within
/// `epsilon` of the target's.
pub fn run_interval_uniform<R: Rng + ?Sized>(
    target: (f64, f64),
    eta: f64,
    epsilon: f64,
    m: usize,
    rng: &mut R,
) -> Result<IntervalTrial> {
    let (a, b) = target;
    if !(0.0 <= a && a < b && b <= 1.0) {
        return domain(format!("target must satisfy 0 <= a < b <= 1 (got [{a}, {b}])"));
    }
    // validates eta and epsilon
    ThresholdScenario::new(a, eta, epsilon, 0.5)?;
    if m == 0 {
        return domain("a uniform design needs at least one point");
    }
    let mut points: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    points.sort_by(f64::total_cmp);
    let labels = points
        .iter()
        .map(|&x| {
            let clean: i8 = if a <= x && x <= b { 1 } else { -1 };
            if eta > 0.0 && rng.random_bool(eta) {
                -clean
            } else {
                clean
            }
        })
        .collect();
    let sample = NoisySample::new(points, labels)?;
    let sol = erm_interval(&sample, None)?;
    let error = if sol.empty_hypothesis {
        b - a
    } else {
        let left = sol.left_cells.iter().map(|c| c.max_distance_clipped(a));
        let right = sol.right_cells.iter().map(|c| c.max_distance_clipped(b));
        left.chain(right).fold(0.0, f64::max)
    };
    Ok(IntervalTrial {
        error,
        success: error <= epsilon,
        mistake_count: sol.mistake_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn band_points_sit_in_their_bands() {
        let sc = ThresholdScenario::new(0.3, 0.1, 0.2, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pts = Design::Bands { per_band: 4, outside: 2 }.points(&sc, &mut rng).unwrap();
        assert_eq!(pts.len(), 12);
        let inside_left = pts.iter().filter(|&&x| x >= 0.1 && x < 0.3).count();
        let inside_right = pts.iter().filter(|&&x| x > 0.3 && x <= 0.5).count();
        assert_eq!((inside_left, inside_right), (4, 4));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn noiseless_trials_succeed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sc = ThresholdScenario::new(0.5, 0.0, 0.1, 0.1).unwrap();
        for design in [Design::Bands { per_band: 1, outside: 0 }, Design::Bands { per_band: 5, outside: 3 }] {
            let t = run_threshold_trial(&sc, design, &mut rng).unwrap();
            assert!(t.success && t.mistake_count == 0 && t.right_count == 0);
        }
        let t = run_pac_uniform(&sc, 200, &mut rng).unwrap();
        assert!(t.error <= 0.1);
    }

    #[test]
    fn integer_design_deviation_is_the_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sc = ThresholdScenario::new(0.5, 0.25, 1.0, 0.1).unwrap();
        let t = run_threshold_trial(&sc, Design::Integer { per_side: 50 }, &mut rng).unwrap();
        assert!(t.deviation >= t.right_count as f64 - 0.5);
        assert!(run_pac_uniform(&ThresholdScenario::new(2.0, 0.1, 0.1, 0.1).unwrap(), 5, &mut rng).is_err());
    }

    #[test]
    fn interval_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = run_interval_uniform((0.3, 0.6), 0.0, 0.05, 2000, &mut rng).unwrap();
        assert!(t.success && t.mistake_count == 0);
        let mut hits = 0;
        for _ in 0..50 {
            hits += run_interval_uniform((0.3, 0.6), 0.1, 0.05, 2000, &mut rng).unwrap().success as u32;
        }
        assert!(hits >= 40, "{hits}");
        assert!(run_interval_uniform((0.6, 0.3), 0.1, 0.1, 10, &mut rng).is_err());
    }
}
