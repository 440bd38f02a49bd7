//! Empirical risk minimization for thresholds and intervals on the line under
//! random classification noise.
//!
//! The mistake count of a threshold placed `k` sample points past the target,
//! as a function of `k`, is a ±1 walk that steps up with probability `1 − η`.
//! The farthest optimal placement is therefore the walk's last bottom time,
//! which is what ties the learners to [`crate::walk`].

mod complexity;
mod erm;
mod trials;

use std::io::BufRead;

use serde::Serialize;

use crate::error::{domain, Error, Result};

pub use complexity::{
    sample_complexity_interval, sample_complexity_pac, sample_complexity_threshold, PacPlan,
};
pub use erm::{
    erm_interval, erm_threshold, right_deviation_count, ErmSolution, IntervalErmSolution,
};
pub use trials::{
    run_interval_uniform, run_pac_uniform, run_threshold_trial, Design, IntervalTrial, PacTrial,
    ThresholdTrial,
};

/// Labelled points `x_1 < … < x_m` with labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisySample {
    points: Vec<f64>,
    labels: Vec<i8>,
}

impl NoisySample {
    /// Rejects mismatched lengths, non-finite or non-increasing points, and
    /// labels other than ±1. Duplicate points are an error, never perturbed.
    pub fn new(points: Vec<f64>, labels: Vec<i8>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::Invalid(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if let Some(i) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::Invalid(format!("point {} is not finite", i + 1)));
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1] == w[0] {
                return Err(Error::Invalid(format!(
                    "duplicate point {} at positions {} and {}",
                    w[0],
                    i + 1,
                    i + 2
                )));
            }
            if w[1] < w[0] {
                return Err(Error::Invalid(format!(
                    "points must be strictly increasing ({} follows {} at position {})",
                    w[1],
                    w[0],
                    i + 2
                )));
            }
        }
        if let Some(i) = labels.iter().position(|&y| y != 1 && y != -1) {
            return Err(Error::Invalid(format!("label {} is {}, expected ±1", i + 1, labels[i])));
        }
        Ok(NoisySample { points, labels })
    }

    /// Sorts `(x, y)` pairs by `x` first; duplicates are still rejected.
    pub fn from_pairs(mut pairs: Vec<(f64, i8)>) -> Result<Self> {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (points, labels) = pairs.into_iter().unzip();
        NoisySample::new(points, labels)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Two columns `x label` per line, separated by whitespace or a comma.
    /// Blank lines and lines starting with `#` are skipped, as is a first
    /// row whose point column is not a number (a header); rows need not be
    /// sorted.
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut first_row = true;
        for (no, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty());
            let (x, y) = match (cols.next(), cols.next(), cols.next()) {
                (Some(x), Some(y), None) => (x, y),
                _ => return Err(Error::Parse(format!("line {}: expected two columns", no + 1))),
            };
            if std::mem::take(&mut first_row) && x.parse::<f64>().is_err() {
                continue;
            }
            let x: f64 = x
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad point {x:?}", no + 1)))?;
            let y: i8 = match y {
                "1" | "+1" => 1,
                "-1" => -1,
                _ => return Err(Error::Parse(format!("line {}: bad label {y:?}", no + 1))),
            };
            pairs.push((x, y));
        }
        NoisySample::from_pairs(pairs)
    }
}

/// Target threshold, noise rate and accuracy/confidence goals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdScenario {
    pub a_star: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl ThresholdScenario {
    pub fn new(a_star: f64, eta: f64, epsilon: f64, delta: f64) -> Result<Self> {
        if !a_star.is_finite() {
            return domain("target threshold must be finite");
        }
        if !(eta.is_finite() && (0.0..0.5).contains(&eta)) {
            return domain(format!("noise must satisfy 0 <= eta < 1/2 (got {eta})"));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return domain(format!("epsilon must be positive (got {epsilon})"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return domain(format!("delta must lie in (0, 1) (got {delta})"));
        }
        Ok(ThresholdScenario {
            a_star,
            eta,
            epsilon,
            delta,
        })
    }
}

/// A run of admissible parameter values between consecutive sample points.
/// `None` marks an infinite end. Threshold cells are `(lower, upper]`; the
/// right-end cells of interval hypotheses are `[lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Cell {
    /// Largest `|a − target|` over the cell's boundaries, infinite for an
    /// unbounded cell.
    pub fn max_distance(&self, target: f64) -> f64 {
        match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => (lo - target).abs().max((hi - target).abs()),
            _ => f64::INFINITY,
        }
    }

    /// As [`Cell::max_distance`] with both ends clipped to `[0, 1]`.
    pub fn max_distance_clipped(&self, target: f64) -> f64 {
        let lo = self.lower.unwrap_or(0.0).clamp(0.0, 1.0);
        let hi = self.upper.unwrap_or(1.0).clamp(0.0, 1.0);
        (lo - target).abs().max((hi - target).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_validation() {
        assert!(NoisySample::new(vec![1.0, 2.0], vec![1]).is_err());
        assert!(NoisySample::new(vec![1.0, 1.0], vec![1, -1]).is_err());
        assert!(NoisySample::new(vec![2.0, 1.0], vec![1, -1]).is_err());
        assert!(NoisySample::new(vec![1.0, f64::NAN], vec![1, -1]).is_err());
        assert!(NoisySample::new(vec![1.0, 2.0], vec![1, 0]).is_err());
        let s = NoisySample::from_pairs(vec![(3.0, 1), (1.0, -1)]).unwrap();
        assert_eq!(s.points(), &[1.0, 3.0]);
        assert_eq!(s.labels(), &[-1, 1]);
    }

    #[test]
    fn text_input() {
        let s = NoisySample::read_text(&b"# x y\n2.5 1\n\n0.5,-1\n1 +1\n"[..]).unwrap();
        assert_eq!(s.points(), &[0.5, 1.0, 2.5]);
        assert_eq!(s.labels(), &[-1, 1, 1]);
        assert!(NoisySample::read_text(&b"1 1 1\n"[..]).is_err());
        assert!(NoisySample::read_text(&b"1 0\n"[..]).is_err());
        assert!(NoisySample::read_text(&b"1 1\n1 -1\n"[..]).is_err());
        let h = NoisySample::read_text(&b"x,label\n0.2,1\n0.1,-1\n"[..]).unwrap();
        assert_eq!(h.labels(), &[-1, 1]);
        assert!(NoisySample::read_text(&b"0.1 1\nx 1\n"[..]).is_err());
    }

    #[test]
    fn scenario_validation() {
        assert!(ThresholdScenario::new(0.0, 0.5, 0.1, 0.1).is_err());
        assert!(ThresholdScenario::new(0.0, 0.2, 0.0, 0.1).is_err());
        assert!(ThresholdScenario::new(0.0, 0.2, 0.1, 1.0).is_err());
        assert!(ThresholdScenario::new(0.0, 0.0, 0.1, 0.1).is_ok());
    }

    #[test]
    fn cell_distances() {
        let c = Cell { lower: Some(0.2), upper: Some(0.7) };
        assert!((c.max_distance(0.5) - 0.3).abs() < 1e-15);
        let open = Cell { lower: None, upper: Some(0.3) };
        assert_eq!(open.max_distance(0.0), f64::INFINITY);
        assert!((open.max_distance_clipped(0.1) - 0.2).abs() < 1e-15);
    }
}
