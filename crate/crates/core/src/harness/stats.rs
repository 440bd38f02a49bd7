//! Single-pass aggregators.

use serde::Serialize;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Welford mean and variance with a compensated mean accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
    total: CompensatedSum,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.total.add(x);
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.total.value() / self.n as f64
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    pub fn summary(&self) -> MeanSummary {
        MeanSummary {
            n: self.n,
            mean: self.mean(),
            variance: self.variance(),
            std_error: self.std_error(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSummary {
    pub n: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
}

/// Success counter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Proportion {
    pub trials: u64,
    pub successes: u64,
}

impl Proportion {
    pub fn push(&mut self, success: bool) {
        self.trials += 1;
        self.successes += success as u64;
    }

    pub fn frequency(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// `√(f(1−f)/N)` at the empirical frequency.
    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let f = self.frequency();
        (f * (1.0 - f) / self.trials as f64).sqrt()
    }
}

/// Empirical survival function `P(X ≥ t)` for `t = 0..=t_max` over
/// nonnegative integer draws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survival {
    counts: Vec<u64>,
    overflow: u64,
    n: u64,
}

impl Survival {
    pub fn new(t_max: usize) -> Self {
        Survival {
            counts: vec![0; t_max + 1],
            overflow: 0,
            n: 0,
        }
    }

    pub fn push(&mut self, x: u64) {
        self.n += 1;
        match self.counts.get_mut(x as usize) {
            Some(c) => *c += 1,
            None => self.overflow += 1,
        }
    }

    pub fn trials(&self) -> u64 {
        self.n
    }

    /// `#{X ≥ t}` for each `t = 0..=t_max`.
    pub fn exceedances(&self) -> Vec<u64> {
        let mut out = vec![0; self.counts.len()];
        let mut acc = self.overflow;
        for t in (0..self.counts.len()).rev() {
            acc += self.counts[t];
            out[t] = acc;
        }
        out
    }

    pub fn survival(&self) -> Vec<f64> {
        let n = self.n.max(1) as f64;
        self.exceedances().into_iter().map(|c| c as f64 / n).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1_000_000 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-10).abs() < 1e-20);
    }

    #[test]
    fn welford_matches_two_pass() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let mut w = Welford::default();
        xs.iter().for_each(|&x| w.push(x));
        assert_eq!(w.mean(), 5.0);
        assert!((w.variance() - 32.0 / 7.0).abs() < 1e-12);
        assert_eq!(Welford::default().std_error(), 0.0);
    }

    #[test]
    fn proportion_and_survival() {
        let mut p = Proportion::default();
        [true, false, true, true].iter().for_each(|&b| p.push(b));
        assert_eq!(p.frequency(), 0.75);
        let mut s = Survival::new(3);
        [0, 1, 1, 2, 7].iter().for_each(|&x| s.push(x));
        assert_eq!(s.exceedances(), vec![5, 4, 2, 1]);
        assert_eq!(s.survival()[2], 0.4);
    }
}
