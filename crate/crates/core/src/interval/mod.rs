//! A planted interval `I ⊆ J = {1, …, n}` observed through independent label
//! flips, and what the best-scoring intervals of the corrupted signal say
//! about it.
//!
//! Positions are 1-based and intervals are closed, matching `[start, end]`.

mod bounds;
mod optimal;

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};

pub use bounds::{
    calibrate_bound_constant, deviation_tail_bound, deviation_tail_bound_with,
    overlapping_distant_prob, overlapping_distant_prob_with, phantom_prob_upper,
    phantom_thresholds, pseudo_phantom_prob_lower, PhantomThresholds, DEVIATION_CONST,
    OVERLAP_CONST,
};
pub use optimal::{
    max_score, max_score_in, optimal_set_summary, IntervalCandidate, OptimalSetSummary, WITNESS_LIMIT,
};

/// A closed interval `[start, end]` of positions, `1 ≤ start ≤ end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start == 0 || start > end {
            return domain(format!("interval [{start}, {end}] must satisfy 1 <= start <= end"));
        }
        Ok(Span { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn overlap(&self, other: &Span) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        if lo > hi {
            0
        } else {
            hi - lo + 1
        }
    }

    pub fn intersects(&self, other: &Span) -> bool {
        self.overlap(other) > 0
    }

    /// `|self △ other| = |self| + |other| − 2|self ∩ other|`.
    pub fn sym_diff(&self, other: &Span) -> usize {
        self.len() + other.len() - 2 * self.overlap(other)
    }
}

/// The planted interval and flip probability that generate a signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlantedInstance {
    n: usize,
    interval: Span,
    noise_q: f64,
}

impl PlantedInstance {
    pub fn new(n: usize, interval: Span, noise_q: f64) -> Result<Self> {
        if n == 0 {
            return domain("the ground set must be nonempty");
        }
        if interval.end > n {
            return domain(format!(
                "interval [{}, {}] leaves J = {{1..{n}}}",
                interval.start, interval.end
            ));
        }
        if !(noise_q.is_finite() && (0.0..0.5).contains(&noise_q)) {
            return domain(format!("flip probability must satisfy 0 <= q < 1/2 (got {noise_q})"));
        }
        Ok(PlantedInstance { n, interval, noise_q })
    }

    /// An interval of length `len` placed in the middle of `{1..n}`.
    pub fn centered(n: usize, len: usize, noise_q: f64) -> Result<Self> {
        if len == 0 || len > n {
            return domain(format!("interval length {len} must lie in 1..={n}"));
        }
        let start = (n - len) / 2 + 1;
        PlantedInstance::new(n, Span::new(start, start + len - 1)?, noise_q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn interval(&self) -> Span {
        self.interval
    }

    pub fn noise_q(&self) -> f64 {
        self.noise_q
    }
}

/// A ±1 signal on `{1..n}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorruptedSignal {
    values: Vec<i8>,
    instance: Option<PlantedInstance>,
}

impl CorruptedSignal {
    /// An external signal with no generating instance attached.
    pub fn from_values(values: Vec<i8>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|&v| v != 1 && v != -1) {
            return domain(format!("entry {} is {}, expected ±1", pos + 1, values[pos]));
        }
        Ok(CorruptedSignal { values, instance: None })
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn instance(&self) -> Option<&PlantedInstance> {
        self.instance.as_ref()
    }

    /// Text form: `n` on the first line, the entries on the second.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        let mut line = String::with_capacity(3 * self.values.len());
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{v}");
        }
        writeln!(out, "{}", self.values.len())?;
        writeln!(out, "{line}")?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty signal file".into()))??;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad length line {header:?}")))?;
        let mut values = Vec::with_capacity(n);
        for line in lines {
            for tok in line?.split_whitespace() {
                let v = match tok {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    other => return Err(Error::Parse(format!("bad signal entry {other:?}"))),
                };
                values.push(v);
            }
        }
        if values.len() != n {
            return Err(Error::Parse(format!(
                "signal declares {n} entries but holds {}",
                values.len()
            )));
        }
        CorruptedSignal::from_values(values)
    }
}

/// Labels `+1` on `I` and `−1` elsewhere, each negated independently with
/// probability `q`.
pub fn corrupt<R: Rng + ?Sized>(instance: &PlantedInstance, rng: &mut R) -> CorruptedSignal {
    let span = instance.interval;
    let q = instance.noise_q;
    let values = (1..=instance.n)
        .map(|i| {
            let clean: i8 = if i >= span.start && i <= span.end { 1 } else { -1 };
            if q > 0.0 && rng.random_bool(q) {
                -clean
            } else {
                clean
            }
        })
        .collect();
    CorruptedSignal {
        values,
        instance: Some(*instance),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_corruption_is_identity() {
        let inst = PlantedInstance::new(8, Span::new(3, 5).unwrap(), 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sig = corrupt(&inst, &mut rng);
        assert_eq!(sig.values(), &[-1, -1, 1, 1, 1, -1, -1, -1]);
    }

    #[test]
    fn instance_validation() {
        assert!(PlantedInstance::new(5, Span::new(2, 6).unwrap(), 0.1).is_err());
        assert!(PlantedInstance::new(5, Span::new(2, 3).unwrap(), 0.5).is_err());
        assert!(PlantedInstance::new(0, Span::new(1, 1).unwrap(), 0.1).is_err());
        assert!(Span::new(0, 2).is_err());
        assert!(Span::new(3, 2).is_err());
        let c = PlantedInstance::centered(10, 4, 0.2).unwrap();
        assert_eq!(c.interval(), Span::new(4, 7).unwrap());
    }

    #[test]
    fn span_arithmetic() {
        let a = Span::new(2, 3).unwrap();
        let b = Span::new(2, 5).unwrap();
        assert_eq!(a.sym_diff(&b), 2);
        let c = Span::new(7, 9).unwrap();
        assert_eq!(a.sym_diff(&c), 5);
        assert!(!a.intersects(&c));
    }

    #[test]
    fn text_format() {
        let sig = CorruptedSignal::from_values(vec![-1, 1, 1, -1, 1]).unwrap();
        let mut buf = Vec::new();
        sig.write_text(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "5\n-1 1 1 -1 1\n");
        let back = CorruptedSignal::read_text(&buf[..]).unwrap();
        assert_eq!(back.values(), sig.values());
        assert!(CorruptedSignal::read_text(&b"3\n1 -1\n"[..]).is_err());
        assert!(CorruptedSignal::read_text(&b"2\n1 0\n"[..]).is_err());
        assert!(CorruptedSignal::read_text(&b"2\n+1 -1\n"[..]).is_ok());
        assert!(CorruptedSignal::from_values(vec![1, 2]).is_err());
    }
}
