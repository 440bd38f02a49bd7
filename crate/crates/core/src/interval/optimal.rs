use serde::Serialize;

use super::{CorruptedSignal, Span};
use crate::error::{domain, Result};

/// How many optimal intervals [`OptimalSetSummary::witness_examples`] keeps.
pub const WITNESS_LIMIT: usize = 10;

/// A candidate interval `[start, end]` and its score `Σ v̄(i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IntervalCandidate {
    pub start: usize,
    pub end: usize,
    pub score: i64,
}

impl IntervalCandidate {
    pub fn span(&self) -> Span {
        Span {
            start: self.start,
            end: self.end,
        }
    }
}

/// Statistics of the set of optimal (maximum-score, nonempty) intervals.
///
/// The reference-dependent fields are `None` when no reference is supplied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimalSetSummary {
    pub max_score: i64,
    pub count: u64,
    /// `max |I △ I′|` over optimal `I′`.
    pub max_sym_diff: Option<u64>,
    /// `max |I △ I′|` over optimal `I′` that intersect `I`.
    pub max_overlapping_sym_diff: Option<u64>,
    pub phantom_exists: Option<bool>,
    /// An optimal interval disjoint from `I`, when one exists.
    pub phantom_witness: Option<IntervalCandidate>,
    /// Best score over nonempty intervals disjoint from `I`.
    pub best_disjoint_score: Option<i64>,
    /// The first optimal intervals in `(start, end)` order.
    pub witness_examples: Vec<IntervalCandidate>,
}

fn prefix_sums(values: &[i8]) -> Vec<i64> {
    let mut prefix = Vec::with_capacity(values.len() + 1);
    let mut acc = 0_i64;
    prefix.push(acc);
    for &v in values {
        acc += v as i64;
        prefix.push(acc);
    }
    prefix
}

/// Best score and the lexicographically first interval attaining it, over
/// the 1-based positions `lo..=hi` of `values`.
fn kadane(values: &[i8], lo: usize, hi: usize) -> Option<IntervalCandidate> {
    if lo == 0 || lo > hi || hi > values.len() {
        return None;
    }
    let mut best: Option<IntervalCandidate> = None;
    // running minimum of the prefix within the segment and where it occurred
    let (mut prefix, mut min_prefix, mut min_at) = (0_i64, 0_i64, lo - 1);
    for e in lo..=hi {
        prefix += values[e - 1] as i64;
        let score = prefix - min_prefix;
        let better = match best {
            None => true,
            Some(b) => score > b.score,
        };
        if better {
            best = Some(IntervalCandidate {
                start: min_at + 1,
                end: e,
                score,
            });
        }
        if prefix < min_prefix {
            min_prefix = prefix;
            min_at = e;
        }
    }
    best
}

/// Maximum of `v̄(I′)` over nonempty intervals, `None` for an empty signal.
pub fn max_score(signal: &CorruptedSignal) -> Option<i64> {
    kadane(signal.values(), 1, signal.len()).map(|c| c.score)
}

/// Best-scoring nonempty interval inside positions `lo..=hi`.
pub fn max_score_in(signal: &CorruptedSignal, lo: usize, hi: usize) -> Option<IntervalCandidate> {
    kadane(signal.values(), lo, hi)
}

/// Prefix indices grouped by prefix value, each group sorted ascending.
struct PrefixIndex {
    offset: i64,
    starts: Vec<usize>,
    positions: Vec<usize>,
}

impl PrefixIndex {
    fn new(prefix: &[i64], n: usize) -> Self {
        let offset = n as i64;
        let buckets = 2 * n + 2;
        let mut counts = vec![0_usize; buckets + 1];
        for &v in prefix {
            counts[(v + offset) as usize + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut positions = vec![0; prefix.len()];
        for (i, &v) in prefix.iter().enumerate() {
            let b = (v + offset) as usize;
            positions[fill[b]] = i;
            fill[b] += 1;
        }
        PrefixIndex {
            offset,
            starts,
            positions,
        }
    }

    fn group(&self, value: i64) -> &[usize] {
        let b = value + self.offset;
        if b < 0 || b as usize + 1 >= self.starts.len() {
            return &[];
        }
        let b = b as usize;
        &self.positions[self.starts[b]..self.starts[b + 1]]
    }
}

fn sym_diff(i: usize, j: usize, reference: &Span) -> u64 {
    Span { start: i + 1, end: j }.sym_diff(reference) as u64
}

/// Optimal score, number of optimal intervals, witnesses, and (given the
/// planted interval) the deviation and phantom statistics.
///
/// Runs in `O(n log n)` without listing the optimal set: an optimal interval
/// is a pair `i < j` of prefix indices with `P[j] − P[i] = M`, and for a
/// fixed right end the admissible `i` form a sorted run of one prefix-value
/// group.
pub fn optimal_set_summary(
    signal: &CorruptedSignal,
    reference: Option<Span>,
) -> Result<OptimalSetSummary> {
    let n = signal.len();
    if n == 0 {
        return domain("the signal must be nonempty");
    }
    if let Some(r) = reference {
        if r.start == 0 || r.start > r.end || r.end > n {
            return domain(format!(
                "reference [{}, {}] leaves J = {{1..{n}}}",
                r.start, r.end
            ));
        }
    }
    let values = signal.values();
    let prefix = prefix_sums(values);
    let best = kadane(values, 1, n).expect("nonempty signal");
    let m = best.score;
    let index = PrefixIndex::new(&prefix, n);

    let mut count = 0_u64;
    let mut witnesses: Vec<IntervalCandidate> = Vec::new();
    let mut max_sd: Option<u64> = None;
    let mut max_overlap_sd: Option<u64> = None;

    for j in 1..=n {
        let group = index.group(prefix[j] - m);
        let below = group.partition_point(|&i| i < j);
        if below == 0 {
            continue;
        }
        let starts = &group[..below];
        count += below as u64;
        for &i in starts {
            if witnesses.len() >= WITNESS_LIMIT && i + 1 >= witnesses[WITNESS_LIMIT - 1].start {
                break;
            }
            witnesses.push(IntervalCandidate {
                start: i + 1,
                end: j,
                score: m,
            });
            if witnesses.len() >= WITNESS_LIMIT {
                witnesses.sort();
                witnesses.truncate(WITNESS_LIMIT);
            }
        }
        if let Some(r) = reference {
            let b = r.end;
            let upto_b = starts.partition_point(|&i| i <= b);
            let mut cands = [Some(starts[0]), None, None];
            if upto_b > 0 {
                cands[1] = Some(starts[upto_b - 1]);
            }
            if upto_b < starts.len() {
                cands[2] = Some(starts[upto_b]);
            }
            for i in cands.into_iter().flatten() {
                let sd = sym_diff(i, j, &r);
                max_sd = Some(max_sd.map_or(sd, |x| x.max(sd)));
            }
            if j >= r.start {
                let below_b = starts.partition_point(|&i| i < b);
                if below_b > 0 {
                    for i in [starts[0], starts[below_b - 1]] {
                        let sd = sym_diff(i, j, &r);
                        max_overlap_sd = Some(max_overlap_sd.map_or(sd, |x| x.max(sd)));
                    }
                }
            }
        }
    }
    witnesses.sort();
    witnesses.truncate(WITNESS_LIMIT);

    let (mut phantom_exists, mut phantom_witness, mut best_disjoint) = (None, None, None);
    if let Some(r) = reference {
        let left = if r.start > 1 { kadane(values, 1, r.start - 1) } else { None };
        let right = kadane(values, r.end + 1, n);
        let disjoint = match (left, right) {
            (Some(a), Some(b)) => Some(if b.score > a.score { b } else { a }),
            (a, b) => a.or(b),
        };
        best_disjoint = disjoint.map(|c| c.score);
        phantom_witness = disjoint.filter(|c| c.score == m);
        phantom_exists = Some(phantom_witness.is_some());
    }

    Ok(OptimalSetSummary {
        max_score: m,
        count,
        max_sym_diff: max_sd,
        max_overlapping_sym_diff: max_overlap_sd,
        phantom_exists,
        phantom_witness,
        best_disjoint_score: best_disjoint,
        witness_examples: witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[i8]) -> CorruptedSignal {
        CorruptedSignal::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn scores() {
        assert_eq!(max_score(&sig(&[-1, 1, 1, -1, 1])), Some(2));
        assert_eq!(max_score(&sig(&[-1, -1, -1, -1])), Some(-1));
        assert_eq!(max_score(&sig(&[])), None);
        let c = max_score_in(&sig(&[1, 1, -1, 1, 1]), 3, 5).unwrap();
        assert_eq!((c.start, c.end, c.score), (4, 5, 2));
    }

    #[test]
    fn phantom_on_the_right() {
        let s = optimal_set_summary(&sig(&[-1, -1, -1, 1]), Some(Span::new(1, 2).unwrap())).unwrap();
        assert_eq!(s.max_score, 1);
        assert_eq!(s.count, 1);
        assert_eq!(s.witness_examples, vec![IntervalCandidate { start: 4, end: 4, score: 1 }]);
        assert_eq!(s.phantom_exists, Some(true));
        assert_eq!(s.phantom_witness.unwrap().span(), Span::new(4, 4).unwrap());
        // [4,4] vs [1,2]: 1 + 2
        assert_eq!(s.max_sym_diff, Some(3));
        assert_eq!(s.max_overlapping_sym_diff, None);
    }

    #[test]
    fn two_optimal_intervals() {
        let s = optimal_set_summary(&sig(&[-1, 1, 1, -1, 1]), Some(Span::new(2, 3).unwrap())).unwrap();
        let spans: Vec<_> = s.witness_examples.iter().map(|c| (c.start, c.end)).collect();
        assert_eq!(spans, vec![(2, 3), (2, 5)]);
        assert_eq!(s.count, 2);
        assert_eq!(s.max_sym_diff, Some(2));
        assert_eq!(s.max_overlapping_sym_diff, Some(2));
        assert_eq!(s.phantom_exists, Some(false));
        assert_eq!(s.best_disjoint_score, Some(1));
    }

    #[test]
    fn all_negative_counts_singletons() {
        let s = optimal_set_summary(&sig(&[-1; 4]), None).unwrap();
        assert_eq!((s.max_score, s.count), (-1, 4));
        assert_eq!(s.phantom_exists, None);
    }

    #[test]
    fn reference_checks() {
        assert!(optimal_set_summary(&sig(&[1, 1]), Some(Span { start: 2, end: 3 })).is_err());
        assert!(optimal_set_summary(&sig(&[]), None).is_err());
    }

    #[test]
    fn witnesses_are_first_ten() {
        // alternating +1 −1: every odd-length interval starting and ending on +1
        let v: Vec<i8> = (0..41).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        let s = optimal_set_summary(&sig(&v), None).unwrap();
        assert_eq!(s.max_score, 1);
        assert_eq!(s.count, 21 * 22 / 2);
        assert_eq!(s.witness_examples.len(), WITNESS_LIMIT);
        assert_eq!((s.witness_examples[0].start, s.witness_examples[0].end), (1, 1));
        assert_eq!((s.witness_examples[9].start, s.witness_examples[9].end), (1, 19));
    }
}
