use serde::Serialize;

use super::{Cell, NoisySample};
use crate::error::{domain, Result};
use crate::interval::{optimal_set_summary, CorruptedSignal};

/// All thresholds of minimum empirical risk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErmSolution {
    /// Maximal cells `(lower, upper]`; every threshold inside one attains
    /// the minimum.
    pub optimal_cut_cells: Vec<Cell>,
    /// Optimal cut positions; cut `c` predicts `−1` on the first `c` points.
    pub optimal_cuts: Vec<usize>,
    pub mistake_count: u64,
    /// Largest distance from the target to a boundary of an optimal cell.
    pub worst_deviation: Option<f64>,
}

impl ErmSolution {
    /// Worst deviation with cell ends clipped to `[0, 1]`: the generalization
    /// error under the uniform distribution on the unit interval.
    pub fn worst_deviation_clipped(&self, target: f64) -> f64 {
        self.optimal_cut_cells
            .iter()
            .map(|c| c.max_distance_clipped(target))
            .fold(0.0, f64::max)
    }
}

fn cut_mistakes(labels: &[i8]) -> Vec<u64> {
    let neg_total = labels.iter().filter(|&&y| y < 0).count() as u64;
    let mut out = Vec::with_capacity(labels.len() + 1);
    let (mut pos_before, mut neg_before) = (0_u64, 0_u64);
    out.push(neg_total);
    for &y in labels {
        if y > 0 {
            pos_before += 1;
        } else {
            neg_before += 1;
        }
        out.push(pos_before + neg_total - neg_before);
    }
    out
}

fn boundary(points: &[f64], idx: usize) -> Option<f64> {
    // 1-based point index, 0 and m + 1 are the infinite ends
    if idx == 0 || idx > points.len() {
        None
    } else {
        Some(points[idx - 1])
    }
}

/// Minimize disagreements of `h_a(x) = +1 iff x ≥ a` over all `m + 1` cuts.
pub fn erm_threshold(sample: &NoisySample, a_star: Option<f64>) -> Result<ErmSolution> {
    if sample.is_empty() {
        return domain("ERM needs at least one sample point");
    }
    let mistakes = cut_mistakes(sample.labels());
    let best = *mistakes.iter().min().expect("m + 1 cuts");
    let cuts: Vec<usize> = (0..mistakes.len()).filter(|&c| mistakes[c] == best).collect();
    let x = sample.points();
    let mut cells = Vec::new();
    let mut k = 0;
    while k < cuts.len() {
        let mut end = k;
        while end + 1 < cuts.len() && cuts[end + 1] == cuts[end] + 1 {
            end += 1;
        }
        cells.push(Cell {
            lower: boundary(x, cuts[k]),
            upper: boundary(x, cuts[end] + 1),
        });
        k = end + 1;
    }
    let worst_deviation =
        a_star.map(|a| cells.iter().map(|c| c.max_distance(a)).fold(0.0, f64::max));
    Ok(ErmSolution {
        optimal_cut_cells: cells,
        optimal_cuts: cuts,
        mistake_count: best,
        worst_deviation,
    })
}

/// Number of points right of `a_star` that the farthest right-side
/// empirical minimum puts on the negative side: the last `k` minimizing the
/// mistakes of the cut `k` points past `a_star`, among the points right of it.
pub fn right_deviation_count(sample: &NoisySample, a_star: f64) -> usize {
    let left = sample.points().partition_point(|&x| x < a_star);
    let (mut walk, mut bottom, mut last) = (0_i64, 0_i64, 0_usize);
    for (k, &y) in sample.labels()[left..].iter().enumerate() {
        // moving the cut past a positive point adds a mistake
        walk += if y > 0 { 1 } else { -1 };
        if walk <= bottom {
            bottom = walk;
            last = k + 1;
        }
    }
    last
}

/// All intervals `h_{(a,b)}(x) = +1 iff a ≤ x ≤ b` of minimum empirical risk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalErmSolution {
    pub mistake_count: u64,
    /// Best `Σ labels` over the predicted-positive index run.
    pub max_score: i64,
    /// Number of optimal index intervals.
    pub optimal_count: u64,
    /// Set when every label is `−1`: the optimum predicts nothing positive.
    pub empty_hypothesis: bool,
    /// Maximal cells `(lower, upper]` for the left end `a` over the optimal set.
    pub left_cells: Vec<Cell>,
    /// Maximal cells `[lower, upper)` for the right end `b` over the optimal set.
    pub right_cells: Vec<Cell>,
    pub worst_left_deviation: Option<f64>,
    pub worst_right_deviation: Option<f64>,
}

fn merge_runs(flags: &[bool], to_cell: impl Fn(usize, usize) -> Cell) -> Vec<Cell> {
    let mut cells = Vec::new();
    let mut k = 0;
    while k < flags.len() {
        if !flags[k] {
            k += 1;
            continue;
        }
        let mut end = k;
        while end + 1 < flags.len() && flags[end + 1] {
            end += 1;
        }
        cells.push(to_cell(k, end));
        k = end + 1;
    }
    cells
}

/// Interval ERM through the maximum-score index intervals of the label
/// sequence. The empty hypothesis is admitted only when all labels are `−1`.
pub fn erm_interval(sample: &NoisySample, target: Option<(f64, f64)>) -> Result<IntervalErmSolution> {
    if sample.is_empty() {
        return domain("ERM needs at least one sample point");
    }
    let labels = sample.labels();
    let positives = labels.iter().filter(|&&y| y > 0).count() as u64;
    if positives == 0 {
        return Ok(IntervalErmSolution {
            mistake_count: 0,
            max_score: 0,
            optimal_count: 1,
            empty_hypothesis: true,
            left_cells: Vec::new(),
            right_cells: Vec::new(),
            worst_left_deviation: None,
            worst_right_deviation: None,
        });
    }
    let signal = CorruptedSignal::from_values(labels.to_vec())?;
    let summary = optimal_set_summary(&signal, None)?;
    let m = summary.max_score;
    let n = labels.len();

    let mut prefix = vec![0_i64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + labels[i] as i64;
    }
    // start s (1-based) is optimal iff max_{j ≥ s} P[j] − P[s−1] = M
    let mut start_ok = vec![false; n + 1];
    let mut suffix_max = i64::MIN;
    for s in (1..=n).rev() {
        suffix_max = suffix_max.max(prefix[s]);
        start_ok[s] = suffix_max - prefix[s - 1] == m;
    }
    // end e is optimal iff P[e] − min_{i < e} P[i] = M
    let mut end_ok = vec![false; n + 1];
    let mut prefix_min = i64::MAX;
    for e in 1..=n {
        prefix_min = prefix_min.min(prefix[e - 1]);
        end_ok[e] = prefix[e] - prefix_min == m;
    }
    let x = sample.points();
    let left_cells = merge_runs(&start_ok, |s1, s2| Cell {
        lower: boundary(x, s1 - 1),
        upper: boundary(x, s2),
    });
    let right_cells = merge_runs(&end_ok, |e1, e2| Cell {
        lower: boundary(x, e1),
        upper: boundary(x, e2 + 1),
    });
    let worst = |cells: &[Cell], t: f64| cells.iter().map(|c| c.max_distance(t)).fold(0.0, f64::max);
    Ok(IntervalErmSolution {
        mistake_count: positives - m as u64,
        max_score: m,
        optimal_count: summary.count,
        empty_hypothesis: false,
        worst_left_deviation: target.map(|(a, _)| worst(&left_cells, a)),
        worst_right_deviation: target.map(|(_, b)| worst(&right_cells, b)),
        left_cells,
        right_cells,
    })
}
