use serde::Serialize;

use super::BiasParams;
use crate::error::{domain, Result};

/// Rows computed beyond `t_max` are capped here; the unresolved remainder is
/// reported in [`DpOracle::remainder_bound`].
pub const DP_MAX_HORIZON: usize = 40_000;

/// Rows of the `f(k, l)` triangle kept for inspection.
pub const DP_STORED_ROWS: usize = 2048;

/// Relative size of the neglected remainder against `P(T ≥ t_max)`.
const REMAINDER_REL: f64 = 1e-18;

/// Exact law of `T` from the last-highest-point recursion
/// `f(k, l) = q f(k−1, l−1) + p f(k−1, l+1)`, `f(0, 0) = p − q`.
///
/// In the mirrored walk (down with `p`, up with `q`) `f(k, l)` is the
/// probability that `(k, l)` is the last highest point, so `P(T = k) = Σ_l f(k, l)`.
#[derive(Debug, Clone, Serialize)]
pub struct DpOracle {
    params: BiasParams,
    t_max: usize,
    rows: Vec<Vec<f64>>,
    masses: Vec<f64>,
    tails: Vec<f64>,
    remainder_bound: f64,
}

/// Fill the table up to `t_max` and keep extending the mass sequence until the
/// remaining probability is negligible next to `P(T ≥ t_max)`.
///
/// Tails are accumulated from the far end, `P(T ≥ t) = Σ_{k ≥ t} P(T = k)`, so
/// they keep full relative precision even where `1 − Σ_{k<t} P(T = k)` would
/// cancel to rounding noise.
pub fn tail_dp_oracle(params: BiasParams, t_max: usize) -> Result<DpOracle> {
    params.require_interior("the DP oracle")?;
    if t_max >= DP_MAX_HORIZON {
        return domain(format!("t_max must be below {DP_MAX_HORIZON} (got {t_max})"));
    }
    let (p, q) = (params.p(), params.q());
    let four_pq = params.four_pq();
    // Σ_{j>K} P(T = j) ≤ 2 P(T = K) / (1 − 4pq): masses come in equal pairs
    // decaying by at most 4pq per pair.
    let remainder_of = |mass: f64| 2.0 * mass / (1.0 - four_pq);

    let stored = t_max.min(DP_STORED_ROWS);
    let mut rows = Vec::with_capacity(stored + 1);
    let mut masses = Vec::new();
    let mut prev = vec![params.drift()];
    masses.push(params.drift());
    rows.push(prev.clone());

    let mut k = 0;
    loop {
        if k >= t_max {
            let target = masses[t_max];
            if remainder_of(masses[k]) <= REMAINDER_REL * target || masses[k] == 0.0 {
                break;
            }
            if k + 1 >= DP_MAX_HORIZON {
                break;
            }
        }
        k += 1;
        let mut row = vec![0.0; k + 1];
        for (l, slot) in row.iter_mut().enumerate() {
            let mut v = 0.0;
            if l >= 1 {
                v += q * prev[l - 1];
            }
            if l + 1 < k {
                v += p * prev[l + 1];
            }
            *slot = v;
        }
        masses.push(row.iter().sum());
        if k <= stored {
            rows.push(row.clone());
        }
        prev = row;
    }

    let remainder_bound = remainder_of(*masses.last().unwrap_or(&0.0));
    let mut tails = vec![0.0; masses.len()];
    let mut acc = 0.0;
    for (slot, m) in tails.iter_mut().zip(&masses).rev() {
        acc += m;
        *slot = acc;
    }

    Ok(DpOracle {
        params,
        t_max,
        rows,
        masses,
        tails,
        remainder_bound,
    })
}

impl DpOracle {
    pub fn params(&self) -> BiasParams {
        self.params
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    /// `f(k, l)`, zero outside `0 ≤ l ≤ k`; `None` for rows past
    /// `min(t_max, DP_STORED_ROWS)`.
    pub fn f(&self, k: usize, l: usize) -> Option<f64> {
        let row = self.rows.get(k)?;
        Some(row.get(l).copied().unwrap_or(0.0))
    }

    /// `P(T = k)`. Zero past the computed horizon.
    pub fn mass(&self, k: usize) -> f64 {
        self.masses.get(k).copied().unwrap_or(0.0)
    }

    /// `P(T ≥ t)` up to the neglected remainder.
    pub fn tail(&self, t: usize) -> f64 {
        self.tails.get(t).copied().unwrap_or(0.0)
    }

    /// All computed masses, index `k` holding `P(T = k)`.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Tails for `t ≤ t_max`.
    pub fn tails(&self) -> &[f64] {
        &self.tails[..=self.t_max]
    }

    /// Number of mass rows computed (possibly far beyond `t_max`).
    pub fn horizon(&self) -> usize {
        self.masses.len() - 1
    }

    /// Upper bound on the probability beyond the horizon.
    pub fn remainder_bound(&self) -> f64 {
        self.remainder_bound
    }

    /// `E[g(T)]` over the computed masses.
    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> f64 {
        // smallest terms first
        self.masses
            .iter()
            .enumerate()
            .rev()
            .map(|(k, m)| g(k as f64) * m)
            .sum()
    }
}
