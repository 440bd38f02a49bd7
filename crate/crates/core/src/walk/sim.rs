use rand::Rng;
use serde::Serialize;

use super::BiasParams;
use crate::error::{domain, Result};

/// A finite ±1 path with its running statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkPath {
    steps: Vec<i8>,
    partial_sums: Vec<i64>,
    bottom: i64,
    last_bottom_time: usize,
}

impl WalkPath {
    pub fn from_steps(steps: Vec<i8>) -> Result<Self> {
        let mut partial_sums = Vec::with_capacity(steps.len() + 1);
        partial_sums.push(0_i64);
        let (mut bottom, mut last) = (0_i64, 0_usize);
        for (i, &z) in steps.iter().enumerate() {
            if z != 1 && z != -1 {
                return domain(format!("step {i} is {z}, expected ±1"));
            }
            let s = partial_sums[i] + z as i64;
            if s <= bottom {
                bottom = s;
                last = i + 1;
            }
            partial_sums.push(s);
        }
        Ok(WalkPath {
            steps,
            partial_sums,
            bottom,
            last_bottom_time: last,
        })
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    /// `S_0 = 0, S_1, …, S_n`.
    pub fn partial_sums(&self) -> &[i64] {
        &self.partial_sums
    }

    /// `B = min_t S_t` over the recorded path.
    pub fn bottom(&self) -> i64 {
        self.bottom
    }

    /// `T = max{t : S_t = B}` over the recorded path.
    pub fn last_bottom_time(&self) -> usize {
        self.last_bottom_time
    }
}

/// Bookkeeping from one simulated walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathStats {
    pub steps: u64,
    pub bottom: i64,
    pub escape_height: u64,
}

/// Smallest `K` with `(q/p)^K ≤ safety_tol`.
pub fn escape_height(params: BiasParams, safety_tol: f64) -> Result<u64> {
    if !(safety_tol > 0.0 && safety_tol < 1.0) {
        return domain(format!("safety tolerance must lie in (0, 1) (got {safety_tol})"));
    }
    if params.is_degenerate() {
        return Ok(0);
    }
    let ratio = params.q() / params.p();
    let mut k = (safety_tol.ln() / ratio.ln()).ceil().max(0.0) as u64;
    while ratio.powf(k as f64) > safety_tol {
        k += 1;
    }
    while k > 0 && ratio.powf((k - 1) as f64) <= safety_tol {
        k -= 1;
    }
    Ok(k)
}

/// Draw `T` by running the walk until it stands `K` above its running
/// minimum, `K` = [`escape_height`]. From there the walk returns to the
/// minimum with probability `(q/p)^K ≤ safety_tol`, which is the only event on
/// which the returned value differs from the infinite-horizon `T`.
pub fn simulate_t<R: Rng + ?Sized>(
    params: BiasParams,
    safety_tol: f64,
    rng: &mut R,
) -> Result<(u64, PathStats)> {
    let escape = escape_height(params, safety_tol)? as i64;
    let p = params.p();
    let (mut height, mut bottom) = (0_i64, 0_i64);
    let (mut t, mut last) = (0_u64, 0_u64);
    while height - bottom < escape {
        t += 1;
        height += if rng.random_bool(p) { 1 } else { -1 };
        if height <= bottom {
            bottom = height;
            last = t;
        }
    }
    Ok((
        last,
        PathStats {
            steps: t,
            bottom,
            escape_height: escape as u64,
        },
    ))
}
