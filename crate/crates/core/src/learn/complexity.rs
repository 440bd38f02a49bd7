//! Explicit sample sizes.
//!
//! The ERM threshold is more than `ε` right of `a*` only if the right-hand
//! mistake walk over the `m` band points has its last minimum at `k ≥ m`, and
//! likewise on the left. Each event has probability at most
//! `(1+√2)(4η(1−η))^{m/2}`, so requiring the sum to stay below `δ` gives
//! `m ≥ 2 ln(2(1+√2)/δ) / ln(1/(4η(1−η)))`.

use serde::Serialize;

use crate::error::{domain, Result};

fn check_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && (0.0..0.5).contains(&eta)) {
        return domain(format!("noise must satisfy 0 <= eta < 1/2 (got {eta})"));
    }
    Ok(())
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return domain(format!("{name} must lie in (0, 1) (got {v})"));
    }
    Ok(())
}

/// Points needed in each `ε`-band around `a*`:
/// `⌈2·ln(2(1+√2)/δ) / ln(1/(4η(1−η)))⌉`, and `1` without noise.
pub fn sample_complexity_threshold(eta: f64, delta: f64) -> Result<u64> {
    check_eta(eta)?;
    check_unit("delta", delta)?;
    if eta == 0.0 {
        return Ok(1);
    }
    let rate = (1.0 / (4.0 * eta * (1.0 - eta))).ln();
    let m = 2.0 * (2.0 * (1.0 + std::f64::consts::SQRT_2) / delta).ln() / rate;
    Ok((m.ceil() as u64).max(1))
}

/// Sample size for the uniform-draw experiment and how it was assembled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacPlan {
    /// Points wanted in each band, [`sample_complexity_threshold`] at `δ/2`.
    pub per_band: u64,
    /// Expected band occupancy `εm` that meets `per_band` except with
    /// probability `δ/4` per band.
    pub band_mean: f64,
    pub m: u64,
}

/// Uniform sample size on `[0, 1]`: spend `δ/2` on the ERM deviation and
/// `δ/4` on each band holding fewer than `m₀ = per_band` points. With
/// `L = ln(4/δ)` the Chernoff bound `P(X < μ − √(2μL)) ≤ e^{−L}` for a
/// binomial of mean `μ = εm` asks for
/// `√μ ≥ (√(2L) + √(2L + 4m₀))/2`.
pub fn sample_complexity_pac(eta: f64, epsilon: f64, delta: f64) -> Result<PacPlan> {
    check_eta(eta)?;
    check_unit("delta", delta)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return domain(format!("epsilon must lie in (0, 1] (got {epsilon})"));
    }
    let per_band = sample_complexity_threshold(eta, delta / 2.0)?;
    let l = (4.0 / delta).ln();
    let root = ((2.0 * l).sqrt() + (2.0 * l + 4.0 * per_band as f64).sqrt()) / 2.0;
    let band_mean = root * root;
    Ok(PacPlan {
        per_band,
        band_mean,
        m: (band_mean / epsilon).ceil() as u64,
    })
}

/// Per-band size for interval targets: the threshold value at `δ/2` (one
/// budget per endpoint) times the caller's polylogarithmic factor.
pub fn sample_complexity_interval(eta: f64, delta: f64, polylog_factor: f64) -> Result<u64> {
    if !(polylog_factor.is_finite() && polylog_factor >= 1.0) {
        return domain(format!("polylog factor must be at least 1 (got {polylog_factor})"));
    }
    check_unit("delta", delta)?;
    let base = sample_complexity_threshold(eta, delta / 2.0)?;
    Ok((base as f64 * polylog_factor).ceil() as u64)
}
