use serde::Serialize;

use crate::error::{domain, Result};
use crate::specfn::kl_bernoulli;
use crate::walk::BiasParams;

/// Default `C` in `C·n·(4pq)^{t/2}/(p−q)⁴`.
///
/// Sweep: 10⁴ corrupt/summary trials at `n = 10⁴`, `p ∈ {0.7, 0.75, 0.8}`,
/// `|I| = 100`; the largest ratio of empirical `P(T ≥ t)` to the shape over
/// `t` with a nonzero count was `1.5·10⁻⁵` (at `p = 0.8`). The default keeps
/// a margin of more than four orders of magnitude.
pub const DEVIATION_CONST: f64 = 1.0;

/// Default constant of the overlapping-distant expression.
///
/// Sweep: 10⁴ trials at `n = 2000`, `|I| = 200`, `p ∈ {0.7, 0.8}`,
/// `t ∈ 4..=20`; the largest ratio of the empirical frequency to the
/// expression was `0.024` (at `p = 0.8`, `t = 20`).
pub const OVERLAP_CONST: f64 = 1.0;

fn interior(params: BiasParams, what: &str) -> Result<()> {
    if params.is_degenerate() {
        return domain(format!("{what} needs 1/2 < p < 1 (got p = 1)"));
    }
    Ok(())
}

/// `C·n·(4pq)^{t/2}/(p−q)⁴` with the default `C`; reported unclamped.
pub fn deviation_tail_bound(n: usize, params: BiasParams, t: u64) -> Result<f64> {
    deviation_tail_bound_with(n, params, t, DEVIATION_CONST)
}

pub fn deviation_tail_bound_with(n: usize, params: BiasParams, t: u64, c: f64) -> Result<f64> {
    interior(params, "the deviation bound")?;
    if n == 0 {
        return domain("the ground set must be nonempty");
    }
    if t > n as u64 {
        return domain(format!("deviation t = {t} exceeds n = {n}"));
    }
    let d = params.drift();
    Ok(c * n as f64 * params.four_pq().powf(t as f64 / 2.0) / (d * d * d * d))
}

/// Interval lengths `(ln n)/D(½‖p)` and `(ln n)/D(q‖p)` of the phantom
/// phase transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhantomThresholds {
    /// Above this length phantoms vanish.
    pub upper_len: f64,
    /// Below this length phantoms appear.
    pub lower_len: f64,
}

pub fn phantom_thresholds(n: usize, params: BiasParams) -> Result<PhantomThresholds> {
    if n < 2 {
        return domain(format!("phantom thresholds need n >= 2 (got {n})"));
    }
    let ln_n = (n as f64).ln();
    let d_half = kl_bernoulli(0.5, params.p())?;
    let d_q = kl_bernoulli(params.q(), params.p())?;
    Ok(PhantomThresholds {
        upper_len: ln_n / d_half,
        lower_len: ln_n / d_q,
    })
}

/// `[(1 − e^{−(n+1)D})/(1 − e^{−D})]·n·e^{−|I|·D}` with `D = D(½‖p)`: an
/// upper bound on the probability that some interval disjoint from `I`
/// outscores `I`. Unclamped.
pub fn phantom_prob_upper(n: usize, interval_len: usize, params: BiasParams) -> Result<f64> {
    if interval_len == 0 || interval_len > n {
        return domain(format!("interval length {interval_len} must lie in 1..={n}"));
    }
    let d = kl_bernoulli(0.5, params.p())?;
    let geometric = (-(n as f64 + 1.0) * d).exp_m1() / (-d).exp_m1();
    Ok(geometric * n as f64 * (-(interval_len as f64) * d).exp())
}

/// `t(4pq)^{t/2}/(1−√(4pq)) + (4pq)^{t/2}/(1−√(4pq))²` times the default
/// constant.
pub fn overlapping_distant_prob(params: BiasParams, t: u64) -> Result<f64> {
    overlapping_distant_prob_with(params, t, OVERLAP_CONST)
}

pub fn overlapping_distant_prob_with(params: BiasParams, t: u64, c: f64) -> Result<f64> {
    interior(params, "the overlapping-distant expression")?;
    if t == 0 {
        return domain("the overlapping-distant expression needs t >= 1");
    }
    let root = params.four_pq().sqrt();
    let geo = root.powf(t as f64);
    let gap = 1.0 - root;
    Ok(c * (t as f64 * geo / gap + geo / (gap * gap)))
}

/// `1 − (1 − e^{−|I|·D(x‖q)}/√(2|I|))^{n/|I| − 4}`, `x = (r + |I|)/(2|I|)`,
/// clamped to `[0, 1]`: a lower bound on the probability that some interval
/// disjoint from `I` scores at least `r`.
///
/// A length-`|I|` block scores `r` when `(r + |I|)/2` of its entries are
/// flipped, so the bound presumes `r + |I|` even; for odd `r + |I|` the needed
/// count rounds up and the expression can overshoot.
pub fn pseudo_phantom_prob_lower(
    n: usize,
    interval_len: usize,
    r: i64,
    params: BiasParams,
) -> Result<f64> {
    if interval_len == 0 || interval_len > n {
        return domain(format!("interval length {interval_len} must lie in 1..={n}"));
    }
    let len = interval_len as f64;
    if r < 0 || r as f64 > len {
        return domain(format!("weight r = {r} must lie in 0..={interval_len}"));
    }
    let x = (r as f64 + len) / (2.0 * len);
    let q = params.q();
    if !(x > q && x < 1.0) {
        return domain(format!("entropy argument {x} must lie in (q, 1) = ({q}, 1)"));
    }
    let exponent = n as f64 / len - 4.0;
    if exponent <= 0.0 {
        return Ok(0.0);
    }
    let d = kl_bernoulli(x, q)?;
    let block = (-len * d).exp() / (2.0 * len).sqrt();
    // 1 − (1 − block)^exponent without cancellation
    let value = -(exponent * (-block).ln_1p()).exp_m1();
    Ok(value.clamp(0.0, 1.0))
}

/// Smallest constant `C` with `empirical ≤ C·shape` on every observed pair
/// with `shape > 0`.
pub fn calibrate_bound_constant(observations: &[(f64, f64)]) -> f64 {
    observations
        .iter()
        .filter(|(_, shape)| *shape > 0.0)
        .map(|(emp, shape)| emp / shape)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> BiasParams {
        BiasParams::new(x).unwrap()
    }

    #[test]
    fn thresholds_at_three_quarters() {
        let th = phantom_thresholds(100_000, p(0.75)).unwrap();
        assert!((th.upper_len - 80.04).abs() < 0.01, "{}", th.upper_len);
        assert!((th.lower_len - 20.96).abs() < 0.01, "{}", th.lower_len);
        assert!(phantom_thresholds(1, p(0.75)).is_err());
        let near = phantom_thresholds(1000, p(0.5001)).unwrap();
        assert!(near.lower_len > 1e6);
    }

    #[test]
    fn deviation_bound_is_geometric() {
        let params = p(0.75);
        assert!(deviation_tail_bound(100, params, 0).unwrap() >= 1.0);
        let r = deviation_tail_bound(100, params, 11).unwrap() / deviation_tail_bound(100, params, 10).unwrap();
        assert!((r - 0.75_f64.sqrt()).abs() < 1e-12);
        assert!(deviation_tail_bound(10, params, 11).is_err());
        assert!(deviation_tail_bound(10, p(1.0), 1).is_err());
    }

    #[test]
    fn union_bound_small_far_out() {
        let v = phantom_prob_upper(1000, 200, p(0.75)).unwrap();
        assert!((v - 2.393_888e-9).abs() < 1e-14, "{v}");
        assert!(phantom_prob_upper(1000, 210, p(0.75)).unwrap() < 1e-9);
        assert!(phantom_prob_upper(10, 0, p(0.75)).is_err());
        assert!(phantom_prob_upper(10, 11, p(0.75)).is_err());
    }

    #[test]
    fn overlap_expression() {
        assert!(overlapping_distant_prob(p(0.9), 30).unwrap() < 1e-3);
        let params = p(0.75);
        let t_star = 2.0 / (1.0 / params.four_pq()).ln();
        let start = t_star.ceil() as u64 + 1;
        for t in start..start + 20 {
            assert!(overlapping_distant_prob(params, t + 1).unwrap() < overlapping_distant_prob(params, t).unwrap());
        }
        assert!(overlapping_distant_prob(params, 0).is_err());
    }

    #[test]
    fn pseudo_phantom_edges() {
        let params = p(0.75);
        assert_eq!(pseudo_phantom_prob_lower(80, 20, 10, params).unwrap(), 0.0);
        let a = pseudo_phantom_prob_lower(10_000, 20, 10, params).unwrap();
        let b = pseudo_phantom_prob_lower(100_000, 20, 10, params).unwrap();
        assert!(0.0 < a && a < b && b <= 1.0);
        assert!(pseudo_phantom_prob_lower(1000, 20, 20, params).is_err());
        assert!(pseudo_phantom_prob_lower(1000, 20, -1, params).is_err());
        assert!(pseudo_phantom_prob_lower(1000, 20, 21, params).is_err());
        // x = 1/2 is at most q only when q ≥ 1/2, so r = 0 is admissible
        assert!(pseudo_phantom_prob_lower(1000, 20, 0, params).is_ok());
    }

    #[test]
    fn calibration_takes_the_worst_ratio() {
        let c = calibrate_bound_constant(&[(0.1, 1.0), (0.3, 0.5), (0.2, 0.0)]);
        assert!((c - 0.6).abs() < 1e-15);
        assert_eq!(calibrate_bound_constant(&[]), 0.0);
    }
}
