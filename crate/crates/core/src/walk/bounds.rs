use serde::Serialize;

use super::{tail_dp_oracle, BiasParams, TailEstimate, TailMethod};
use crate::error::{domain, Result};

/// Largest admissible MGF argument, `½ ln(1/(4pq))`.
pub fn mgf_s_max(params: BiasParams) -> f64 {
    0.5 * (1.0 / params.four_pq()).ln()
}

/// `E[e^{sT}] = 2(p−q) / (1 + √(1 − 4pq e^{2s}) − 2q eˢ)` for `0 ≤ s ≤ ½ ln(1/(4pq))`.
pub fn mgf(params: BiasParams, s: f64) -> Result<f64> {
    params.require_interior("the moment generating function")?;
    let s_max = mgf_s_max(params);
    if !(s.is_finite() && s >= 0.0 && s <= s_max) {
        return domain(format!("MGF argument must lie in [0, {s_max}] (got {s})"));
    }
    let (q, x4) = (params.q(), params.four_pq());
    let radicand = (1.0 - x4 * (2.0 * s).exp()).max(0.0);
    Ok(2.0 * params.drift() / (1.0 + radicand.sqrt() - 2.0 * q * s.exp()))
}

/// First two moments of `T` and its variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// `E[T] = q(3 − 4q)/(p − q)²`, `E[T²] = q(1 − 8p + 28p² − 16p³)/(p − q)⁴`.
pub fn moments(params: BiasParams) -> Moments {
    if params.is_degenerate() {
        return Moments {
            mean: 0.0,
            second_moment: 0.0,
            variance: 0.0,
        };
    }
    let (p, q, d) = (params.p(), params.q(), params.drift());
    let mean = q * (3.0 - 4.0 * q) / (d * d);
    let second_moment = q * (1.0 - 8.0 * p + 28.0 * p * p - 16.0 * p * p * p) / (d * d * d * d);
    Moments {
        mean,
        second_moment,
        variance: second_moment - mean * mean,
    }
}

/// Markov bound at the edge of the MGF domain: `P(T ≥ t) ≤ (1 + √2)(4pq)^{t/2}`.
pub fn tail_upper_mgf(params: BiasParams, t: u64) -> TailEstimate {
    let raw = (1.0 + std::f64::consts::SQRT_2) * params.four_pq().powf(t as f64 / 2.0);
    TailEstimate::new(t, raw, TailMethod::MgfBound, 0.0, None)
}

/// Default constant of the `(4pq)^{(t+1)/2} / ((p−q)³ t^{3/2})` upper estimate.
///
/// Fixed by the sweep in [`calibrate_elementary_constants`] over
/// `p ∈ {0.55, 0.6, …, 0.95, 0.99}`, `t ∈ 1..=200`. The largest ratio, 8.147,
/// occurs at `p = 0.99`; at `p ≤ 0.9` it stays below 3.2.
pub const ELEMENTARY_UPPER_CONST: f64 = 8.5;

/// Default constant of the `(p−q)(4pq)^{(t+1)/2} / t^{3/2}` lower estimate.
///
/// Same sweep; the smallest ratio, 0.515, again occurs at `p = 0.99`.
pub const ELEMENTARY_LOWER_CONST: f64 = 0.5;

/// Constants multiplying the two elementary shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementaryConstants {
    pub upper: f64,
    pub lower: f64,
}

impl Default for ElementaryConstants {
    fn default() -> Self {
        ElementaryConstants {
            upper: ELEMENTARY_UPPER_CONST,
            lower: ELEMENTARY_LOWER_CONST,
        }
    }
}

fn elementary_shapes(params: BiasParams, t: u64) -> (f64, f64) {
    let tf = t as f64;
    let d = params.drift();
    let geometric = params.four_pq().powf((tf + 1.0) / 2.0) / tf.powf(1.5);
    (geometric / (d * d * d), d * geometric)
}

/// `(upper, lower)` elementary estimates with the default constants.
pub fn tail_elementary_bounds(params: BiasParams, t: u64) -> Result<(TailEstimate, TailEstimate)> {
    tail_elementary_bounds_with(params, t, ElementaryConstants::default())
}

pub fn tail_elementary_bounds_with(
    params: BiasParams,
    t: u64,
    constants: ElementaryConstants,
) -> Result<(TailEstimate, TailEstimate)> {
    params.require_interior("the elementary estimates")?;
    if t == 0 {
        return domain("the elementary estimates need t >= 1");
    }
    let (upper, lower) = elementary_shapes(params, t);
    Ok((
        TailEstimate::new(t, constants.upper * upper, TailMethod::ElementaryUpper, 0.0, None),
        TailEstimate::new(t, constants.lower * lower, TailMethod::ElementaryLower, 0.0, None),
    ))
}

/// Sweep `P(T ≥ t)` from the DP oracle against both shapes and return the
/// largest upper ratio and the smallest lower ratio seen on the grid.
pub fn calibrate_elementary_constants(ps: &[f64], t_max: u64) -> Result<ElementaryConstants> {
    let mut upper = 0.0_f64;
    let mut lower = f64::INFINITY;
    for &p in ps {
        let params = BiasParams::new(p)?;
        let dp = tail_dp_oracle(params, t_max as usize)?;
        for t in 1..=t_max {
            let (u, l) = elementary_shapes(params, t);
            let tail = dp.tail(t as usize);
            upper = upper.max(tail / u);
            lower = lower.min(tail / l);
        }
    }
    Ok(ElementaryConstants { upper, lower })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mgf_at_zero_is_one() {
        for p in [0.55, 0.6, 0.75, 0.9, 0.99] {
            let v = mgf(BiasParams::new(p).unwrap(), 0.0).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mgf_domain() {
        let params = BiasParams::new(0.75).unwrap();
        assert!(mgf(params, -0.1).is_err());
        assert!(mgf(params, mgf_s_max(params) + 1e-9).is_err());
        let edge = mgf(params, mgf_s_max(params)).unwrap();
        // 2(p−q)/(1 − √(q/p))
        let expected = 2.0 * 0.5 / (1.0 - (1.0_f64 / 3.0).sqrt());
        assert!((edge - expected).abs() < 1e-12);
        assert!(mgf(BiasParams::new(1.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn moment_examples() {
        let m = moments(BiasParams::new(0.75).unwrap());
        assert!((m.mean - 2.0).abs() < 1e-12);
        assert!((m.second_moment - 16.0).abs() < 1e-12);
        assert!((m.variance - 12.0).abs() < 1e-12);
        let m = moments(BiasParams::new(0.9).unwrap());
        assert!((m.mean - 0.40625).abs() < 1e-12);
        let m = moments(BiasParams::new(1.0).unwrap());
        assert_eq!((m.mean, m.second_moment, m.variance), (0.0, 0.0, 0.0));
    }

    #[test]
    fn mgf_bound_examples() {
        let params = BiasParams::new(0.75).unwrap();
        let b = tail_upper_mgf(params, 4);
        assert!((b.raw_value - (1.0 + 2f64.sqrt()) * 0.5625).abs() < 1e-12);
        assert_eq!(b.probability, 1.0);
        let b = tail_upper_mgf(params, 20);
        assert!((b.raw_value - 0.135_953).abs() < 1e-6);
        assert_eq!(tail_upper_mgf(BiasParams::new(1.0).unwrap(), 3).raw_value, 0.0);
    }

    #[test]
    fn default_constants_cover_the_sweep() {
        let ps = [0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99];
        let c = calibrate_elementary_constants(&ps, 200).unwrap();
        assert!(c.upper <= ELEMENTARY_UPPER_CONST && c.upper > 0.9 * ELEMENTARY_UPPER_CONST);
        assert!(c.lower >= ELEMENTARY_LOWER_CONST && c.lower < 1.1 * ELEMENTARY_LOWER_CONST);
    }

    #[test]
    fn sandwich_on_the_reference_grid() {
        for p in [0.6, 0.75, 0.9] {
            let params = BiasParams::new(p).unwrap();
            let dp = tail_dp_oracle(params, 40).unwrap();
            for t in 5..=40 {
                let (u, l) = tail_elementary_bounds(params, t).unwrap();
                let tail = dp.tail(t as usize);
                assert!(l.raw_value <= tail && tail <= u.raw_value, "p = {p}, t = {t}");
            }
        }
    }

    #[test]
    fn elementary_ratio_is_t_free() {
        let params = BiasParams::new(0.6).unwrap();
        let c = ElementaryConstants::default();
        let expected = c.upper / c.lower / params.drift().powi(4);
        for t in [1, 5, 17, 40] {
            let (u, l) = tail_elementary_bounds(params, t).unwrap();
            assert!((u.raw_value / l.raw_value - expected).abs() < 1e-9 * expected);
        }
        assert!(tail_elementary_bounds(params, 0).is_err());
    }
}
