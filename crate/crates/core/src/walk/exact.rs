use super::{BiasParams, TailEstimate, TailMethod};
use crate::error::{domain, Result};
use crate::specfn::{hyp2f1, lerch_phi, ln_catalan};

/// `τ = ⌊(t + 1)/2⌋`.
pub fn tau(t: u64) -> u64 {
    t.div_ceil(2)
}

/// Closed form of `P(T ≥ t)` through two Gauss hypergeometric series.
///
/// With `x = pq` the masses pair up as `P(T = 2k−1) = P(T = 2k) =
/// (p−q)p Σ_{n≥k} C_n xⁿ`, and summing those pairs from `t` on gives
///
/// ```text
/// P(T ≥ t) = (p−q) p x^τ C_τ [ w·2F1(1, τ+½; τ+2; 4x)
///                              + 2·4x (τ+½)/(τ+2) · 2F1(2, τ+3/2; τ+3; 4x) ]
/// ```
///
/// where `w = 2` for odd `t` and `w = 1` for even `t` (the even case drops
/// the unpaired mass `P(T = t − 1)`). The prefactor is formed in log space.
pub fn tail_exact(params: BiasParams, t: u64, tol: f64) -> Result<TailEstimate> {
    let tau = tau(t);
    if t == 0 || params.is_degenerate() {
        let raw = if t == 0 { 1.0 } else { 0.0 };
        return Ok(TailEstimate::new(t, raw, TailMethod::ExactSeries, 0.0, Some(tau)));
    }
    let (p, q) = (params.p(), params.q());
    let x4 = params.four_pq();
    let tf = tau as f64;

    let first = hyp2f1(1.0, tf + 0.5, tf + 2.0, x4, tol)?;
    let second = hyp2f1(2.0, tf + 1.5, tf + 3.0, x4, tol)?;
    let weight = if t % 2 == 1 { 2.0 } else { 1.0 };
    let slope = 2.0 * x4 * (tf + 0.5) / (tf + 2.0);

    let ln_prefactor = params.drift().ln() + p.ln() + tf * (p * q).ln() + ln_catalan(tau);
    let prefactor = ln_prefactor.exp();
    let bracket = weight * first.value + slope * second.value;
    let error = prefactor * (weight * first.truncation_bound + slope * second.truncation_bound);
    Ok(TailEstimate::new(
        t,
        prefactor * bracket,
        TailMethod::ExactSeries,
        error,
        Some(tau),
    ))
}

/// The Lerch-series expression `(p−q)(4pq)^τ [Φ(4pq, ½, τ) + (1−τ)Φ(4pq, 3/2, τ)]`
/// that tracks `P(T ≥ t)` up to bounded factors. Not a probability: the raw
/// value is reported unclamped.
pub fn tail_asymptotic(params: BiasParams, t: u64, tol: f64) -> Result<TailEstimate> {
    if t == 0 {
        return domain("the Lerch expression needs t >= 1");
    }
    let tau = tau(t);
    let tf = tau as f64;
    let x4 = params.four_pq();
    let half = lerch_phi(x4, 0.5, tf, tol)?;
    let three_halves = lerch_phi(x4, 1.5, tf, tol)?;
    let scale = params.drift() * x4.powf(tf);
    let value = scale * (half.value + (1.0 - tf) * three_halves.value);
    let error = scale * (half.truncation_bound + (tf - 1.0) * three_halves.truncation_bound);
    Ok(TailEstimate {
        t,
        probability: value,
        raw_value: value,
        method: TailMethod::LerchAsymptotic,
        error_bound: error,
        tau: Some(tau),
    })
}
