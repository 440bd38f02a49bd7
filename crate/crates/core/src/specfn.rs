//! Special functions and information-theoretic primitives.
//!
//! Catalan numbers (linear and log space), rising Pochhammer symbols, the
//! Gauss hypergeometric series `2F1` and the Lerch transcendent `Φ` on their
//! discs of convergence, Bernoulli relative entropy, and the two binomial tail
//! estimates built from it.
//!
//! Series come back as [`SeriesValue`]: the partial sum together with a
//! certified bound on the discarded tail. A tail bound is only issued once the
//! term ratio is proven to stay below some `R < 1` for every remaining term,
//! in which case the tail is at most `|last term| · R / (1 − R)`.
//!
//! All logarithms are natural.

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Default absolute tolerance for series evaluation.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 10_000_000;

/// A truncated series together with a bound on the absolute truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_bound: f64,
    pub terms_used: usize,
}

/// Arguments of the Bernoulli relative entropy `D(x‖y)`, both strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    x: f64,
    y: f64,
}

impl EntropyPair {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let open = |v: f64| v.is_finite() && v > 0.0 && v < 1.0;
        if !open(x) || !open(y) {
            return domain(format!(
                "relative entropy needs 0 < x, y < 1 (got x = {x}, y = {y})"
            ));
        }
        Ok(EntropyPair { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// `C_n = binom(2n, n) / (n + 1)` in linear space.
///
/// Uses the product `C_{i+1} = C_i · 2(2i + 1)/(i + 2)`; reports
/// [`Error::Overflow`] once the value leaves the `f64` range (n ≥ 519).
pub fn catalan(n: u64) -> Result<f64> {
    let mut c = 1.0_f64;
    for i in 0..n {
        let i = i as f64;
        c *= 2.0 * (2.0 * i + 1.0) / (i + 2.0);
        if !c.is_finite() {
            return Err(Error::Overflow(format!(
                "C_{n} exceeds the f64 range; use ln_catalan"
            )));
        }
    }
    Ok(c)
}

/// `ln C_n`, accurate for every `n` that fits in memory-free arithmetic.
pub fn ln_catalan(n: u64) -> f64 {
    ln_factorial(2 * n) - 2.0 * ln_factorial(n) - ((n + 1) as f64).ln()
}

const STIRLING_CUTOFF: u64 = 256;

/// `ln n!`: direct summation below 256, Stirling series above.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= STIRLING_CUTOFF {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/(12x) - 1/(360x^3) + 1/(1260x^5) - 1/(1680x^7)
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// Rising Pochhammer symbol `(α)_n = α(α + 1)⋯(α + n − 1)`, with `(α)_0 = 1`.
pub fn pochhammer(alpha: f64, n: u64) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (alpha + k as f64))
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v.fract() == 0.0
}

/// Gauss hypergeometric `2F1(a, b; c; x)` for `|x| < 1`, default term cap.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64, tol: f64) -> Result<SeriesValue> {
    hyp2f1_capped(a, b, c, x, tol, MAX_TERMS)
}

/// [`hyp2f1`] with an explicit term cap.
pub fn hyp2f1_capped(
    a: f64,
    b: f64,
    c: f64,
    x: f64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesValue> {
    if !(x.is_finite() && x.abs() < 1.0) {
        return domain(format!("2F1 series needs |x| < 1 (got {x})"));
    }
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return domain("2F1 parameters must be finite");
    }
    if is_nonpositive_integer(c) {
        return domain(format!("2F1 undefined for nonpositive integer c = {c}"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive (got {tol})"));
    }

    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut bound = f64::INFINITY;
    for n in 0..max_terms {
        let nf = n as f64;
        if x == 0.0 || a + nf == 0.0 || b + nf == 0.0 {
            // every later term vanishes
            return Ok(SeriesValue {
                value: sum,
                truncation_bound: 0.0,
                terms_used: n + 1,
            });
        }
        let growth = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
        if let Some(sup) = hyp_ratio_sup(a, b, c, nf, growth.abs()) {
            let r = sup * x.abs();
            if r < 1.0 {
                bound = term.abs() * r / (1.0 - r);
                if bound < tol {
                    return Ok(SeriesValue {
                        value: sum,
                        truncation_bound: bound,
                        terms_used: n + 1,
                    });
                }
            }
        }
        if n + 1 == max_terms {
            break;
        }
        term *= growth * x;
        sum += term;
    }
    Err(Error::NonConvergence {
        partial: sum,
        bound,
        terms: max_terms,
    })
}

/// Upper bound on `f(j) = (j+a)(j+b)/((j+c)(j+1))` over all `j ≥ n`.
///
/// With `M = max(f(n), 1)` the quadratic `g(j) = (j+a)(j+b) − M(j+c)(j+1)` is
/// concave and `g(n) ≤ 0`, so `g ≤ 0` on `[n, ∞)` as soon as `g'(n) ≤ 0`.
fn hyp_ratio_sup(a: f64, b: f64, c: f64, n: f64, f_n: f64) -> Option<f64> {
    if n + a <= 0.0 || n + b <= 0.0 || n + c <= 0.0 {
        return None;
    }
    let m = f_n.max(1.0);
    let slope = (2.0 * n + a + b) - m * (2.0 * n + c + 1.0);
    (slope <= 0.0).then_some(m)
}

/// Lerch transcendent `Φ(z, s, a) = Σ zⁿ/(n + a)^s` for `|z| < 1`, `a > 0`.
pub fn lerch_phi(z: f64, s: f64, a: f64, tol: f64) -> Result<SeriesValue> {
    lerch_phi_capped(z, s, a, tol, MAX_TERMS)
}

/// [`lerch_phi`] with an explicit term cap.
pub fn lerch_phi_capped(z: f64, s: f64, a: f64, tol: f64, max_terms: usize) -> Result<SeriesValue> {
    if !(z.is_finite() && z.abs() < 1.0) {
        return domain(format!("Lerch series needs |z| < 1 (got {z})"));
    }
    if !(a.is_finite() && a > 0.0) {
        return domain(format!("Lerch series needs a > 0 (got {a})"));
    }
    if !s.is_finite() {
        return domain("Lerch exponent s must be finite");
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive (got {tol})"));
    }

    let mut zpow = 1.0_f64;
    let mut sum = 0.0_f64;
    let mut bound = f64::INFINITY;
    for n in 0..max_terms {
        let shift = n as f64 + a;
        let term = zpow / shift.powf(s);
        sum += term;
        if z == 0.0 {
            return Ok(SeriesValue {
                value: sum,
                truncation_bound: 0.0,
                terms_used: n + 1,
            });
        }
        // ((n+a)/(n+1+a))^s is ≤ 1 for s ≥ 0 and decreasing in n for s < 0
        let r = z.abs() * (shift / (shift + 1.0)).powf(s).max(1.0);
        if r < 1.0 {
            bound = term.abs() * r / (1.0 - r);
            if bound < tol {
                return Ok(SeriesValue {
                    value: sum,
                    truncation_bound: bound,
                    terms_used: n + 1,
                });
            }
        }
        zpow *= z;
    }
    Err(Error::NonConvergence {
        partial: sum,
        bound,
        terms: max_terms,
    })
}

/// Bernoulli relative entropy `D(x‖y)` in nats.
pub fn rel_entropy(pair: EntropyPair) -> f64 {
    let (x, y) = (pair.x, pair.y);
    let d = x * (x / y).ln() + (1.0 - x) * ((1.0 - x) / (1.0 - y)).ln();
    d.max(0.0)
}

/// Convenience wrapper validating the arguments of [`rel_entropy`].
pub fn kl_bernoulli(x: f64, y: f64) -> Result<f64> {
    EntropyPair::new(x, y).map(rel_entropy)
}

fn check_binomial(n_trials: u64, p_success: f64) -> Result<()> {
    if n_trials == 0 {
        return domain("binomial tail needs at least one trial");
    }
    if !(p_success > 0.0 && p_success < 1.0) {
        return domain(format!("success probability must lie in (0, 1) (got {p_success})"));
    }
    Ok(())
}

/// Chernoff–Hoeffding upper bound `exp(−n·D(k/n‖p))` on `P(X ≤ k)`, `X ~ B(n, p)`,
/// valid for `0 < k/n < p`.
pub fn binom_tail_upper(n_trials: u64, p_success: f64, k: i64) -> Result<f64> {
    check_binomial(n_trials, p_success)?;
    let frac = k as f64 / n_trials as f64;
    if !(frac > 0.0 && frac < p_success) {
        return domain(format!("lower-tail bound needs 0 < k/n < p (k/n = {frac}, p = {p_success})"));
    }
    let d = rel_entropy(EntropyPair::new(frac, p_success)?);
    Ok((-(n_trials as f64) * d).exp())
}

/// Stirling lower bound `exp(−n·D(k/n‖p)) / √(2n)` on `P(X ≥ k)`, valid for
/// `p < k/n < 1`.
pub fn binom_tail_lower(n_trials: u64, p_success: f64, k: i64) -> Result<f64> {
    check_binomial(n_trials, p_success)?;
    let nf = n_trials as f64;
    let frac = k as f64 / nf;
    if !(frac > p_success && frac < 1.0) {
        return domain(format!("upper-tail bound needs p < k/n < 1 (k/n = {frac}, p = {p_success})"));
    }
    let d = rel_entropy(EntropyPair::new(frac, p_success)?);
    Ok((-nf * d).exp() / (2.0 * nf).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_catalan_values() {
        assert_eq!(catalan(0).unwrap(), 1.0);
        assert_eq!(catalan(3).unwrap(), 5.0);
        assert_eq!(catalan(10).unwrap(), 16796.0);
        assert!(matches!(catalan(600), Err(Error::Overflow(_))));
        assert_eq!(ln_catalan(0), 0.0);
    }

    #[test]
    fn ln_catalan_matches_linear_form_across_cutoff() {
        for n in [1_u64, 5, 100, 127, 128, 129, 200, 400, 500] {
            let lin = catalan(n).unwrap().ln();
            assert_relative_eq!(ln_catalan(n), lin, max_relative = 1e-12);
        }
    }

    #[test]
    fn ln_catalan_step_ratio_at_large_n() {
        // C_n / C_{n-1} = 2(2n-1)/(n+1)
        let n = 1_000_000_u64;
        let step = ln_catalan(n) - ln_catalan(n - 1);
        let expected = (2.0 * (2.0 * n as f64 - 1.0) / (n as f64 + 1.0)).ln();
        assert!((step - expected).abs() < 1e-7, "step {step} vs {expected}");
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(2.5, 0), 1.0);
        assert_eq!(pochhammer(1.0, 4), 24.0);
        assert_relative_eq!(pochhammer(0.5, 3), 0.5 * 1.5 * 2.5);
        assert_eq!(pochhammer(-2.0, 3), 0.0);
    }

    #[test]
    fn hyp2f1_trivial_cases() {
        let v = hyp2f1(1.0, 0.5, 2.0, 0.0, DEFAULT_TOL).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.truncation_bound, 0.0);
        let g = hyp2f1(1.0, 1.0, 1.0, 0.5, DEFAULT_TOL).unwrap();
        assert!((g.value - 2.0).abs() < 1e-12);
        assert!(g.truncation_bound < DEFAULT_TOL);
    }

    #[test]
    fn hyp2f1_terminating_polynomial() {
        // 2F1(-2, b; c; x) = 1 - 2bx/c + b(b+1)x²/(c(c+1))
        let (b, c, x) = (1.5, 3.0, 0.4);
        let v = hyp2f1(-2.0, b, c, x, DEFAULT_TOL).unwrap();
        let expected = 1.0 - 2.0 * b * x / c + b * (b + 1.0) * x * x / (c * (c + 1.0));
        assert!((v.value - expected).abs() < 1e-15);
        assert_eq!(v.truncation_bound, 0.0);
    }

    #[test]
    fn hyp2f1_closed_forms() {
        // 2F1(1, 1; 2; x) = -ln(1 - x)/x
        for x in [-0.9, -0.3, 0.2, 0.7, 0.95] {
            let v = hyp2f1(1.0, 1.0, 2.0, x, 1e-14).unwrap();
            let expected = -(1.0 - x).ln() / x;
            assert!((v.value - expected).abs() < 1e-12, "x = {x}");
        }
        // 2F1(1/2, 1; 3/2; x²) = atanh(x)/x
        let x: f64 = 0.8;
        let v = hyp2f1(0.5, 1.0, 1.5, x * x, 1e-14).unwrap();
        assert!((v.value - x.atanh() / x).abs() < 1e-12);
    }

    #[test]
    fn hyp2f1_errors() {
        assert!(matches!(hyp2f1(1.0, 1.0, 1.0, 1.0, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(hyp2f1(1.0, 1.0, -2.0, 0.5, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(hyp2f1(1.0, 1.0, 1.0, 0.5, 0.0), Err(Error::Domain(_))));
        match hyp2f1_capped(1.0, 1.0, 1.0, 0.999, 1e-14, 50) {
            Err(Error::NonConvergence { terms, bound, .. }) => {
                assert_eq!(terms, 50);
                assert!(bound.is_finite() && bound > 1e-14);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn hyp2f1_truncation_bound_is_honest() {
        let exact = 1.0 / (1.0 - 0.9);
        let v = hyp2f1(1.0, 1.0, 1.0, 0.9, 1e-6).unwrap();
        assert!((v.value - exact).abs() <= v.truncation_bound);
    }

    #[test]
    fn lerch_trivial_cases() {
        let v = lerch_phi(0.0, 1.5, 4.0, DEFAULT_TOL).unwrap();
        assert_eq!(v.value, 0.125);
        let g = lerch_phi(0.5, 0.0, 1.0, DEFAULT_TOL).unwrap();
        assert!((g.value - 2.0).abs() < 1e-12);
        assert!(matches!(lerch_phi(0.5, 1.0, 0.0, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(lerch_phi(-1.0, 1.0, 1.0, 1e-12), Err(Error::Domain(_))));
    }

    #[test]
    fn lerch_negative_exponent() {
        // Φ(z, -1, 1) = Σ (n+1) zⁿ = 1/(1-z)²
        let v = lerch_phi(0.6, -1.0, 1.0, 1e-13).unwrap();
        assert!((v.value - 1.0 / 0.16).abs() < 1e-11);
    }

    #[test]
    fn relative_entropy_examples() {
        assert_eq!(kl_bernoulli(0.3, 0.3).unwrap(), 0.0);
        assert!((kl_bernoulli(0.5, 0.75).unwrap() - 0.5 * (4.0_f64 / 3.0).ln()).abs() < 1e-15);
        assert!((kl_bernoulli(0.25, 0.75).unwrap() - 0.5 * 3.0_f64.ln()).abs() < 1e-15);
        assert!(EntropyPair::new(0.0, 0.5).is_err());
        assert!(EntropyPair::new(0.5, 1.0).is_err());
        assert!(EntropyPair::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn binomial_bound_domains() {
        assert!(binom_tail_upper(10, 0.75, 8).is_err());
        assert!(binom_tail_upper(10, 0.75, 0).is_err());
        assert!(binom_tail_lower(10, 0.25, 2).is_err());
        assert!(binom_tail_lower(10, 0.25, 10).is_err());
        assert!(binom_tail_lower(0, 0.25, 1).is_err());
        let u = binom_tail_upper(10, 0.75, 5).unwrap();
        let d = kl_bernoulli(0.5, 0.75).unwrap();
        assert!((u - (-10.0 * d).exp()).abs() < 1e-15);
    }
}
