use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use noisyline::specfn::{
    binom_tail_lower, binom_tail_upper, catalan, hyp2f1, kl_bernoulli, lerch_phi, ln_catalan, ln_factorial,
};

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn big_catalan(n: u64) -> BigUint {
    binomial(2 * n, n) / BigUint::from(n + 1)
}

fn big_ln(x: &BigUint) -> f64 {
    // keep the top 60 bits
    let bits = x.bits();
    if bits <= 60 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[test]
fn catalan_against_big_integers() {
    assert_eq!(big_catalan(30), BigUint::from(3_814_986_502_092_304_u64));
    assert_eq!(catalan(30).unwrap(), 3_814_986_502_092_304.0);
    for n in 0..=500 {
        let exact = big_catalan(n);
        let rel = (catalan(n).unwrap() - exact.to_f64().unwrap()).abs() / exact.to_f64().unwrap();
        assert!(rel < 1e-12, "C_{n}: rel {rel}");
    }
    for n in [0, 1, 10, 100, 255, 256, 257, 1000, 5000] {
        let exact = big_ln(&big_catalan(n));
        assert!((ln_catalan(n) - exact).abs() <= 1e-10 * exact.max(1.0), "ln C_{n}");
    }
    assert!(catalan(600).is_err());
}

#[test]
fn factorial_logs_against_big_integers() {
    let mut f = BigUint::one();
    for n in 1..=600_u64 {
        f *= BigUint::from(n);
        let exact = big_ln(&f);
        assert!((ln_factorial(n) - exact).abs() <= 1e-12 * exact.max(1.0), "ln {n}!");
    }
}

/// `P(X ≤ k)` for `X ~ B(n, p)` from exact binomial coefficients.
fn cdf(n: u64, p: f64, k: u64) -> f64 {
    (0..=k)
        .map(|j| binomial(n, j).to_f64().unwrap() * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32))
        .sum()
}

proptest! {
    #[test]
    fn chernoff_dominates_the_lower_tail(n in 2u64..200, p in 0.05f64..0.95, frac in 0.0f64..1.0) {
        let k = (frac * p * n as f64).floor() as u64;
        prop_assume!(k > 0 && (k as f64) < p * n as f64);
        let bound = binom_tail_upper(n, p, k as i64).unwrap();
        prop_assert!(cdf(n, p, k) <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn stirling_undercuts_the_upper_tail(n in 2u64..200, p in 0.05f64..0.95, frac in 0.0f64..1.0) {
        let lo = (p * n as f64).floor() as u64 + 1;
        prop_assume!(lo < n);
        let k = lo + ((n - lo) as f64 * frac) as u64;
        prop_assume!(k < n);
        let bound = binom_tail_lower(n, p, k as i64).unwrap();
        let upper_tail = 1.0 - if k == 0 { 0.0 } else { cdf(n, p, k - 1) };
        let upper_tail_direct: f64 = (k..=n)
            .map(|j| binomial(n, j).to_f64().unwrap() * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32))
            .sum();
        prop_assert!((upper_tail - upper_tail_direct).abs() < 1e-9);
        prop_assert!(bound <= upper_tail_direct * (1.0 + 1e-12));
    }

    #[test]
    fn hypergeometric_log_identity(x in 0.0f64..0.98) {
        // 2F1(1, 1; 2; x) = −ln(1 − x)/x
        let v = hyp2f1(1.0, 1.0, 2.0, x, 1e-14).unwrap();
        let exact = if x == 0.0 { 1.0 } else { -(1.0 - x).ln() / x };
        prop_assert!((v.value - exact).abs() <= 1e-11 * exact);
        prop_assert!((v.value - exact).abs() <= v.truncation_bound.max(1e-13 * exact));
    }

    #[test]
    fn hypergeometric_binomial_identity(a in 0.1f64..3.0, b in 0.5f64..5.0, x in 0.0f64..0.9) {
        // 2F1(a, b; b; x) = (1 − x)^{−a}
        let v = hyp2f1(a, b, b, x, 1e-14).unwrap().value;
        let exact = (1.0 - x).powf(-a);
        prop_assert!((v - exact).abs() <= 1e-10 * exact);
    }

    #[test]
    fn lerch_special_values(z in 0.0f64..0.95, a in 0.5f64..20.0) {
        let geometric = lerch_phi(z, 0.0, a, 1e-14).unwrap().value;
        prop_assert!((geometric - 1.0 / (1.0 - z)).abs() <= 1e-11 / (1.0 - z));
        let log = lerch_phi(z, 1.0, 1.0, 1e-14).unwrap().value;
        let exact = if z == 0.0 { 1.0 } else { -(1.0 - z).ln() / z };
        prop_assert!((log - exact).abs() <= 1e-10 * exact);
    }

    #[test]
    fn relative_entropy_is_a_divergence(x in 0.01f64..0.99, y in 0.01f64..0.99) {
        let d = kl_bernoulli(x, y).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(kl_bernoulli(x, x).unwrap().abs() < 1e-15);
        // Pinsker
        prop_assert!(d >= 2.0 * (x - y) * (x - y) - 1e-15);
    }
}
