use rand::Rng;

use noisyline::harness::{domain_of, rng_stream, Runner, Welford};
use noisyline::walk::{simulate_t, BiasParams};

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn neighbouring_streams_are_uncorrelated() {
    let d = domain_of("smoke");
    let draws = |i: u64| -> Vec<f64> {
        let mut r = rng_stream(42, d, i);
        (0..1000).map(|_| r.random::<f64>()).collect()
    };
    let rho = correlation(&draws(0), &draws(1));
    assert!(rho.abs() < 0.05, "rho {rho}");
    // across pairs ρ has spread 1/√1000 ≈ 0.032
    let pairs = 200;
    let mean_sq = (0..pairs).map(|i| correlation(&draws(i), &draws(i + 1)).powi(2)).sum::<f64>() / pairs as f64;
    assert!(mean_sq.sqrt() < 0.05, "rms rho {}", mean_sq.sqrt());
    let other = {
        let mut r = rng_stream(42, domain_of("other"), 0);
        (0..1000).map(|_| r.random::<f64>()).collect::<Vec<_>>()
    };
    assert!(correlation(&draws(0), &other).abs() < 0.05);
}

#[test]
fn seeds_and_indices_change_the_first_draw() {
    let d = domain_of("x");
    let first = |s, i| rng_stream(s, d, i).random::<u64>();
    assert_ne!(first(0, 0), first(1, 0));
    assert_ne!(first(0, 0), first(0, 1));
    assert_eq!(first(9, 3), first(9, 3));
}

#[test]
fn aggregates_do_not_depend_on_thread_count() {
    let params = BiasParams::new(0.7).unwrap();
    let run = |threads| {
        let runner = Runner::new(threads, 5).unwrap();
        let mut w = Welford::default();
        let mut order = Vec::new();
        runner
            .run(domain_of("walk"), 9000, |_, rng| Ok(simulate_t(params, 1e-9, rng)?.0), |i, t| {
                order.push(i);
                w.push(t as f64);
            })
            .unwrap();
        assert!(order.iter().enumerate().all(|(k, &i)| k as u64 == i));
        (w.mean().to_bits(), w.variance().to_bits())
    };
    assert_eq!(run(1), run(3));
    assert_eq!(run(1), run(8));
}
