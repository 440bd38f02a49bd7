//! The acceptance suite behind `verify all`.
//!
//! Each check returns a [`CriterionReport`] whose `details` hold the measured
//! quantities. Reports contain no timings, so the serialized suite is a pure
//! function of the seed and the trial cap.

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::rng::{domain_of, rng_stream};
use super::runner::Runner;
use super::stats::{Proportion, Survival, Welford};
use crate::error::Result;
use crate::interval::{
    corrupt, optimal_set_summary, phantom_prob_upper, phantom_thresholds, pseudo_phantom_prob_lower,
    IntervalCandidate, OptimalSetSummary, PlantedInstance, Span, WITNESS_LIMIT,
};
use crate::learn::{
    run_pac_uniform, run_threshold_trial, sample_complexity_pac, sample_complexity_threshold, Design,
    ThresholdScenario,
};
use crate::regress::{design_with_spectrum, expected_error, gaussian_design, noise_trial, OlsSolver};
use crate::specfn::DEFAULT_TOL;
use crate::walk::{
    mgf, moments, simulate_t, tail_asymptotic, tail_dp_oracle, tail_exact, tail_upper_mgf, BiasParams,
};

use nalgebra::DVector;
use rand::Rng;

/// Bias values shared by the walk checks.
pub const WALK_GRID: [f64; 5] = [0.55, 0.6, 0.75, 0.9, 0.99];

/// Trial cap used by the determinism check when it replays the Monte Carlo
/// checks.
pub const REPLAY_CAP: u64 = 200;

/// Identifier and short name of every check, in execution order.
pub const CRITERIA: [(u8, &str); 14] = [
    (1, "exact tail vs dp oracle"),
    (2, "mgf tail bound"),
    (3, "moments"),
    (4, "moment generating function"),
    (5, "parity identity"),
    (6, "lerch asymptotic"),
    (7, "optimal set vs brute force"),
    (8, "phantom phase transition"),
    (9, "phantom probability bounds"),
    (10, "erm deviation law"),
    (11, "threshold sample complexity"),
    (12, "pac uniform draw"),
    (13, "regression error identity"),
    (14, "determinism"),
];

/// Run-time settings of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub parallelism: usize,
    /// Upper limit on Monte Carlo trials per setting.
    pub trial_cap: Option<u64>,
}

impl VerifyConfig {
    fn trials(&self, nominal: u64) -> u64 {
        self.trial_cap.map_or(nominal, |cap| cap.min(nominal))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub details: Map<String, Value>,
}

fn report(criterion: u8, passed: bool, details: Value) -> CriterionReport {
    let name = CRITERIA[criterion as usize - 1].1.to_string();
    let details = match details {
        Value::Object(map) => map,
        other => {
            let mut map = Map::new();
            map.insert("value".into(), other);
            map
        }
    };
    CriterionReport {
        criterion,
        name,
        passed,
        details,
    }
}

/// Run one check by number.
pub fn run_criterion(criterion: u8, cfg: &VerifyConfig) -> Result<CriterionReport> {
    let runner = Runner::new(cfg.parallelism, cfg.seed)?;
    match criterion {
        1 => exact_vs_dp(),
        2 => mgf_tail_bound(),
        3 => moment_check(cfg, &runner),
        4 => mgf_check(),
        5 => parity(),
        6 => lerch_ratio(),
        7 => brute_force_equivalence(cfg),
        8 => phase_transition(cfg, &runner),
        9 => phantom_bounds(cfg, &runner),
        10 => erm_walk_law(cfg, &runner),
        11 => threshold_complexity(cfg, &runner),
        12 => pac_uniform(cfg, &runner),
        13 => regression_identity(cfg, &runner),
        14 => determinism(cfg),
        other => Err(crate::Error::Invalid(format!("no criterion {other}"))),
    }
}

/// Every check in order; `each` sees each report as soon as it is ready.
pub fn run_all(
    cfg: &VerifyConfig,
    mut each: impl FnMut(&CriterionReport, std::time::Duration),
) -> Result<Vec<CriterionReport>> {
    let mut out = Vec::with_capacity(CRITERIA.len());
    for (id, _) in CRITERIA {
        let start = std::time::Instant::now();
        let r = run_criterion(id, cfg)?;
        each(&r, start.elapsed());
        out.push(r);
    }
    Ok(out)
}

fn exact_vs_dp() -> Result<CriterionReport> {
    let mut worst = (0.0_f64, 0.0, 0);
    for p in WALK_GRID {
        let params = BiasParams::new(p)?;
        let dp = tail_dp_oracle(params, 60)?;
        for t in 0..=60_u64 {
            let exact = tail_exact(params, t, DEFAULT_TOL)?.probability;
            let diff = (exact - dp.tail(t as usize)).abs();
            if diff > worst.0 {
                worst = (diff, p, t);
            }
        }
    }
    Ok(report(
        1,
        worst.0 <= 1e-9,
        json!({"max_abs_diff": worst.0, "at_p": worst.1, "at_t": worst.2, "tolerance": 1e-9}),
    ))
}

fn mgf_tail_bound() -> Result<CriterionReport> {
    let (mut violations, mut max_ratio) = (0_u64, 0.0_f64);
    for p in WALK_GRID {
        let params = BiasParams::new(p)?;
        let dp = tail_dp_oracle(params, 60)?;
        for t in 0..=60_u64 {
            let tail = dp.tail(t as usize);
            let bound = tail_upper_mgf(params, t).raw_value;
            if tail > bound {
                violations += 1;
            }
            max_ratio = max_ratio.max(tail / bound);
        }
    }
    Ok(report(
        2,
        violations == 0,
        json!({"violations": violations, "max_tail_over_bound": max_ratio}),
    ))
}

fn moment_check(cfg: &VerifyConfig, runner: &Runner) -> Result<CriterionReport> {
    const SAFETY: f64 = 1e-9;
    let trials = cfg.trials(1_000_000);
    let mut rows = Vec::new();
    let mut passed = true;
    for p in [0.6, 0.75, 0.9] {
        let params = BiasParams::new(p)?;
        let closed = moments(params);
        let dp = tail_dp_oracle(params, 60)?;
        let dp_mean = dp.expectation(|k| k);
        let dp_second = dp.expectation(|k| k * k);
        let dp_ok = (dp_mean - closed.mean).abs() <= 1e-8 && (dp_second - closed.second_moment).abs() <= 1e-8;

        let (mut first, mut second) = (Welford::default(), Welford::default());
        runner.run(
            domain_of(&format!("verify/moments/{p}")),
            trials,
            |_, rng| Ok(simulate_t(params, SAFETY, rng)?.0),
            |_, t| {
                let t = t as f64;
                first.push(t);
                second.push(t * t);
            },
        )?;
        let z_mean = (first.mean() - closed.mean) / first.std_error();
        let z_second = (second.mean() - closed.second_moment) / second.std_error();
        let mc_ok = z_mean.abs() <= 4.0 && z_second.abs() <= 4.0;
        passed &= dp_ok && mc_ok;
        rows.push(json!({
            "p": p,
            "mean": closed.mean,
            "second_moment": closed.second_moment,
            "dp_mean": dp_mean,
            "dp_second_moment": dp_second,
            "mc_mean": first.mean(),
            "mc_second_moment": second.mean(),
            "z_mean": z_mean,
            "z_second_moment": z_second,
        }));
    }
    Ok(report(3, passed, json!({"trials": trials, "safety_tol": SAFETY, "rows": rows})))
}

fn mgf_check() -> Result<CriterionReport> {
    let mut rows = Vec::new();
    let mut passed = true;
    for (p, t_max) in [(0.6, 3000), (0.75, 400)] {
        let params = BiasParams::new(p)?;
        let dp = tail_dp_oracle(params, t_max)?;
        for s in [0.0, 0.01, 0.05] {
            let numeric = dp.expectation(|k| (s * k).exp());
            match mgf(params, s) {
                Ok(closed) => {
                    let diff = (numeric - closed).abs();
                    let mut ok = diff <= 1e-7;
                    if s == 0.0 {
                        ok &= (closed - 1.0).abs() <= 1e-12 && (numeric - 1.0).abs() <= 1e-12;
                    }
                    passed &= ok;
                    rows.push(json!({"p": p, "s": s, "closed_form": closed, "dp": numeric, "abs_diff": diff, "passed": ok}));
                }
                Err(_) => {
                    // beyond ½ln(1/(4pq)) the expectation is infinite: the
                    // closed form must refuse and the partial sums must blow up
                    let ok = numeric > 1e6;
                    passed &= ok;
                    rows.push(json!({
                        "p": p,
                        "s": s,
                        "closed_form": "outside domain",
                        "dp_partial_sum": numeric,
                        "passed": ok,
                    }));
                }
            }
        }
    }
    Ok(report(4, passed, json!({"rows": rows})))
}

fn parity() -> Result<CriterionReport> {
    let mut max_diff = 0.0_f64;
    for p in WALK_GRID {
        let dp = tail_dp_oracle(BiasParams::new(p)?, 40)?;
        for k in 1..=15 {
            max_diff = max_diff.max((dp.mass(2 * k) - dp.mass(2 * k - 1)).abs());
        }
    }
    Ok(report(5, max_diff <= 1e-12, json!({"max_abs_diff": max_diff})))
}

fn lerch_ratio() -> Result<CriterionReport> {
    let params = BiasParams::new(0.75)?;
    let ratio = |t: u64| -> Result<f64> {
        Ok(tail_exact(params, t, DEFAULT_TOL)?.probability / tail_asymptotic(params, t, DEFAULT_TOL)?.raw_value)
    };
    let (r20, r40) = (ratio(20)?, ratio(40)?);
    let variation = (r40 - r20).abs() / r20;
    let in_range = [r20, r40].iter().all(|r| (0.1..=10.0).contains(r));
    Ok(report(
        6,
        variation < 0.2 && in_range,
        json!({"ratio_t20": r20, "ratio_t40": r40, "relative_variation": variation}),
    ))
}

/// `O(n²)` enumeration of every interval; the reference for
/// [`optimal_set_summary`].
pub fn brute_force_summary(values: &[i8], reference: Option<Span>) -> OptimalSetSummary {
    let n = values.len();
    let mut all = Vec::with_capacity(n * (n + 1) / 2);
    for s in 1..=n {
        let mut score = 0_i64;
        for e in s..=n {
            score += values[e - 1] as i64;
            all.push(IntervalCandidate { start: s, end: e, score });
        }
    }
    let m = all.iter().map(|c| c.score).max().expect("nonempty");
    let mut optimal: Vec<IntervalCandidate> = all.iter().copied().filter(|c| c.score == m).collect();
    optimal.sort();
    let mut summary = OptimalSetSummary {
        max_score: m,
        count: optimal.len() as u64,
        max_sym_diff: None,
        max_overlapping_sym_diff: None,
        phantom_exists: None,
        phantom_witness: None,
        best_disjoint_score: None,
        witness_examples: optimal.iter().copied().take(WITNESS_LIMIT).collect(),
    };
    if let Some(r) = reference {
        summary.max_sym_diff = optimal.iter().map(|c| c.span().sym_diff(&r) as u64).max();
        summary.max_overlapping_sym_diff = optimal
            .iter()
            .filter(|c| c.span().intersects(&r))
            .map(|c| c.span().sym_diff(&r) as u64)
            .max();
        summary.phantom_witness = optimal.iter().copied().find(|c| !c.span().intersects(&r));
        summary.phantom_exists = Some(summary.phantom_witness.is_some());
        summary.best_disjoint_score = all
            .iter()
            .filter(|c| !c.span().intersects(&r))
            .map(|c| c.score)
            .max();
    }
    summary
}

fn brute_force_equivalence(cfg: &VerifyConfig) -> Result<CriterionReport> {
    let domain = domain_of("verify/brute-force");
    let mut mismatches = 0_u64;
    let mut first_mismatch = Value::Null;
    for k in 0..500_u64 {
        let mut rng = rng_stream(cfg.seed, domain, k);
        let n = rng.random_range(1..=200_usize);
        let q = rng.random_range(0.0..0.5);
        let a = rng.random_range(1..=n);
        let b = rng.random_range(a..=n);
        let instance = PlantedInstance::new(n, Span::new(a, b)?, q)?;
        let signal = corrupt(&instance, &mut rng);
        let reference = if k % 5 == 4 { None } else { Some(instance.interval()) };
        let fast = optimal_set_summary(&signal, reference)?;
        let slow = brute_force_summary(signal.values(), reference);
        if fast != slow {
            mismatches += 1;
            if first_mismatch.is_null() {
                first_mismatch = json!({"instance": k, "n": n, "fast": fast, "brute": slow});
            }
        }
    }
    Ok(report(
        7,
        mismatches == 0,
        json!({"instances": 500, "mismatches": mismatches, "first_mismatch": first_mismatch}),
    ))
}

fn phantom_frequency(runner: &Runner, name: &str, instance: PlantedInstance, trials: u64) -> Result<Proportion> {
    let mut freq = Proportion::default();
    let reference = Some(instance.interval());
    runner.run(
        domain_of(name),
        trials,
        |_, rng| {
            let s = corrupt(&instance, rng);
            Ok(optimal_set_summary(&s, reference)?.phantom_exists == Some(true))
        },
        |_, hit| freq.push(hit),
    )?;
    Ok(freq)
}

fn phase_transition(cfg: &VerifyConfig, runner: &Runner) -> Result<CriterionReport> {
    let (n, p) = (100_000_usize, 0.75);
    let params = BiasParams::new(p)?;
    let th = phantom_thresholds(n, params)?;
    let long = (1.5 * th.upper_len).ceil() as usize;
    let short = (0.5 * th.lower_len).floor() as usize;
    let trials = cfg.trials(300);
    let high = phantom_frequency(runner, "verify/phase/long", PlantedInstance::centered(n, long, params.q())?, trials)?;
    let low = phantom_frequency(runner, "verify/phase/short", PlantedInstance::centered(n, short, params.q())?, trials)?;
    let (fh, fl) = (high.frequency(), low.frequency());
    Ok(report(
        8,
        fh <= 0.05 && fl >= 0.95,
        json!({
            "n": n,
            "p": p,
            "trials": trials,
            "long_len": long,
            "long_phantom_frequency": fh,
            "long_passed": fh <= 0.05,
            "short_len": short,
            "short_phantom_frequency": fl,
            "short_passed": fl >= 0.95,
        }),
    ))
}

/// `(n, |I|, p)` points for the union bound on phantoms.
pub const PHANTOM_UPPER_GRID: [(usize, usize, f64); 5] =
    [(1000, 70, 0.75), (1000, 80, 0.75), (1000, 100, 0.75), (2000, 20, 0.9), (2000, 25, 0.9)];

/// `(n, |I|, r, p)` points for the pseudo-phantom lower bound; `r + |I|` is even.
pub const PSEUDO_PHANTOM_GRID: [(usize, usize, i64, f64); 4] = [
    (100_000, 20, 10, 0.75),
    (10_000, 10, 4, 0.75),
    (10_000, 16, 8, 0.75),
    (20_000, 12, 6, 0.8),
];

fn phantom_bounds(cfg: &VerifyConfig, runner: &Runner) -> Result<CriterionReport> {
    let trials = cfg.trials(1000);
    let se_at = |b: f64| (b * (1.0 - b) / trials as f64).sqrt();
    let mut violations = 0_u64;
    let mut rows = Vec::new();
    for (n, len, p) in PHANTOM_UPPER_GRID {
        let params = BiasParams::new(p)?;
        let bound = phantom_prob_upper(n, len, params)?.min(1.0);
        let inst = PlantedInstance::centered(n, len, params.q())?;
        let freq = phantom_frequency(runner, &format!("verify/phantom-upper/{n}/{len}/{p}"), inst, trials)?.frequency();
        let ok = freq <= bound + 4.0 * se_at(bound);
        violations += !ok as u64;
        rows.push(json!({"kind": "phantom_upper", "n": n, "len": len, "p": p, "bound": bound, "frequency": freq, "passed": ok}));
    }
    for (n, len, r, p) in PSEUDO_PHANTOM_GRID {
        let params = BiasParams::new(p)?;
        let bound = pseudo_phantom_prob_lower(n, len, r, params)?;
        let inst = PlantedInstance::centered(n, len, params.q())?;
        let reference = Some(inst.interval());
        let mut freq = Proportion::default();
        runner.run(
            domain_of(&format!("verify/pseudo/{n}/{len}/{r}/{p}")),
            trials,
            |_, rng| {
                let s = corrupt(&inst, rng);
                Ok(optimal_set_summary(&s, reference)?.best_disjoint_score.is_some_and(|v| v >= r))
            },
            |_, hit| freq.push(hit),
        )?;
        let freq = freq.frequency();
        let ok = freq >= bound - 4.0 * se_at(bound);
        violations += !ok as u64;
        rows.push(json!({"kind": "pseudo_phantom_lower", "n": n, "len": len, "r": r, "p": p, "bound": bound, "frequency": freq, "passed": ok}));
    }
    Ok(report(9, violations == 0, json!({"trials": trials, "violations": violations, "rows": rows})))
}

fn erm_walk_law(cfg: &VerifyConfig, runner: &Runner) -> Result<CriterionReport> {
    const T_MAX: usize = 10;
    let trials = cfg.trials(100_000);
    let scenario = ThresholdScenario::new(0.5, 0.25, 1.0, 0.1)?;
    let design = Design::Integer { per_side: 200 };
    let mut survival = Survival::new(T_MAX);
    runner.run(
        domain_of("verify/erm-law"),
        trials,
        |_, rng| Ok(run_threshold_trial(&scenario, design, rng)?.right_count),
        |_, k| survival.push(k as u64),
    )?;
    let dp = tail_dp_oracle(BiasParams::new(0.75)?, T_MAX)?;
    let emp = survival.survival();
    let mut max_z = 0.0_f64;
    let mut passed = true;
    let mut rows = Vec::new();
    for t in 0..=T_MAX {
        let exact = dp.tail(t);
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        let diff = (emp[t] - exact).abs();
        let ok = diff <= 4.0 * se;
        if se > 0.0 {
            max_z = max_z.max(diff / se);
        }
        passed &= ok;
        rows.push(json!({"t": t, "empirical": emp[t], "walk": exact, "std_error": se}));
    }
    Ok(report(10, passed, json!({"trials": trials, "max_z": max_z, "rows": rows})))
}

fn success_rate<F>(runner: &Runner, name: &str, trials: u64, trial: F) -> Result<(Proportion, Welford)>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<(bool, f64)> + Sync,
{
    let (mut freq, mut err) = (Proportion::default(), Welford::default());
    runner.run(domain_of(name), trials, |_, rng| trial(rng), |_, (ok, e)| {
        freq.push(ok);
        err.push(e);
    })?;
    Ok((freq, err))
}

fn threshold_complexity(cfg: &VerifyConfig, runner: &Runner) -> Result<CriterionReport> {
    let m = sample_complexity_threshold(0.25, 0.05)? as usize;
    let scenario = ThresholdScenario::new(0.5, 0.25, 0.1, 0.05)?;
    let design = Design::Bands { per_band: m, outside: m };
    let trials = cfg.trials(10_000);
    let (freq, dev) = success_rate(runner, "verify/threshold", trials, |rng| {
        let t = run_threshold_trial(&scenario, design, rng)?;
        Ok((t.success, t.deviation))
    })?;
    let f = freq.frequency();
    Ok(report(
        11,
        f >= 0.95,
        json!({"per_band": m, "trials": trials, "success_frequency": f, "mean_deviation": dev.mean()}),
    ))
}

fn pac_uniform(cfg: &VerifyConfig, runner: &Runner) -> Result<CriterionReport> {
    let plan = sample_complexity_pac(0.25, 0.1, 0.1)?;
    let scenario = ThresholdScenario::new(0.3, 0.25, 0.1, 0.1)?;
    let trials = cfg.trials(1000);
    let m = plan.m as usize;
    let (freq, err) = success_rate(runner, "verify/pac", trials, |rng| {
        let t = run_pac_uniform(&scenario, m, rng)?;
        Ok((t.success, t.error))
    })?;
    let f = freq.frequency();
    Ok(report(
        12,
        f >= 0.9,
        json!({"m": m, "trials": trials, "success_frequency": f, "mean_error": err.mean()}),
    ))
}

fn regression_identity(cfg: &VerifyConfig, runner: &Runner) -> Result<CriterionReport> {
    const ETA: f64 = 0.5;
    // fixed designs, independent of the master seed
    let design_domain = domain_of("verify/regression/designs");
    let designs = [
        ("gaussian_200x5", gaussian_design(200, 5, &mut rng_stream(0, design_domain, 0))?),
        (
            "spectrum_5_to_9",
            design_with_spectrum(100, &[9.0, 8.0, 7.0, 6.0, 5.0], &mut rng_stream(0, design_domain, 1))?,
        ),
        (
            "condition_1e3",
            design_with_spectrum(100, &[1000.0, 1.0, 1.0, 1.0, 1.0], &mut rng_stream(0, design_domain, 2))?,
        ),
    ];
    let trials = cfg.trials(10_000);
    let mut rows = Vec::new();
    let mut passed = true;
    for (name, design) in &designs {
        let solver = OlsSolver::new(design)?;
        let w_true = DVector::from_element(design.cols(), 1.0);
        let expected = expected_error(design, ETA)?;
        let mut err = Welford::default();
        runner.run(
            domain_of(&format!("verify/regression/{name}")),
            trials,
            |_, rng| noise_trial(&solver, &w_true, ETA, rng),
            |_, e| err.push(e),
        )?;
        let rel = (err.mean() - expected).abs() / expected;
        passed &= rel <= 0.03;
        let sv = design.singular_values();
        rows.push(json!({
            "design": name,
            "condition_number": sv[0] / sv[sv.len() - 1],
            "expected": expected,
            "empirical": err.mean(),
            "relative_error": rel,
        }));
    }
    Ok(report(13, passed, json!({"eta": ETA, "trials": trials, "rows": rows})))
}

fn determinism(cfg: &VerifyConfig) -> Result<CriterionReport> {
    let replay = |parallelism: usize| -> Result<String> {
        let c = VerifyConfig {
            seed: cfg.seed,
            parallelism,
            trial_cap: Some(cfg.trials(REPLAY_CAP)),
        };
        let mut text = String::new();
        for id in [3, 8, 9, 10, 11, 12, 13] {
            text.push_str(&serde_json::to_string(&run_criterion(id, &c)?)?);
            text.push('\n');
        }
        Ok(text)
    };
    let serial = replay(1)?;
    let parallel = replay(8)?;
    let again = replay(8)?;
    let same = serial == parallel && parallel == again;
    Ok(report(
        14,
        same,
        json!({"replayed": [3, 8, 9, 10, 11, 12, 13], "trial_cap": cfg.trials(REPLAY_CAP), "bytes": serial.len(), "identical": same}),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::CorruptedSignal;

    fn cfg() -> VerifyConfig {
        VerifyConfig {
            seed: 7,
            parallelism: 2,
            trial_cap: Some(50),
        }
    }

    #[test]
    fn brute_force_agrees_on_small_cases() {
        let v = [1, -1, 1, 1, -1, -1, 1];
        let r = Span::new(3, 4).unwrap();
        let fast = optimal_set_summary(&CorruptedSignal::from_values(v.to_vec()).unwrap(), Some(r)).unwrap();
        assert_eq!(fast, brute_force_summary(&v, Some(r)));
    }

    #[test]
    fn analytic_checks_pass() {
        for id in [1, 2, 5, 6] {
            let r = run_criterion(id, &cfg()).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn cap_limits_trials() {
        let r = run_criterion(12, &cfg()).unwrap();
        assert_eq!(r.details["trials"], json!(50));
        assert!(run_criterion(15, &cfg()).is_err());
    }
}
