//! Command-line interface.
//!
//! Machine-readable records go to standard output (or `--out`), summaries to
//! standard error. Exit status: 0 on success, 2 for invalid input, 3 when an
//! acceptance check fails, 1 for anything else.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, IsTerminal, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;

use super::config::apply_config_file;
use super::output::{Format, RecordWriter};
use super::rng::domain_of;
use super::runner::Runner;
use super::stats::{Proportion, Survival, Welford};
use super::verify::{run_all, VerifyConfig};
use crate::error::{Error, Result};
use crate::interval::{
    corrupt, optimal_set_summary, phantom_prob_upper, phantom_thresholds, CorruptedSignal,
    OptimalSetSummary, PlantedInstance, Span,
};
use crate::learn::{
    erm_interval, erm_threshold, run_interval_uniform, run_pac_uniform, run_threshold_trial,
    sample_complexity_pac, sample_complexity_threshold, Design, NoisySample, ThresholdScenario,
};
use crate::regress::{adversarial_design_check, noise_trial, regress, DesignMatrix, OlsSolver, DEFAULT_C0};
use crate::specfn::DEFAULT_TOL;
use crate::walk::{
    moments, mgf_s_max, simulate_t, tail_asymptotic, tail_dp_oracle, tail_elementary_bounds,
    tail_exact, tail_upper_mgf, BiasParams, TailEstimate,
};

#[derive(Debug, Parser)]
#[command(name = "noisyline", version, about = "Corrupted processes on the integer line")]
pub struct Cli {
    /// Output format for records.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Master seed for all random streams.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo trials (an upper limit per setting under `verify all`).
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    /// Write records here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file of defaults for the flags above and below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The last bottom time of a biased walk.
    #[command(subcommand)]
    Walk(WalkCommand),
    /// Planted intervals under flip noise.
    #[command(subcommand)]
    Interval(IntervalCommand),
    /// ERM learners under classification noise.
    #[command(subcommand)]
    Learn(LearnCommand),
    /// Least squares under a fixed design.
    Regress(RegressArgs),
    /// Acceptance checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
pub enum WalkCommand {
    /// `P(T ≥ t)` by one of several methods.
    Tail(TailArgs),
    /// Draw `T` repeatedly.
    Simulate(SimulateArgs),
    /// Closed-form and DP moments.
    Moments(MomentsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliTailMethod {
    Exact,
    Dp,
    Mgf,
    Lerch,
    ElementaryUpper,
    ElementaryLower,
    MonteCarlo,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub t: u64,
    /// Emit one record for every `t..=t_max`.
    #[arg(long)]
    pub t_max: Option<u64>,
    #[arg(long, value_enum, default_value_t = CliTailMethod::Exact)]
    pub method: CliTailMethod,
    /// Series tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Simulation stopping tolerance for `monte-carlo`.
    #[arg(long, default_value_t = 1e-9)]
    pub safety_tol: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub safety_tol: f64,
    /// One record per trial instead of a summary.
    #[arg(long)]
    pub per_trial: bool,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub p: f64,
    /// Also report `E[e^{sT}]` at this argument.
    #[arg(long)]
    pub s: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum IntervalCommand {
    /// Summarize the optimal intervals of one signal.
    Recover(RecoverArgs),
    /// Phantom frequencies over interval lengths.
    PhantomScan(PhantomScanArgs),
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// Signal file: `n`, then the ±1 entries.
    #[arg(long, conflicts_with_all = ["n", "len", "q"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Planted interval length (centered unless `--start` is given).
    #[arg(long)]
    pub len: Option<usize>,
    /// First position of the planted or reference interval.
    #[arg(long)]
    pub start: Option<usize>,
    /// Last position of the reference interval for `--input`.
    #[arg(long)]
    pub end: Option<usize>,
    /// Flip probability.
    #[arg(long)]
    pub q: Option<f64>,
    /// Save the generated signal.
    #[arg(long)]
    pub write_signal: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhantomScanArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub q: f64,
    /// Interval lengths, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lens: Vec<usize>,
}

#[derive(Debug, Subcommand)]
pub enum LearnCommand {
    /// Threshold ERM on a file or in repeated band-design trials.
    Threshold(ThresholdArgs),
    /// Interval ERM on a file or in repeated uniform-draw trials.
    Interval(IntervalLearnArgs),
    /// Uniform-draw threshold experiment at the calculated size.
    Pac(PacArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliDesign {
    Bands,
    Integer,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Two-column sample file `x label`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub a_star: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = CliDesign::Bands)]
    pub design: CliDesign,
    /// Points per band; defaults to the calculated sample complexity.
    #[arg(long)]
    pub per_band: Option<usize>,
    /// Points beyond each band; defaults to `per_band`.
    #[arg(long)]
    pub outside: Option<usize>,
    /// Points per side for the integer design.
    #[arg(long, default_value_t = 200)]
    pub per_side: usize,
}

#[derive(Debug, Args)]
pub struct IntervalLearnArgs {
    /// Two-column sample file `x label`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.3)]
    pub a: f64,
    #[arg(long, default_value_t = 0.6)]
    pub b: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
}

#[derive(Debug, Args)]
pub struct PacArgs {
    #[arg(long, default_value_t = 0.3)]
    pub a_star: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Sample size; defaults to the calculator's value.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Design matrix as CSV, optional header row.
    #[arg(long)]
    pub design: PathBuf,
    /// Responses, one per line.
    #[arg(long)]
    pub response: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = DEFAULT_C0)]
    pub c0: f64,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Run every acceptance check.
    All,
}

/// Failure classes mapped to exit codes.
enum Outcome {
    Ok,
    AcceptanceFailed,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Invalid(_) | Error::Parse(_) | Error::SingularDesign { .. } => 2,
        _ => 1,
    }
}

/// Parse `args` (program name first), run, and return the exit status.
pub fn run_cli(args: Vec<OsString>) -> i32 {
    let args = match apply_config_file(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("noisyline: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::AcceptanceFailed) => 3,
        Err(e) => {
            eprintln!("noisyline: {e}");
            exit_code(&e)
        }
    }
}

struct Ctx {
    writer: RecordWriter,
    runner: Runner,
    trials: Option<u64>,
}

impl Ctx {
    fn trials(&self, default: u64) -> u64 {
        self.trials.unwrap_or(default)
    }

    fn emit<T: Serialize>(&mut self, record: &T) -> Result<()> {
        self.writer.write(record)
    }
}

fn parallelism(cli: &Cli) -> usize {
    cli.parallelism
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    };
    let threads = parallelism(cli);
    let mut ctx = Ctx {
        writer: RecordWriter::new(cli.format, out),
        runner: Runner::new(threads, cli.seed)?,
        trials: cli.trials,
    };
    if cli.trials == Some(0) {
        return Err(Error::Invalid("--trials must be at least 1".into()));
    }
    let outcome = match &cli.command {
        Command::Walk(WalkCommand::Tail(a)) => walk_tail(&mut ctx, a),
        Command::Walk(WalkCommand::Simulate(a)) => walk_simulate(&mut ctx, a),
        Command::Walk(WalkCommand::Moments(a)) => walk_moments(&mut ctx, a),
        Command::Interval(IntervalCommand::Recover(a)) => interval_recover(&mut ctx, a),
        Command::Interval(IntervalCommand::PhantomScan(a)) => phantom_scan(&mut ctx, a),
        Command::Learn(LearnCommand::Threshold(a)) => learn_threshold(&mut ctx, a),
        Command::Learn(LearnCommand::Interval(a)) => learn_interval(&mut ctx, a),
        Command::Learn(LearnCommand::Pac(a)) => learn_pac(&mut ctx, a),
        Command::Regress(a) => regress_cmd(&mut ctx, a),
        Command::Verify(VerifyCommand::All) => verify_all(&mut ctx, cli.seed, threads),
    }?;
    ctx.writer.finish()?;
    Ok(outcome)
}

#[derive(Serialize)]
struct TailRecord {
    p: f64,
    t: u64,
    tau: u64,
    probability: f64,
    raw_value: f64,
    error_bound: f64,
    method: &'static str,
}

impl TailRecord {
    fn from_estimate(p: f64, e: TailEstimate) -> Self {
        TailRecord {
            p,
            t: e.t,
            tau: crate::walk::tau(e.t),
            probability: e.probability,
            raw_value: e.raw_value,
            error_bound: e.error_bound,
            method: e.method.name(),
        }
    }
}

fn walk_tail(ctx: &mut Ctx, a: &TailArgs) -> Result<Outcome> {
    let params = BiasParams::new(a.p)?;
    let t_max = a.t_max.unwrap_or(a.t);
    if t_max < a.t {
        return Err(Error::Invalid(format!("--t-max {t_max} is below --t {}", a.t)));
    }
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Error::Invalid(format!("--tol must lie in (0, 1) (got {})", a.tol)));
    }
    let records: Vec<TailRecord> = match a.method {
        CliTailMethod::Dp => {
            if params.is_degenerate() {
                (a.t..=t_max)
                    .map(|t| TailRecord::from_estimate(a.p, tail_exact(params, t, a.tol).expect("p = 1")))
                    .map(|mut r| {
                        r.method = "dp_oracle";
                        r
                    })
                    .collect()
            } else {
                let dp = tail_dp_oracle(params, t_max as usize)?;
                (a.t..=t_max)
                    .map(|t| TailRecord {
                        p: a.p,
                        t,
                        tau: crate::walk::tau(t),
                        probability: dp.tail(t as usize),
                        raw_value: dp.tail(t as usize),
                        error_bound: dp.remainder_bound(),
                        method: "dp_oracle",
                    })
                    .collect()
            }
        }
        CliTailMethod::MonteCarlo => {
            let trials = ctx.trials(100_000);
            let mut survival = Survival::new(t_max as usize);
            ctx.runner.run(
                domain_of("walk/tail"),
                trials,
                |_, rng| Ok(simulate_t(params, a.safety_tol, rng)?.0),
                |_, t| survival.push(t),
            )?;
            let s = survival.survival();
            (a.t..=t_max)
                .map(|t| {
                    let f = s[t as usize];
                    TailRecord {
                        p: a.p,
                        t,
                        tau: crate::walk::tau(t),
                        probability: f,
                        raw_value: f,
                        error_bound: (f * (1.0 - f) / trials as f64).sqrt(),
                        method: "monte_carlo",
                    }
                })
                .collect()
        }
        method => {
            let mut v = Vec::new();
            for t in a.t..=t_max {
                let e = match method {
                    CliTailMethod::Exact => tail_exact(params, t, a.tol)?,
                    CliTailMethod::Mgf => tail_upper_mgf(params, t),
                    CliTailMethod::Lerch => tail_asymptotic(params, t, a.tol)?,
                    CliTailMethod::ElementaryUpper => tail_elementary_bounds(params, t)?.0,
                    CliTailMethod::ElementaryLower => tail_elementary_bounds(params, t)?.1,
                    CliTailMethod::Dp | CliTailMethod::MonteCarlo => unreachable!("handled above"),
                };
                v.push(TailRecord::from_estimate(a.p, e));
            }
            v
        }
    };
    for r in &records {
        ctx.emit(r)?;
    }
    if let (Some(first), Some(last)) = (records.first(), records.last()) {
        eprintln!(
            "walk tail ({}): p = {}, P(T >= {}) = {:.6e} .. P(T >= {}) = {:.6e}",
            first.method, a.p, first.t, first.probability, last.t, last.probability
        );
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct SimTrialRecord {
    trial_index: u64,
    t: u64,
    steps: u64,
    bottom: i64,
}

#[derive(Serialize)]
struct SimSummaryRecord {
    p: f64,
    trials: u64,
    safety_tol: f64,
    mean: f64,
    mean_std_error: f64,
    second_moment: f64,
    second_moment_std_error: f64,
    exact_mean: f64,
    exact_second_moment: f64,
}

fn walk_simulate(ctx: &mut Ctx, a: &SimulateArgs) -> Result<Outcome> {
    let params = BiasParams::new(a.p)?;
    crate::walk::escape_height(params, a.safety_tol)?;
    let trials = ctx.trials(10_000);
    let (mut first, mut second) = (Welford::default(), Welford::default());
    let mut failure = None;
    let Ctx { writer, runner, .. } = ctx;
    runner.run(
        domain_of("walk/simulate"),
        trials,
        |_, rng| simulate_t(params, a.safety_tol, rng),
        |i, (t, stats)| {
            first.push(t as f64);
            second.push((t * t) as f64);
            if a.per_trial && failure.is_none() {
                let rec = SimTrialRecord {
                    trial_index: i,
                    t,
                    steps: stats.steps,
                    bottom: stats.bottom,
                };
                if let Err(e) = writer.write(&rec) {
                    failure = Some(e);
                }
            }
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let exact = moments(params);
    let summary = SimSummaryRecord {
        p: a.p,
        trials,
        safety_tol: a.safety_tol,
        mean: first.mean(),
        mean_std_error: first.std_error(),
        second_moment: second.mean(),
        second_moment_std_error: second.std_error(),
        exact_mean: exact.mean,
        exact_second_moment: exact.second_moment,
    };
    if !a.per_trial {
        ctx.emit(&summary)?;
    }
    eprintln!(
        "walk simulate: p = {}, {} trials, mean T = {:.4} ± {:.4} (exact {:.4})",
        a.p, trials, summary.mean, summary.mean_std_error, exact.mean
    );
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct MomentsRecord {
    p: f64,
    mean: f64,
    second_moment: f64,
    variance: f64,
    dp_mean: Option<f64>,
    dp_second_moment: Option<f64>,
    mgf_s_max: Option<f64>,
    s: Option<f64>,
    mgf: Option<f64>,
}

fn walk_moments(ctx: &mut Ctx, a: &MomentsArgs) -> Result<Outcome> {
    let params = BiasParams::new(a.p)?;
    let m = moments(params);
    let (dp_mean, dp_second, s_max) = if params.is_degenerate() {
        (None, None, None)
    } else {
        let dp = tail_dp_oracle(params, 64)?;
        (
            Some(dp.expectation(|k| k)),
            Some(dp.expectation(|k| k * k)),
            Some(mgf_s_max(params)),
        )
    };
    let mgf = a.s.map(|s| crate::walk::mgf(params, s)).transpose()?;
    let rec = MomentsRecord {
        p: a.p,
        mean: m.mean,
        second_moment: m.second_moment,
        variance: m.variance,
        dp_mean,
        dp_second_moment: dp_second,
        mgf_s_max: s_max,
        s: a.s,
        mgf,
    };
    ctx.emit(&rec)?;
    eprintln!(
        "walk moments: p = {}, E[T] = {:.6}, E[T^2] = {:.6}, Var T = {:.6}",
        a.p, m.mean, m.second_moment, m.variance
    );
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct RecoverRecord {
    n: usize,
    reference_start: Option<usize>,
    reference_end: Option<usize>,
    q: Option<f64>,
    #[serde(flatten)]
    summary: OptimalSetSummary,
}

fn interval_recover(ctx: &mut Ctx, a: &RecoverArgs) -> Result<Outcome> {
    let (signal, reference, q) = match &a.input {
        Some(path) => {
            let signal = CorruptedSignal::read_text(BufReader::new(File::open(path)?))?;
            let reference = match (a.start, a.end) {
                (Some(s), Some(e)) => Some(Span::new(s, e)?),
                (None, None) => None,
                _ => return Err(Error::Invalid("--start and --end go together".into())),
            };
            (signal, reference, None)
        }
        None => {
            let (Some(n), Some(len), Some(q)) = (a.n, a.len, a.q) else {
                return Err(Error::Invalid("give --input, or all of --n, --len and --q".into()));
            };
            if a.end.is_some() {
                return Err(Error::Invalid("--end applies to --input only".into()));
            }
            let instance = match a.start {
                Some(s) => {
                    if len == 0 {
                        return Err(Error::Domain("interval length must be positive".into()));
                    }
                    PlantedInstance::new(n, Span::new(s, s + len - 1)?, q)?
                }
                None => PlantedInstance::centered(n, len, q)?,
            };
            let mut rng = super::rng::rng_stream(ctx.runner.seed(), domain_of("interval/recover"), 0);
            let signal = corrupt(&instance, &mut rng);
            (signal, Some(instance.interval()), Some(q))
        }
    };
    if let Some(path) = &a.write_signal {
        let mut f = BufWriter::new(File::create(path)?);
        signal.write_text(&mut f)?;
        f.flush()?;
    }
    let summary = optimal_set_summary(&signal, reference)?;
    eprintln!(
        "interval recover: n = {}, best score {}, {} optimal intervals{}",
        signal.len(),
        summary.max_score,
        summary.count,
        match summary.phantom_exists {
            Some(true) => ", phantom present",
            Some(false) => ", no phantom",
            None => "",
        }
    );
    ctx.emit(&RecoverRecord {
        n: signal.len(),
        reference_start: reference.map(|r| r.start),
        reference_end: reference.map(|r| r.end),
        q,
        summary,
    })?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct PhantomScanRecord {
    n: usize,
    q: f64,
    len: usize,
    trials: u64,
    phantom_frequency: f64,
    std_error: f64,
    bound_upper: f64,
    threshold_upper_len: f64,
    threshold_lower_len: f64,
}

fn phantom_scan(ctx: &mut Ctx, a: &PhantomScanArgs) -> Result<Outcome> {
    let params = BiasParams::from_noise(a.q)?;
    let th = phantom_thresholds(a.n, params)?;
    let instances = a
        .lens
        .iter()
        .map(|&len| PlantedInstance::centered(a.n, len, a.q))
        .collect::<Result<Vec<_>>>()?;
    let trials = ctx.trials(300);
    for inst in instances {
        let len = inst.interval().len();
        let reference = Some(inst.interval());
        let mut freq = Proportion::default();
        ctx.runner.run(
            domain_of(&format!("interval/phantom-scan/{len}")),
            trials,
            |_, rng| {
                let s = corrupt(&inst, rng);
                Ok(optimal_set_summary(&s, reference)?.phantom_exists == Some(true))
            },
            |_, hit| freq.push(hit),
        )?;
        let rec = PhantomScanRecord {
            n: a.n,
            q: a.q,
            len,
            trials,
            phantom_frequency: freq.frequency(),
            std_error: freq.std_error(),
            bound_upper: phantom_prob_upper(a.n, len, params)?,
            threshold_upper_len: th.upper_len,
            threshold_lower_len: th.lower_len,
        };
        eprintln!("phantom scan: |I| = {len}, frequency {:.4}", rec.phantom_frequency);
        ctx.emit(&rec)?;
    }
    Ok(Outcome::Ok)
}

fn read_sample(path: &PathBuf) -> Result<NoisySample> {
    NoisySample::read_text(BufReader::new(File::open(path)?))
}

#[derive(Serialize)]
struct LearnSummaryRecord {
    experiment: &'static str,
    m: usize,
    trials: u64,
    success_frequency: f64,
    std_error: f64,
    mean_error: f64,
}

fn learn_threshold(ctx: &mut Ctx, a: &ThresholdArgs) -> Result<Outcome> {
    let scenario = ThresholdScenario::new(a.a_star, a.eta, a.epsilon, a.delta)?;
    if let Some(path) = &a.input {
        let sol = erm_threshold(&read_sample(path)?, Some(a.a_star))?;
        eprintln!(
            "learn threshold: {} mistakes, {} optimal cells",
            sol.mistake_count,
            sol.optimal_cut_cells.len()
        );
        ctx.emit(&sol)?;
        return Ok(Outcome::Ok);
    }
    let design = match a.design {
        CliDesign::Bands => {
            let per_band = match a.per_band {
                Some(m) => m,
                None => sample_complexity_threshold(a.eta, a.delta)? as usize,
            };
            Design::Bands {
                per_band,
                outside: a.outside.unwrap_or(per_band),
            }
        }
        CliDesign::Integer => Design::Integer { per_side: a.per_side },
    };
    let m = match design {
        Design::Bands { per_band, .. } => per_band,
        Design::Integer { per_side } => per_side,
        Design::Uniform { m } => m,
    };
    let trials = ctx.trials(10_000);
    let (mut freq, mut dev) = (Proportion::default(), Welford::default());
    ctx.runner.run(
        domain_of("learn/threshold"),
        trials,
        |_, rng| run_threshold_trial(&scenario, design, rng),
        |_, t| {
            freq.push(t.success);
            dev.push(t.deviation);
        },
    )?;
    let rec = LearnSummaryRecord {
        experiment: "threshold",
        m,
        trials,
        success_frequency: freq.frequency(),
        std_error: freq.std_error(),
        mean_error: dev.mean(),
    };
    eprintln!(
        "learn threshold: {m} points per band, success {:.4} over {trials} trials (target {:.2})",
        rec.success_frequency,
        1.0 - a.delta
    );
    ctx.emit(&rec)?;
    Ok(Outcome::Ok)
}

fn learn_interval(ctx: &mut Ctx, a: &IntervalLearnArgs) -> Result<Outcome> {
    if let Some(path) = &a.input {
        let sol = erm_interval(&read_sample(path)?, Some((a.a, a.b)))?;
        eprintln!(
            "learn interval: {} mistakes, {} optimal intervals",
            sol.mistake_count, sol.optimal_count
        );
        ctx.emit(&sol)?;
        return Ok(Outcome::Ok);
    }
    let trials = ctx.trials(1000);
    let mut rng0 = super::rng::rng_stream(0, 0, 0);
    // fail fast on bad parameters before spawning trials
    run_interval_uniform((a.a, a.b), a.eta, a.epsilon, 1, &mut rng0)?;
    let (mut freq, mut err) = (Proportion::default(), Welford::default());
    ctx.runner.run(
        domain_of("learn/interval"),
        trials,
        |_, rng| run_interval_uniform((a.a, a.b), a.eta, a.epsilon, a.m, rng),
        |_, t| {
            freq.push(t.success);
            err.push(t.error);
        },
    )?;
    let rec = LearnSummaryRecord {
        experiment: "interval",
        m: a.m,
        trials,
        success_frequency: freq.frequency(),
        std_error: freq.std_error(),
        mean_error: err.mean(),
    };
    eprintln!("learn interval: m = {}, success {:.4} over {trials} trials", a.m, rec.success_frequency);
    ctx.emit(&rec)?;
    Ok(Outcome::Ok)
}

fn learn_pac(ctx: &mut Ctx, a: &PacArgs) -> Result<Outcome> {
    let scenario = ThresholdScenario::new(a.a_star, a.eta, a.epsilon, a.delta)?;
    let plan = sample_complexity_pac(a.eta, a.epsilon, a.delta)?;
    let m = a.m.unwrap_or(plan.m as usize);
    if !(0.0..=1.0).contains(&a.a_star) {
        return Err(Error::Domain(format!("target must lie in [0, 1] (got {})", a.a_star)));
    }
    let trials = ctx.trials(1000);
    let (mut freq, mut err) = (Proportion::default(), Welford::default());
    ctx.runner.run(
        domain_of("learn/pac"),
        trials,
        |_, rng| run_pac_uniform(&scenario, m, rng),
        |_, t| {
            freq.push(t.success);
            err.push(t.error);
        },
    )?;
    let rec = LearnSummaryRecord {
        experiment: "pac",
        m,
        trials,
        success_frequency: freq.frequency(),
        std_error: freq.std_error(),
        mean_error: err.mean(),
    };
    eprintln!(
        "learn pac: m = {m} ({} per band), success {:.4} over {trials} trials (target {:.2})",
        plan.per_band,
        rec.success_frequency,
        1.0 - a.delta
    );
    ctx.emit(&rec)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct RegressRecord {
    rows: usize,
    cols: usize,
    eta: f64,
    singular_values: Vec<f64>,
    error_sq_expected: f64,
    w_hat: Option<Vec<f64>>,
    empirical_error_sq: Option<f64>,
    trials: Option<u64>,
    adversarial_epsilon: f64,
    adversarial_delta: f64,
    qualifies: bool,
    c0: f64,
}

fn read_response(path: &PathBuf) -> Result<DVector<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Parse(format!("response line {}: bad number {line:?}", no + 1)))?;
        values.push(v);
    }
    Ok(DVector::from_vec(values))
}

fn regress_cmd(ctx: &mut Ctx, a: &RegressArgs) -> Result<Outcome> {
    let design = DesignMatrix::read_csv(File::open(&a.design)?)?;
    let check = adversarial_design_check(&design, a.eta, a.c0)?;
    let fit = match &a.response {
        Some(path) => Some(regress(&design, &read_response(path)?, a.eta)?),
        None => None,
    };
    let empirical = match ctx.trials {
        Some(trials) => {
            let solver = OlsSolver::new(&design)?;
            let w_true = DVector::from_element(design.cols(), 1.0);
            let mut err = Welford::default();
            ctx.runner.run(
                domain_of("regress"),
                trials,
                |_, rng| noise_trial(&solver, &w_true, a.eta, rng),
                |_, e| err.push(e),
            )?;
            Some(err.mean())
        }
        None => None,
    };
    let rec = RegressRecord {
        rows: design.rows(),
        cols: design.cols(),
        eta: a.eta,
        singular_values: design.singular_values(),
        error_sq_expected: crate::regress::expected_error(&design, a.eta)?,
        w_hat: fit.map(|f| f.w_hat),
        empirical_error_sq: empirical,
        trials: empirical.and(ctx.trials),
        adversarial_epsilon: check.epsilon,
        adversarial_delta: check.delta,
        qualifies: check.qualifies,
        c0: a.c0,
    };
    eprintln!(
        "regress: {}x{} design, E|w_hat - w|^2 = {:.6e}{}",
        rec.rows,
        rec.cols,
        rec.error_sq_expected,
        empirical.map_or(String::new(), |e| format!(", empirical {e:.6e}"))
    );
    ctx.emit(&rec)?;
    Ok(Outcome::Ok)
}

fn verify_all(ctx: &mut Ctx, seed: u64, parallelism: usize) -> Result<Outcome> {
    let cfg = VerifyConfig {
        seed,
        parallelism,
        trial_cap: ctx.trials,
    };
    let color = std::io::stderr().is_terminal();
    let mut failures = 0;
    let Ctx { writer, .. } = ctx;
    let mut write_err = None;
    run_all(&cfg, |r, elapsed| {
        let status = match (r.passed, color) {
            (true, true) => "\x1b[32mPASS\x1b[0m",
            (true, false) => "PASS",
            (false, true) => "\x1b[31mFAIL\x1b[0m",
            (false, false) => "FAIL",
        };
        eprintln!("[{status}] {:>2} {} ({:.1}s)", r.criterion, r.name, elapsed.as_secs_f64());
        failures += !r.passed as u32;
        if write_err.is_none() {
            write_err = writer.write(r).err();
        }
    })?;
    if let Some(e) = write_err {
        return Err(e);
    }
    eprintln!("verify all: {} of 14 checks passed", 14 - failures);
    Ok(if failures == 0 {
        Outcome::Ok
    } else {
        Outcome::AcceptanceFailed
    })
}
