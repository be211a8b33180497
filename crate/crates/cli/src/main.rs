//! `binsim` — command-line front end for the two-choice balls-into-bins
//! engine with random deletions.
//!
//! Subcommands: `simulate` (replicated runs from a JSON configuration),
//! `couple` (two coupled copies: majorization or meeting time), `thresholds`
//! (the critical-threshold table), `walk` (closed forms vs simulation for
//! the two reference random walks), `check-cgood` (window-mean schedule
//! certification), and `suite` (registered verification suites).
//!
//! Exit codes: `0` success, `1` a check or suite failed at runtime, `2`
//! configuration or usage error.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use binsim_core::{
    build_thresholds, check_c_good, biased_rw_cross_prob, majorizes,
    reflecting_lazy_walk_hit_time, simulate_biased_walk_crossing, CGoodVerdict, CoupledPair,
    CouplingOutcome, DeletionModel, MeetingPair, RngState, Schedule,
};

use binsim_cli::tolerances::WALK_CLI_SEED;
use binsim_cli::{run_simulation, run_suite, ExperimentConfig, SampleRow, RunReport};
use binsim_cli::output::{
    write_config_json, write_pretty, write_report_json, write_samples_csv, write_samples_jsonl,
};

#[derive(Parser)]
#[command(
    name = "binsim",
    version,
    about = "Deterministic two-choice balls-into-bins simulator with random deletions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicated simulations from a JSON configuration file.
    Simulate(SimulateArgs),
    /// Drive two coupled copies: majorization check or meeting time.
    Couple(CoupleArgs),
    /// Print the critical-threshold table for a bin count.
    Thresholds(ThresholdsArgs),
    /// Compare random-walk simulations against their closed forms.
    Walk {
        #[command(subcommand)]
        walk: WalkCommand,
    },
    /// Certify that every long window of a schedule is insertion-dominant.
    #[command(name = "check-cgood")]
    CheckCgood(CheckCgoodArgs),
    /// Run registered verification suites (a name, or `all`).
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DeleteModelArg {
    /// Delete from a uniformly random non-empty bin.
    Bin,
    /// Delete a uniformly random ball.
    Ball,
}

impl From<DeleteModelArg> for DeletionModel {
    fn from(arg: DeleteModelArg) -> Self {
        match arg {
            DeleteModelArg::Bin => DeletionModel::Bin,
            DeleteModelArg::Ball => DeletionModel::Ball,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CoupleMode {
    /// Bin-deletion copy vs ball-deletion copy; check prefix-sum dominance.
    Majorization,
    /// Two displaced copies of the same process; report the meeting step.
    Meeting,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment configuration file (JSON).
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override: number of bins.
    #[arg(long)]
    n: Option<usize>,
    /// Override: number of steps per replica.
    #[arg(long)]
    steps: Option<u64>,
    /// Override: base seed (replica k runs on substream k).
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Override: number of replicas.
    #[arg(long)]
    seeds: Option<u64>,
    /// Override: constant insertion probability (replaces the schedule).
    #[arg(long, conflicts_with = "schedule")]
    beta: Option<f64>,
    /// Override: schedule file (JSON, replaces the configured schedule).
    #[arg(long, value_name = "FILE")]
    schedule: Option<PathBuf>,
    /// Override: deletion model.
    #[arg(long, value_enum)]
    delete_model: Option<DeleteModelArg>,
    /// Override: number of uniform bin choices per insertion.
    #[arg(long)]
    d: Option<usize>,
    /// Override: smoothing rate of the reported imbalance potential.
    #[arg(long)]
    alpha: Option<f64>,
    /// Override: base-height offset for level classification.
    #[arg(long)]
    gamma: Option<u64>,
    /// Override: record a sample every this many steps.
    #[arg(long)]
    sample_every: Option<u64>,
    /// Worker threads for the replica fan-out (0 or absent: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (overrides the configured output path).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write samples.csv next to samples.jsonl.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
#[command(group(
    clap::ArgGroup::new("drive").required(true).args(["beta", "schedule"])
))]
struct CoupleArgs {
    /// Number of bins in each copy.
    #[arg(long)]
    n: usize,
    /// Coupled steps to run (meeting mode: the meeting budget).
    #[arg(long)]
    steps: u64,
    /// Seed of the shared randomness.
    #[arg(long)]
    seed: u64,
    /// Constant insertion probability.
    #[arg(long)]
    beta: Option<f64>,
    /// Schedule file (JSON).
    #[arg(long, value_name = "FILE")]
    schedule: Option<PathBuf>,
    /// What the coupling checks.
    #[arg(long, value_enum)]
    mode: CoupleMode,
    /// Directory to write report.json into (also printed to stdout).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdsArgs {
    /// Number of bins.
    #[arg(long)]
    n: usize,
    /// Ceiling on the insertion probability.
    #[arg(long)]
    beta_hat: f64,
    /// Base-height offset used when levels anchor on a live state
    /// (echoed for reference; the table itself does not depend on it).
    #[arg(long)]
    gamma: u64,
}

#[derive(Subcommand)]
enum WalkCommand {
    /// Barrier-crossing probability of the ±1 walk biased downward by r.
    Cross {
        /// Down/up probability ratio (> 1 biases the walk downward).
        #[arg(long)]
        r: f64,
        /// Lower barrier distance (crossing fails at −a).
        #[arg(long)]
        a: u64,
        /// Upper barrier distance (crossing succeeds at +b).
        #[arg(long)]
        b: u64,
        /// Monte-Carlo trials.
        #[arg(long)]
        trials: u64,
    },
    /// Hitting time of 0 for the lazy reflecting walk on {0, …, D}.
    Hit {
        /// Starting height and reflecting ceiling.
        #[arg(long = "D")]
        depth: u64,
        /// Probability of holding still at interior states.
        #[arg(long)]
        lazy_alpha: f64,
        /// Monte-Carlo trials.
        #[arg(long)]
        trials: u64,
    },
}

#[derive(Args)]
struct CheckCgoodArgs {
    /// Schedule file (JSON).
    #[arg(long, value_name = "FILE")]
    schedule: PathBuf,
    /// Window scale: every window of at least ceil(c·n) steps is checked.
    #[arg(long)]
    c: f64,
    /// Dominance margin: window means must reach (1+epsilon)/2.
    #[arg(long)]
    epsilon: f64,
    /// Number of bins the schedule will drive.
    #[arg(long)]
    n: usize,
    /// Check the window [t1, t2) instead of the full schedule
    /// (required, with --t2, for unbounded schedules).
    #[arg(long, requires = "t2")]
    t1: Option<u64>,
    /// End (exclusive) of the checked window.
    #[arg(long, requires = "t1")]
    t2: Option<u64>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite selector: a registered suite name, or `all`.
    name: String,
    /// Worker threads for suite-internal fan-outs (0 or absent: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory to write report.json into (lines still go to stdout).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Couple(args) => cmd_couple(args),
        Command::Thresholds(args) => cmd_thresholds(args),
        Command::Walk { walk } => match walk {
            WalkCommand::Cross { r, a, b, trials } => cmd_walk_cross(r, a, b, trials),
            WalkCommand::Hit {
                depth,
                lazy_alpha,
                trials,
            } => cmd_walk_hit(depth, lazy_alpha, trials),
        },
        Command::CheckCgood(args) => cmd_check_cgood(args),
        Command::Suite(args) => cmd_suite(args),
    };
    ExitCode::from(code)
}

/// Report a configuration/usage problem (exit 2).
fn usage(msg: impl Display) -> u8 {
    eprintln!("error: {msg}");
    2
}

/// Report a runtime failure (exit 1).
fn failure(msg: impl Display) -> u8 {
    eprintln!("error: {msg}");
    1
}

fn load_schedule(path: &Path) -> Result<Schedule, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read schedule {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid schedule {}: {e}", path.display()))
}

/// Run `f` on a dedicated pool of `jobs` worker threads (0 or `None` keeps
/// the default: all cores when the parallel feature is on).
#[cfg(feature = "parallel")]
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, String> {
    match jobs {
        Some(j) if j > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| format!("cannot build a {j}-thread worker pool: {e}"))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<T>(jobs: Option<usize>, f: impl FnOnce() -> T) -> Result<T, String> {
    let _ = jobs; // trials run sequentially in this build
    Ok(f())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn apply_overrides(config: &mut ExperimentConfig, args: &SimulateArgs) -> Result<(), String> {
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(steps) = args.steps {
        config.steps = steps;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(seeds) = args.seeds {
        config.seeds_count = seeds;
    }
    if let Some(beta) = args.beta {
        config.schedule =
            Schedule::constant(beta).map_err(|e| format!("invalid --beta: {e}"))?;
    }
    if let Some(path) = &args.schedule {
        config.schedule = load_schedule(path)?;
    }
    if let Some(model) = args.delete_model {
        config.deletion_model = model.into();
    }
    if let Some(d) = args.d {
        config.d = d;
    }
    if let Some(alpha) = args.alpha {
        config.alpha = Some(alpha);
    }
    if let Some(gamma) = args.gamma {
        config.gamma = gamma;
    }
    if let Some(every) = args.sample_every {
        config.sample_every = every;
    }
    // --out is deliberately NOT folded into the config: the destination is
    // environment, not experiment state, and the echoed config.json must be
    // byte-identical across runs that differ only in where they write.
    Ok(())
}

fn write_run_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    report: &RunReport,
    rows: &[SampleRow],
    csv: bool,
) -> Result<(), String> {
    let ctx = |e| format!("cannot write outputs under {}: {e}", dir.display());
    fs::create_dir_all(dir).map_err(|e| ctx(e.to_string()))?;
    write_config_json(&dir.join("config.json"), config).map_err(|e| ctx(e.to_string()))?;
    write_samples_jsonl(&dir.join("samples.jsonl"), rows).map_err(|e| ctx(e.to_string()))?;
    if csv {
        write_samples_csv(&dir.join("samples.csv"), rows).map_err(|e| ctx(e.to_string()))?;
    }
    write_report_json(&dir.join("report.json"), report).map_err(|e| ctx(e.to_string()))?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> u8 {
    let text = match fs::read_to_string(&args.config) {
        Ok(text) => text,
        Err(e) => return usage(format!("cannot read config {}: {e}", args.config.display())),
    };
    let mut config: ExperimentConfig = match serde_json::from_str(&text) {
        Ok(config) => config,
        Err(e) => return usage(format!("invalid config {}: {e}", args.config.display())),
    };
    if let Err(msg) = apply_overrides(&mut config, &args) {
        return usage(msg);
    }
    if let Err(e) = config.validate() {
        return usage(e);
    }

    let outcome = match with_jobs(args.jobs, || run_simulation(&config)) {
        Ok(outcome) => outcome,
        Err(msg) => return usage(msg),
    };
    let (report, rows) = match outcome {
        Ok(pair) => pair,
        Err(e) => return failure(e),
    };

    let out_dir = args.out.clone().or_else(|| config.output_path.clone());
    match &out_dir {
        Some(dir) => {
            if let Err(msg) = write_run_outputs(dir, &config, &report, &rows, args.csv) {
                return failure(msg);
            }
            println!(
                "wrote config.json, samples.jsonl{}, report.json to {} \
                 ({} sample rows, {} replicas)",
                if args.csv { ", samples.csv" } else { "" },
                dir.display(),
                rows.len(),
                report.seeds.len()
            );
        }
        None => {
            let rendered =
                serde_json::to_string_pretty(&report).expect("reports always serialize");
            println!("{rendered}");
        }
    }
    0
}

// ---------------------------------------------------------------------------
// couple
// ---------------------------------------------------------------------------

fn couple_schedule(args: &CoupleArgs) -> Result<Schedule, String> {
    match (&args.beta, &args.schedule) {
        (Some(beta), None) => {
            Schedule::constant(*beta).map_err(|e| format!("invalid --beta: {e}"))
        }
        (None, Some(path)) => load_schedule(path),
        // clap's argument group guarantees exactly one of the two.
        _ => unreachable!("--beta and --schedule are a required exclusive group"),
    }
}

/// Balanced load that keeps the displaced copy's lowest bin non-empty.
const MEETING_BASE_LOAD: u64 = 5;

fn cmd_couple(args: CoupleArgs) -> u8 {
    if args.n < 2 {
        return usage(format!("need at least 2 bins (got {})", args.n));
    }
    if args.steps == 0 {
        return usage("need at least 1 step");
    }
    let schedule = match couple_schedule(&args) {
        Ok(schedule) => schedule,
        Err(msg) => return usage(msg),
    };
    if let Some(len) = schedule.len() {
        if len < args.steps {
            return usage(format!(
                "schedule ends after {len} steps but --steps is {}",
                args.steps
            ));
        }
    }

    let report = match args.mode {
        CoupleMode::Majorization => {
            let mut pair = CoupledPair::new(args.n, RngState::new(args.seed));
            let mut violations = 0u64;
            let mut first: Option<u64> = None;
            for t in 0..args.steps {
                let beta = schedule
                    .beta_at(t)
                    .expect("length was checked against --steps");
                pair.step(beta);
                let holds = majorizes(pair.state_x().loads(), pair.state_y().loads())
                    .expect("coupled copies share length and ball count");
                if !holds {
                    violations += 1;
                    first.get_or_insert(t + 1);
                }
            }
            json!({
                "mode": "majorization",
                "n": args.n,
                "steps": args.steps,
                "seed": args.seed,
                "start": "both copies empty; bin-deletion copy vs ball-deletion copy",
                "violations": violations,
                "first_violation": first,
                "passed": violations == 0,
            })
        }
        CoupleMode::Meeting => {
            let x = vec![MEETING_BASE_LOAD; args.n];
            let mut y = x.clone();
            y[0] += 1;
            y[args.n - 1] -= 1;
            let mut pair =
                MeetingPair::new(&x, &y, DeletionModel::Bin, RngState::new(args.seed))
                    .expect("the displaced pair shares length and ball count");
            let outcome = match pair.run_until_met(&schedule, args.steps) {
                Ok(outcome) => outcome,
                Err(e) => return failure(e),
            };
            let met_at = match outcome {
                CouplingOutcome::CoupledAt { step } => Some(step),
                CouplingOutcome::TimedOut { .. } => None,
            };
            json!({
                "mode": "meeting",
                "n": args.n,
                "budget": args.steps,
                "seed": args.seed,
                "start": format!(
                    "both copies balanced at {MEETING_BASE_LOAD} balls per bin; \
                     one ball moved in the second copy (distance 1)"
                ),
                "met_at": met_at,
                "passed": met_at.is_some(),
            })
        }
    };

    let rendered = serde_json::to_string_pretty(&report).expect("reports always serialize");
    println!("{rendered}");
    if let Some(dir) = &args.out {
        if let Err(e) =
            fs::create_dir_all(dir).map_err(|e| e.to_string()).and_then(|()| {
                write_pretty(&dir.join("report.json"), &report).map_err(|e| e.to_string())
            })
        {
            return failure(format!("cannot write report under {}: {e}", dir.display()));
        }
    }
    if report["passed"].as_bool() == Some(true) {
        0
    } else {
        1
    }
}

// ---------------------------------------------------------------------------
// thresholds
// ---------------------------------------------------------------------------

fn cmd_thresholds(args: ThresholdsArgs) -> u8 {
    let table = match build_thresholds(args.n, args.beta_hat) {
        Ok(table) => table,
        Err(e) => return usage(e),
    };
    println!(
        "critical thresholds: n = {}, beta_hat = {}, gamma = {}",
        args.n, args.beta_hat, args.gamma
    );
    println!(
        "  squared recursion ends at the crossover scale \
         sqrt((3(1-b)/(2b))·n·ln n) = {:.3}",
        table.cutoff
    );
    for (ell, alpha) in table.alphas.iter().enumerate() {
        let role = if ell == 0 {
            "base ((1-b)/(128b))·n".to_string()
        } else if ell == table.ell_star {
            "12·ln n".to_string()
        } else if ell == table.ell_star + 1 {
            "floor 24".to_string()
        } else {
            "squared step (32b/(1-b))·a²/n".to_string()
        };
        let sandwich = if ell == 0 {
            ""
        } else if table.sandwich_violations.contains(&ell) {
            "  [sandwich VIOLATED]"
        } else {
            "  [sandwich ok]"
        };
        println!("  level {ell:>2}: alpha = {alpha:>14.3}   {role}{sandwich}");
    }
    println!(
        "  levels: {} (ell_star = {}); log2 log2 n = {:.2} for reference",
        table.level_count(),
        table.ell_star,
        (args.n as f64).log2().log2()
    );
    println!(
        "  levels anchor on a live state at height ceil(watermark/n) + {} + level",
        args.gamma
    );
    if table.sandwich_violations.is_empty() {
        println!("  sandwich bounds hold at every level");
        0
    } else {
        println!(
            "  sandwich bounds fail at levels {:?} (expected only for small n)",
            table.sandwich_violations
        );
        1
    }
}

// ---------------------------------------------------------------------------
// walk
// ---------------------------------------------------------------------------

/// Trial deviations beyond this many binomial standard errors fail.
const WALK_CROSS_SE_LIMIT: f64 = 3.0;
/// Sample means further than this relative error from the closed form fail.
const WALK_HIT_MEAN_RTOL: f64 = 0.02;

fn cmd_walk_cross(r: f64, a: u64, b: u64, trials: u64) -> u8 {
    let closed = match biased_rw_cross_prob(r, a, b) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let rng = RngState::new(WALK_CLI_SEED);
    let empirical = match simulate_biased_walk_crossing(r, a, b, trials, &rng) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let se = (closed * (1.0 - closed) / trials as f64).sqrt();
    let deviation = (empirical - closed).abs() / se;
    let passed = deviation <= WALK_CROSS_SE_LIMIT;
    println!("biased walk crossing: r = {r}, a = {a}, b = {b}");
    println!("  closed form (r^a - 1)/(r^(a+b) - 1) = {closed:.10}");
    println!("  simulated                           = {empirical:.10}   ({trials} trials, seed {WALK_CLI_SEED})");
    println!(
        "  deviation {deviation:.2} SE (limit {WALK_CROSS_SE_LIMIT}) -> {}",
        if passed { "PASS" } else { "FAIL" }
    );
    u8::from(!passed)
}

fn cmd_walk_hit(depth: u64, lazy_alpha: f64, trials: u64) -> u8 {
    let rng = RngState::new(WALK_CLI_SEED);
    let times = match reflecting_lazy_walk_hit_time(depth, lazy_alpha, trials, &rng) {
        Ok(times) => times,
        Err(e) => return usage(e),
    };
    let expected = (depth * (depth + 1)) as f64 / (1.0 - lazy_alpha);
    let mean = times.iter().sum::<u64>() as f64 / times.len() as f64;
    let rel = (mean - expected).abs() / expected;
    let passed = rel <= WALK_HIT_MEAN_RTOL;
    println!("lazy reflecting walk on {{0, …, D}}: D = {depth}, lazy_alpha = {lazy_alpha}");
    println!("  closed-form mean D(D+1)/(1 - lazy_alpha) = {expected:.3}");
    println!("  simulated mean                           = {mean:.3}   ({trials} trials, seed {WALK_CLI_SEED})");
    println!(
        "  relative error {:.3}% (limit {:.0}%) -> {}",
        rel * 100.0,
        WALK_HIT_MEAN_RTOL * 100.0,
        if passed { "PASS" } else { "FAIL" }
    );
    u8::from(!passed)
}

// ---------------------------------------------------------------------------
// check-cgood
// ---------------------------------------------------------------------------

fn cmd_check_cgood(args: CheckCgoodArgs) -> u8 {
    let schedule = match load_schedule(&args.schedule) {
        Ok(schedule) => schedule,
        Err(msg) => return usage(msg),
    };
    // Either certify the full (finite) schedule, or the window [t1, t2).
    let (checked, offset, window): (Schedule, u64, serde_json::Value) =
        match (args.t1, args.t2) {
            (Some(t1), Some(t2)) => {
                if t2 <= t1 {
                    return usage(format!("--t2 ({t2}) must exceed --t1 ({t1})"));
                }
                if let Some(len) = schedule.len() {
                    if t2 > len {
                        return usage(format!(
                            "--t2 ({t2}) runs past the schedule end ({len})"
                        ));
                    }
                }
                let betas: Vec<f64> = match (t1..t2)
                    .map(|t| schedule.beta_at(t))
                    .collect::<Result<_, _>>()
                {
                    Ok(betas) => betas,
                    Err(e) => return usage(e),
                };
                let sliced = Schedule::explicit(betas)
                    .expect("values read from a valid schedule stay valid");
                (sliced, t1, json!([t1, t2]))
            }
            (None, None) => match schedule.len() {
                Some(len) => (schedule, 0, json!([0, len])),
                None => {
                    return usage(
                        "the schedule is unbounded; pass --t1 and --t2 to pick a finite window",
                    )
                }
            },
            // clap's `requires` links make a lone --t1 or --t2 unreachable.
            _ => unreachable!("--t1 and --t2 require each other"),
        };

    let verdict = match check_c_good(&checked, args.c, args.epsilon, args.n) {
        Ok(verdict) => verdict,
        Err(e) => return usage(e),
    };
    // Witness indices are reported in absolute schedule time.
    let absolute = match verdict {
        CGoodVerdict::Violated {
            a,
            b,
            mean,
            threshold,
        } => CGoodVerdict::Violated {
            a: a + offset,
            b: b + offset,
            mean,
            threshold,
        },
        other => other,
    };
    let good = !matches!(absolute, CGoodVerdict::Violated { .. });
    let report = json!({
        "schedule": args.schedule.display().to_string(),
        "c": args.c,
        "epsilon": args.epsilon,
        "n": args.n,
        "window": window,
        "verdict": absolute,
        "passed": good,
    });
    let rendered = serde_json::to_string_pretty(&report).expect("reports always serialize");
    println!("{rendered}");
    u8::from(!good)
}

// ---------------------------------------------------------------------------
// suite
// ---------------------------------------------------------------------------

fn cmd_suite(args: SuiteArgs) -> u8 {
    let outcome = match with_jobs(args.jobs, || run_suite(&args.name)) {
        Ok(outcome) => outcome,
        Err(msg) => return usage(msg),
    };
    let report = match outcome {
        Ok(report) => report,
        Err(e) => return usage(e),
    };
    for result in &report.results {
        println!("{}", result.line());
        for detail in &result.details {
            println!("    {detail}");
        }
    }
    let passed = report.results.iter().filter(|r| r.passed).count();
    println!(
        "suite {}: {passed}/{} passed in {:.1}s",
        report.selector,
        report.results.len(),
        report.wall_clock_seconds
    );
    if let Some(dir) = &args.out {
        if let Err(e) =
            fs::create_dir_all(dir).map_err(|e| e.to_string()).and_then(|()| {
                write_pretty(&dir.join("report.json"), &report).map_err(|e| e.to_string())
            })
        {
            return failure(format!("cannot write report under {}: {e}", dir.display()));
        }
    }
    u8::from(!report.passed)
}
