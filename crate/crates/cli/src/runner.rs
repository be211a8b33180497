//! Replica fan-out and per-replica execution.
//!
//! Replica `k` of a run with master seed `s` executes on the RNG substream
//! `(s, stream = k)`, so replicas are mutually independent and each one is
//! reproducible in isolation. Replicas share nothing mutable; results are
//! merged in replica order, which makes reports and sample streams
//! independent of execution order and thread count.

use std::time::Instant;

use thiserror::Error;

use binsim_core::exec::run_trials;
use binsim_core::levels::{classify_levels, LevelStatus};
use binsim_core::metrics::{measure, MetricsSample};
use binsim_core::potentials::gamma_potential;
use binsim_core::{
    build_thresholds, step, BinState, PotentialError, RngState, ScheduleError, ThresholdError,
};

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::SampleRow;
use crate::report::{AggregateStats, RunReport, SeedSummary};

/// A simulation run failed.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("schedule query failed: {0}")]
    Schedule(#[from] ScheduleError),
    #[error("potential evaluation failed: {0}")]
    Potential(#[from] PotentialError),
    #[error("threshold construction failed: {0}")]
    Threshold(#[from] ThresholdError),
}

/// Everything one replica produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutput {
    pub summary: SeedSummary,
    pub samples: Vec<MetricsSample>,
}

/// Execute replica `replica` of `config` (assumed validated).
pub fn run_replica(config: &ExperimentConfig, replica: u64) -> Result<ReplicaOutput, RunError> {
    let thresholds = if config.thresholds_enabled {
        Some(build_thresholds(config.n, config.schedule.bounds().1)?)
    } else {
        None
    };
    let mut rng = RngState::substream(config.seed, replica);
    let mut state = BinState::new(config.n);
    let mut samples = Vec::new();
    let mut max_disc = f64::NEG_INFINITY;
    let mut max_adisc = f64::NEG_INFINITY;
    let mut max_overload = f64::NEG_INFINITY;
    let mut invalid_levels = 0u64;

    for t in 0..config.steps {
        let beta = config.schedule.beta_at(t)?;
        step(&mut state, beta, config.d, config.deletion_model, &mut rng);
        let now = t + 1;
        let sample = measure(&state, now);
        max_disc = max_disc.max(sample.disc);
        max_adisc = max_adisc.max(sample.adisc);
        max_overload = max_overload.max(sample.overload);
        if now % config.sample_every == 0 || now == config.steps {
            if let Some(thr) = &thresholds {
                invalid_levels += classify_levels(&state, thr, config.gamma)
                    .iter()
                    .filter(|(_, status)| *status == LevelStatus::Invalid)
                    .count() as u64;
            }
            samples.push(sample);
        }
    }

    let final_gamma = match config.alpha {
        Some(alpha) => Some(gamma_potential(&state, alpha)?),
        None => None,
    };
    Ok(ReplicaOutput {
        summary: SeedSummary {
            replica,
            final_step: config.steps,
            final_total_load: state.total_load(),
            max_disc,
            max_adisc,
            max_overload,
            final_gamma,
            invalid_level_count: thresholds.map(|_| invalid_levels),
            sample_count: samples.len() as u64,
        },
        samples,
    })
}

/// Execute every replica of `config`, in parallel when the `parallel`
/// feature is on, returning outputs in replica order.
pub fn run_replicas(config: &ExperimentConfig) -> Result<Vec<ReplicaOutput>, RunError> {
    run_trials(config.seeds_count, |replica| run_replica(config, replica))
        .into_iter()
        .collect()
}

/// Validate and execute `config`; returns the report and the merged sample
/// rows (replica-major order).
pub fn run_simulation(
    config: &ExperimentConfig,
) -> Result<(RunReport, Vec<SampleRow>), RunError> {
    config.validate()?;
    let started = Instant::now();
    let outputs = run_replicas(config)?;
    let wall_clock_seconds = started.elapsed().as_secs_f64();

    let mut rows = Vec::new();
    let mut seeds = Vec::with_capacity(outputs.len());
    for out in outputs {
        let replica = out.summary.replica;
        rows.extend(out.samples.iter().map(|s| SampleRow::new(replica, s)));
        seeds.push(out.summary);
    }
    let aggregate = AggregateStats::from_seeds(&seeds);
    Ok((
        RunReport {
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            wall_clock_seconds,
            seeds,
            aggregate,
        },
        rows,
    ))
}
