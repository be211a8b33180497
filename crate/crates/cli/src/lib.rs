//! Orchestration layer over the [`binsim_core`] engine.
//!
//! The library half of the `binsim` binary. It owns everything that is not
//! process semantics:
//!
//! - [`config`] — the experiment configuration document (JSON) and its
//!   validation rules; command-line flags override individual fields.
//! - [`runner`] — replica fan-out (`seed` + stream index per replica),
//!   per-step summary tracking, and periodic metric sampling.
//! - [`report`] — the run report: per-replica summaries plus aggregates
//!   recomputable from them.
//! - [`output`] — serialized artifacts: samples as JSONL (fixed key order)
//!   or CSV, reports and config echoes as JSON.
//! - [`tolerances`] — every pinned constant the verification suites use:
//!   seeds, trial counts, calibrated thresholds, statistical significance
//!   levels. One place to audit.
//! - [`suites`] — the registered verification suites, each reproducing one
//!   quantitative claim about the process at desk scale and reporting a
//!   single pass/fail line.
//!
//! Determinism carries over from the engine: a configuration fully determines
//! every sample byte; replica execution order (or `--jobs` parallelism) never
//! changes output.

pub mod config;
pub mod output;
pub mod report;
pub mod runner;
pub mod suites;
pub mod tolerances;

pub use config::{ConfigError, ExperimentConfig};
pub use output::SampleRow;
pub use report::{AggregateStats, RunReport, SeedSummary, StatSummary};
pub use runner::{run_simulation, ReplicaOutput, RunError};
pub use suites::{
    available as available_suites, lower_bound_experiment, run_criterion, run_suite,
    CriterionResult, LowerBoundOutcome, SuiteReport, UnknownSuite,
};
