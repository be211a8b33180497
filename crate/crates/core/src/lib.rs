//! Deterministic simulation engine for the two-choice balls-into-bins process
//! with random deletions.
//!
//! # The process
//!
//! `n` bins hold integer loads. At every discrete step `t` a coin decides:
//!
//! ```text
//! with probability β(t):      insert — sample d bins uniformly at random
//!                             (with replacement) and place one ball in a
//!                             least-loaded sampled bin
//! with probability 1 − β(t):  delete — remove one ball, either from a
//!                             uniformly random non-empty bin (`Bin` model)
//!                             or a uniformly random ball (`Ball` model)
//! ```
//!
//! A deletion drawn on an empty system is a no-op, so trajectories are
//! well-defined for arbitrary schedules.
//!
//! # Module map
//!
//! - [`rng`] — the seedable generator and substream derivation; every random
//!   decision in the crate flows through it.
//! - [`schedule`] — insertion-probability sequences β(t) with declared bounds.
//! - [`state`] — the live configuration ([`BinState`]): loads plus the
//!   incrementally maintained histogram, non-empty index, and prefix tree.
//! - [`process`] — single-step semantics and the rank insertion law.
//! - [`metrics`] — discrepancy/overload statistics and balls-above-height.
//! - [`levels`] — critical-threshold recursion, level classification, and
//!   level transition probabilities.
//! - [`cgood`] — sliding-window check that a schedule keeps every long
//!   subinterval insertion-dominant.
//! - [`potentials`] — exponential imbalance potentials, the per-ball potential
//!   identity, and one-step drift estimation with an exact enumeration twin.
//! - [`coupling`] — shared-randomness couplings on rank-sorted views:
//!   majorization experiment, transformation distance, meeting times.
//! - [`walks`] — biased-walk crossing probabilities and lazy reflecting-walk
//!   hitting times, simulated and closed-form.
//! - [`exec`] — trial fan-out helper with a rayon path (feature `parallel`,
//!   default on) and a sequential twin.
//!
//! # Determinism contract
//!
//! Identical `(seed, schedule, n, deletion model, d)` produce bit-identical
//! random streams, event logs, and trajectories. Parallel fan-outs assign each
//! trial/replica an independently derived substream and merge results in index
//! order, so outputs are independent of thread count.

pub mod cgood;
pub mod coupling;
pub mod exec;
pub mod levels;
pub mod metrics;
pub mod potentials;
pub mod process;
pub mod rng;
pub mod schedule;
pub mod state;
pub mod walks;

pub use cgood::{check_c_good, CGoodError, CGoodVerdict};
pub use coupling::{
    majorizes, transformation_distance, CoupledPair, CouplingOutcome, DistanceError, MeetingPair,
};
pub use levels::{
    build_thresholds, classify_levels, level_step_probs, LevelStatus, ThresholdError, Thresholds,
};
pub use metrics::{balls_at_or_above, base_height, measure, MetricsSample};
pub use potentials::{
    ball_potential_sum, drift_estimate, exact_drift, gamma_potential, phi_clipped, phi_signed,
    psi_signed, zero_excess_bins, PotentialError, PotentialParams,
};
pub use process::{
    delete_random_bin, delete_random_ball, greedy_insert, rank_insertion_probs, step,
    DeletionModel, StepEvent,
};
pub use rng::RngState;
pub use schedule::{Schedule, ScheduleError, ScheduleKind, Segment};
pub use state::BinState;
pub use walks::{
    biased_rw_cross_prob, reflecting_lazy_walk_hit_time, simulate_biased_walk_crossing, WalkError,
};
