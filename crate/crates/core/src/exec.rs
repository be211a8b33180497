//! Trial/replica fan-out with a data-parallel path and a sequential twin.
//!
//! Every embarrassingly parallel loop in the crate (drift trials, walk
//! trials, replica runs) goes through [`run_trials`]. With the default
//! `parallel` feature it maps over a rayon parallel iterator; without it, it
//! is exactly [`run_trials_seq`].
//!
//! # Determinism
//!
//! Results are collected **in index order** into a `Vec`, and each trial must
//! derive its own randomness from its index (see [`crate::rng::RngState::child`]).
//! Under those two rules the output is byte-for-byte independent of thread
//! count and scheduling, so callers may reduce the returned vector
//! sequentially (e.g. sum floating-point values) and still be reproducible.

/// Runs `count` independent trials and returns their results in index order.
///
/// Parallel when the `parallel` feature is enabled (the default), sequential
/// otherwise. `f` must derive any randomness from the trial index alone.
#[cfg(feature = "parallel")]
pub fn run_trials<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Runs `count` independent trials and returns their results in index order.
///
/// Sequential build of [`run_trials`] (the `parallel` feature is disabled).
#[cfg(not(feature = "parallel"))]
pub fn run_trials<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    run_trials_seq(count, f)
}

/// Sequential twin of [`run_trials`]; always available, used by benches to
/// compare the two execution paths under identical code.
pub fn run_trials_seq<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
