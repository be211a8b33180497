//! Observables of a load vector: discrepancy, overload, height masses.
//!
//! Heights are 1-based: the k-th ball stacked in a bin sits at height `k`, so
//! a bin with load `v` occupies heights `1..=v`. Quantities relative to the
//! average load `m/n` are real-valued and signed.

use serde::{Deserialize, Serialize};

use crate::state::BinState;

/// Snapshot of the scalar observables of one state.
///
/// Field order is the serialization order for sample rows; it is part of the
/// output format and must stay stable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSample {
    /// Number of steps taken when the snapshot was made.
    pub step: u64,
    /// Current ball count `m`.
    pub total_load: u64,
    /// Running maximum of the ball count since the start of the run.
    pub max_total_load: u64,
    /// Smallest bin load.
    pub min_load: u64,
    /// Largest bin load.
    pub max_load: u64,
    /// Average load `m/n`.
    pub average: f64,
    /// One-sided discrepancy `max_i x_i − m/n`.
    pub disc: f64,
    /// Absolute discrepancy `max(max_i x_i − m/n, m/n − min_i x_i)`.
    pub adisc: f64,
    /// Overload `max_i x_i − m_max/n`, measured against the running maximum
    /// ball count `m_max` instead of the current one; never exceeds `disc`.
    pub overload: f64,
    /// Number of bins holding at least one ball.
    pub nonempty_bins: u64,
}

/// Snapshot all scalar observables of `state`, stamped with `step`.
#[must_use]
pub fn measure(state: &BinState, step: u64) -> MetricsSample {
    let n = state.n() as f64;
    let average = state.total_load() as f64 / n;
    let watermark_average = state.max_total_load() as f64 / n;
    let max_load = state.max_load();
    let min_load = state.min_load();
    let disc = max_load as f64 - average;
    let adisc = disc.max(average - min_load as f64);
    let overload = max_load as f64 - watermark_average;
    MetricsSample {
        step,
        total_load: state.total_load(),
        max_total_load: state.max_total_load(),
        min_load,
        max_load,
        average,
        disc,
        adisc,
        overload,
        nonempty_bins: state.nonempty_count() as u64,
    }
}

/// Number of balls sitting at height `h` or above:
/// `Σ_i max(0, x_i − h + 1)` for `h ≥ 1`, and the total ball count for
/// `h = 0` (every ball has height at least 1).
///
/// Runs in `O(#distinct loads ≥ h)` via the load histogram.
#[must_use]
pub fn balls_at_or_above(state: &BinState, h: u64) -> u64 {
    if h == 0 {
        return state.total_load();
    }
    state
        .histogram()
        .range(h..)
        .map(|(&load, &bins)| (load - h + 1) * bins)
        .sum()
}

/// Reference height `⌈m_max/n⌉ + gamma` above which bins count as
/// overloaded, built from the running maximum ball count `m_max` and a slack
/// offset `gamma`.
#[must_use]
pub fn base_height(state: &BinState, gamma: u64) -> u64 {
    state.max_total_load().div_ceil(state.n() as u64) + gamma
}
