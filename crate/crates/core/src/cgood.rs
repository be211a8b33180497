//! Window-mean certification of insertion schedules.
//!
//! A finite schedule is *good at window scale `c`* (for `n` bins, margin
//! `ε`) when every interval `(a, b]` of at least `⌈c·n⌉` steps has average
//! insertion probability at least `θ = (1+ε)/2`. Step `k` (0-based) is the
//! step the schedule drives with `beta_at(k)`, so the interval `(a, b]`
//! averages schedule indices `a ..= b−1`.
//!
//! The check runs in `O(T)` time: with prefix sums `P[j] = Σ_{k<j} β_k`, the
//! window condition `(P[b]−P[a])/(b−a) ≥ θ` is equivalent to
//! `Q[a] ≤ Q[b]` for the drift-adjusted prefix `Q[j] = P[j] − θ·j`, so a
//! single sweep maintaining the running maximum of `Q` over eligible left
//! endpoints finds the worst witness. A violation is declared only when
//! `Q[a]` exceeds `Q[b]` by more than [`TOLERANCE`], keeping windows whose
//! mean equals `θ` up to rounding on the good side.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::Schedule;

/// Slack on the drift-adjusted prefix comparison; windows within this much
/// of the required mean count as good.
pub const TOLERANCE: f64 = 1e-12;

/// Invalid inputs to [`check_c_good`].
#[derive(Debug, Error, PartialEq)]
pub enum CGoodError {
    #[error("window scale c must be positive and finite (got {c})")]
    BadWindowScale { c: f64 },
    #[error("margin epsilon must lie in (0, 1] (got {epsilon})")]
    BadEpsilon { epsilon: f64 },
    #[error("need at least 1 bin (got {n})")]
    TooFewBins { n: usize },
    #[error("schedule is unbounded; window certification needs a finite schedule")]
    UnboundedSchedule,
}

/// Outcome of a window-mean certification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum CGoodVerdict {
    /// Every window of at least `window_len` steps has mean ≥ `threshold`.
    Good { window_len: u64, threshold: f64 },
    /// The schedule is shorter than the minimum window, so the condition
    /// holds vacuously.
    GoodVacuously { window_len: u64, schedule_len: u64 },
    /// Witness interval `(a, b]` whose mean insertion probability falls
    /// short of `threshold`.
    Violated {
        a: u64,
        b: u64,
        mean: f64,
        threshold: f64,
    },
}

impl CGoodVerdict {
    /// True for both the checked and the vacuous good outcomes.
    #[must_use]
    pub fn is_good(&self) -> bool {
        !matches!(self, CGoodVerdict::Violated { .. })
    }
}

/// Certify that every interval `(a, b]` of `schedule` with
/// `b − a ≥ ⌈c·n⌉` has mean insertion probability at least `(1+ε)/2`.
///
/// Returns the first (smallest right endpoint) violating window paired with
/// its most-violating left endpoint, or a good verdict. `O(T)` time and
/// memory in the schedule length `T`.
pub fn check_c_good(
    schedule: &Schedule,
    c: f64,
    epsilon: f64,
    n: usize,
) -> Result<CGoodVerdict, CGoodError> {
    if !c.is_finite() || c <= 0.0 {
        return Err(CGoodError::BadWindowScale { c });
    }
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 1.0 {
        return Err(CGoodError::BadEpsilon { epsilon });
    }
    if n == 0 {
        return Err(CGoodError::TooFewBins { n });
    }
    let len = schedule.len().ok_or(CGoodError::UnboundedSchedule)?;
    let theta = (1.0 + epsilon) / 2.0;
    let window = (c * n as f64).ceil() as u64;
    debug_assert!(window >= 1);
    if len < window {
        return Ok(CGoodVerdict::GoodVacuously {
            window_len: window,
            schedule_len: len,
        });
    }

    // Q[j] = P[j] − θ·j for the prefix sums P of the β sequence.
    let mut q = Vec::with_capacity(len as usize + 1);
    q.push(0.0f64);
    let mut prefix = 0.0f64;
    for k in 0..len {
        let beta = schedule
            .beta_at(k)
            .expect("finite schedule yields every index below its length");
        prefix += beta;
        q.push(prefix - theta * (k + 1) as f64);
    }

    let mut best_a = 0usize;
    for b in window..=len {
        let candidate = (b - window) as usize;
        if q[candidate] > q[best_a] {
            best_a = candidate;
        }
        if q[best_a] > q[b as usize] + TOLERANCE {
            let a = best_a as u64;
            let mean = (q[b as usize] - q[best_a]) / (b - a) as f64 + theta;
            return Ok(CGoodVerdict::Violated {
                a,
                b,
                mean,
                threshold: theta,
            });
        }
    }
    Ok(CGoodVerdict::Good {
        window_len: window,
        threshold: theta,
    })
}
