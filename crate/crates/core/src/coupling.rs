//! Shared-randomness couplings, majorization, and transformation distance.
//!
//! Coupled processes are driven through *rank space*: both copies see the
//! same insert/delete coin, the same pair of uniform ranks on insertion, and
//! the same uniform `z ∈ [0,1)` on deletion. Each copy resolves those shared
//! draws against its own load vector, kept sorted non-increasingly:
//!
//! * **insertion** targets the rank `max(ρ₁, ρ₂)` of two shared uniform
//!   ranks — exactly the greedy two-choice law, since on a sorted view the
//!   higher rank of the pair is never the fuller bin;
//! * **bin-model deletion** removes a ball from the non-empty bin of rank
//!   `⌊z·n̂⌋` (`n̂` = that copy's non-empty count) — uniform over non-empty
//!   bins;
//! * **ball-model deletion** removes ball `⌊z·m⌋` of the balls numbered
//!   left-to-right across the sorted view — uniform over balls.
//!
//! Within a run of equal loads (a plateau) the copies are free to pick any
//! member: loads inside a plateau are interchangeable, so the load-vector
//! law is unchanged. To keep the vectors sorted in place, insertions bump
//! the *leftmost* plateau member and deletions drop the *rightmost*; event
//! positions refer to the sorted view.
//!
//! Two pairings are provided: [`CoupledPair`] couples the bin-deletion
//! process `X` against the ball-deletion process `Y` (the majorization
//! experiment), and [`MeetingPair`] couples two copies of the *same* process
//! from different starts, tracking their transformation distance until it
//! hits zero (the meeting-time experiment). Identity coupling makes equal
//! states evolve identically, so a met pair stays fused without
//! special-casing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::process::{DeletionModel, StepEvent};
use crate::rng::RngState;
use crate::schedule::{Schedule, ScheduleError};
use crate::state::BinState;

/// Incompatible load vectors for a pairwise operation.
#[derive(Debug, Error, PartialEq)]
pub enum DistanceError {
    #[error("load vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("load vectors hold different ball counts ({left} vs {right})")]
    TotalLoadMismatch { left: u64, right: u64 },
}

fn ensure_compatible(x: &[u64], y: &[u64]) -> Result<(), DistanceError> {
    if x.len() != y.len() {
        return Err(DistanceError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let (mx, my) = (x.iter().sum::<u64>(), y.iter().sum::<u64>());
    if mx != my {
        return Err(DistanceError::TotalLoadMismatch {
            left: mx,
            right: my,
        });
    }
    Ok(())
}

fn sorted_desc(v: &[u64]) -> Vec<u64> {
    let mut s = v.to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s
}

/// Whether `x` majorizes `y`: on the non-increasingly sorted vectors, every
/// prefix sum of `x` is at least the matching prefix sum of `y`. Requires
/// equal lengths and equal totals.
pub fn majorizes(x: &[u64], y: &[u64]) -> Result<bool, DistanceError> {
    ensure_compatible(x, y)?;
    let (xs, ys) = (sorted_desc(x), sorted_desc(y));
    let (mut px, mut py) = (0u64, 0u64);
    for (a, b) in xs.iter().zip(ys.iter()) {
        px += a;
        py += b;
        if px < py {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimum number of single-ball moves turning one vector into the other,
/// compared in sorted order: `Σ_i max(0, x_i − y_i)`, which equals half the
/// `ℓ₁` distance of the sorted vectors. Requires equal lengths and totals.
pub fn transformation_distance(x: &[u64], y: &[u64]) -> Result<u64, DistanceError> {
    ensure_compatible(x, y)?;
    let (xs, ys) = (sorted_desc(x), sorted_desc(y));
    Ok(xs
        .iter()
        .zip(ys.iter())
        .map(|(&a, &b)| a.saturating_sub(b))
        .sum())
}

/// Sorted position receiving a shared-rank insertion: the leftmost member of
/// the plateau containing `rank`, so the vector stays sorted.
fn insert_position(state: &BinState, rank: usize) -> usize {
    let rank = rank as u64;
    let mut bins_above = 0u64;
    for (_, &count) in state.histogram().iter().rev() {
        if rank < bins_above + count {
            return bins_above as usize;
        }
        bins_above += count;
    }
    unreachable!("rank {rank} outside the bin range");
}

/// Sorted position losing a ball under a bin-model deletion driven by `z`:
/// rank `⌊z·n̂⌋` over non-empty bins, resolved to the rightmost member of
/// its plateau. Caller guarantees at least one ball.
fn bin_model_position(state: &BinState, z: f64) -> usize {
    let nonempty = state.nonempty_count() as u64;
    debug_assert!(nonempty > 0);
    let rank = ((z * nonempty as f64) as u64).min(nonempty - 1);
    let mut bins_above = 0u64;
    for (_, &count) in state.histogram().range(1..).rev() {
        if rank < bins_above + count {
            return (bins_above + count - 1) as usize;
        }
        bins_above += count;
    }
    unreachable!("rank {rank} outside the non-empty range");
}

/// Sorted position losing a ball under a ball-model deletion driven by `z`:
/// ball `⌊z·m⌋` of the balls numbered left-to-right across the sorted view,
/// resolved to the rightmost member of its bin's plateau. Caller guarantees
/// at least one ball.
fn ball_model_position(state: &BinState, z: f64) -> usize {
    let m = state.total_load();
    debug_assert!(m > 0);
    let ball = ((z * m as f64) as u64).min(m - 1);
    let mut balls_above = 0u64;
    let mut bins_above = 0u64;
    for (&load, &count) in state.histogram().range(1..).rev() {
        let span = load * count;
        if ball < balls_above + span {
            return (bins_above + count - 1) as usize;
        }
        balls_above += span;
        bins_above += count;
    }
    unreachable!("ball {ball} outside the load range");
}

fn deletion_position(state: &BinState, model: DeletionModel, z: f64) -> usize {
    match model {
        DeletionModel::Bin => bin_model_position(state, z),
        DeletionModel::Ball => ball_model_position(state, z),
    }
}

fn sorted_state(loads: &[u64]) -> BinState {
    BinState::from_loads(&sorted_desc(loads))
}

#[cfg(debug_assertions)]
fn assert_sorted(state: &BinState) {
    debug_assert!(
        state.loads().windows(2).all(|w| w[0] >= w[1]),
        "coupled state lost its sorted-order invariant"
    );
}

#[cfg(not(debug_assertions))]
fn assert_sorted(_state: &BinState) {}

/// Bin-deletion process `X` coupled against ball-deletion process `Y`
/// through shared coin, ranks, and deletion draw `z`. Both sides always hold
/// the same number of balls, and `X` should majorize `Y` step after step
/// when both start equal.
#[derive(Debug, Clone)]
pub struct CoupledPair {
    x: BinState,
    y: BinState,
    rng: RngState,
    step_count: u64,
}

impl CoupledPair {
    /// Couple two empty systems of `n` bins.
    #[must_use]
    pub fn new(n: usize, rng: RngState) -> Self {
        Self {
            x: BinState::new(n),
            y: BinState::new(n),
            rng,
            step_count: 0,
        }
    }

    /// Couple two explicit starts; they must agree in length and ball count.
    /// Loads are re-sorted, so event positions refer to the sorted views.
    pub fn from_states(x: &[u64], y: &[u64], rng: RngState) -> Result<Self, DistanceError> {
        ensure_compatible(x, y)?;
        Ok(Self {
            x: sorted_state(x),
            y: sorted_state(y),
            rng,
            step_count: 0,
        })
    }

    /// The bin-deletion side.
    #[must_use]
    pub fn state_x(&self) -> &BinState {
        &self.x
    }

    /// The ball-deletion side.
    #[must_use]
    pub fn state_y(&self) -> &BinState {
        &self.y
    }

    /// Coupled steps taken so far.
    #[must_use]
    pub fn steps(&self) -> u64 {
        self.step_count
    }

    /// Advance both processes by one shared-randomness step; insert with
    /// probability `beta`, otherwise delete (a paired no-op on empty
    /// systems). Returns the two events in `(X, Y)` order.
    pub fn step(&mut self, beta: f64) -> (StepEvent, StepEvent) {
        debug_assert!((0.0..=1.0).contains(&beta));
        self.step_count += 1;
        let events = if self.rng.uniform_f64() < beta {
            let n = self.x.n() as u64;
            let r1 = self.rng.below(n) as usize;
            let r2 = self.rng.below(n) as usize;
            let rank = r1.max(r2);
            let px = insert_position(&self.x, rank);
            let py = insert_position(&self.y, rank);
            self.x.force_insert(px);
            self.y.force_insert(py);
            (
                StepEvent::Insert {
                    bin: px,
                    choices: vec![r1, r2],
                },
                StepEvent::Insert {
                    bin: py,
                    choices: vec![r1, r2],
                },
            )
        } else if self.x.total_load() == 0 {
            (StepEvent::Noop, StepEvent::Noop)
        } else {
            let z = self.rng.uniform_f64();
            let px = bin_model_position(&self.x, z);
            let py = ball_model_position(&self.y, z);
            self.x.force_delete(px);
            self.y.force_delete(py);
            (StepEvent::DeleteBin { bin: px }, StepEvent::DeleteBall { bin: py })
        };
        debug_assert_eq!(self.x.total_load(), self.y.total_load());
        assert_sorted(&self.x);
        assert_sorted(&self.y);
        events
    }
}

/// Result of running a [`MeetingPair`] until its distance reaches zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum CouplingOutcome {
    /// The copies met (distance zero) after `step` coupled steps.
    CoupledAt { step: u64 },
    /// The copies were still apart when the step budget ran out.
    TimedOut { max_steps: u64 },
}

/// Two copies of the *same* process (one deletion model) coupled through
/// shared randomness from different starts, with their transformation
/// distance maintained incrementally. Once the distance hits zero the copies
/// are identical and evolve in lockstep forever.
#[derive(Debug, Clone)]
pub struct MeetingPair {
    x: BinState,
    y: BinState,
    model: DeletionModel,
    rng: RngState,
    step_count: u64,
    delta: u64,
}

impl MeetingPair {
    /// Couple two starts with equal length and ball count under `model`.
    /// Loads are re-sorted; event positions refer to the sorted views.
    pub fn new(
        x: &[u64],
        y: &[u64],
        model: DeletionModel,
        rng: RngState,
    ) -> Result<Self, DistanceError> {
        let delta = transformation_distance(x, y)?;
        Ok(Self {
            x: sorted_state(x),
            y: sorted_state(y),
            model,
            rng,
            step_count: 0,
            delta,
        })
    }

    /// Step budget `4·n³·ln³(n)` — four times the leading term of the
    /// expected meeting-time scale.
    #[must_use]
    pub fn default_timeout(n: usize) -> u64 {
        let nf = n as f64;
        (4.0 * nf * nf * nf * nf.ln().powi(3)).ceil() as u64
    }

    /// Current transformation distance between the copies.
    #[must_use]
    pub fn delta(&self) -> u64 {
        self.delta
    }

    #[must_use]
    pub fn state_x(&self) -> &BinState {
        &self.x
    }

    #[must_use]
    pub fn state_y(&self) -> &BinState {
        &self.y
    }

    /// Coupled steps taken so far.
    #[must_use]
    pub fn steps(&self) -> u64 {
        self.step_count
    }

    /// Advance both copies by one shared-randomness step and update the
    /// distance from the (at most two) changed sorted positions.
    pub fn step(&mut self, beta: f64) -> (StepEvent, StepEvent) {
        debug_assert!((0.0..=1.0).contains(&beta));
        self.step_count += 1;
        let events = if self.rng.uniform_f64() < beta {
            let n = self.x.n() as u64;
            let r1 = self.rng.below(n) as usize;
            let r2 = self.rng.below(n) as usize;
            let rank = r1.max(r2);
            let px = insert_position(&self.x, rank);
            let py = insert_position(&self.y, rank);
            let contrib_before = self.contribution(px) + self.contribution_other(py, px);
            self.x.force_insert(px);
            self.y.force_insert(py);
            let contrib_after = self.contribution(px) + self.contribution_other(py, px);
            self.apply_delta(contrib_before, contrib_after);
            (
                StepEvent::Insert {
                    bin: px,
                    choices: vec![r1, r2],
                },
                StepEvent::Insert {
                    bin: py,
                    choices: vec![r1, r2],
                },
            )
        } else if self.x.total_load() == 0 {
            (StepEvent::Noop, StepEvent::Noop)
        } else {
            let z = self.rng.uniform_f64();
            let px = deletion_position(&self.x, self.model, z);
            let py = deletion_position(&self.y, self.model, z);
            let contrib_before = self.contribution(px) + self.contribution_other(py, px);
            self.x.force_delete(px);
            self.y.force_delete(py);
            let contrib_after = self.contribution(px) + self.contribution_other(py, px);
            self.apply_delta(contrib_before, contrib_after);
            let event = |bin| match self.model {
                DeletionModel::Bin => StepEvent::DeleteBin { bin },
                DeletionModel::Ball => StepEvent::DeleteBall { bin },
            };
            (event(px), event(py))
        };
        debug_assert_eq!(self.x.total_load(), self.y.total_load());
        assert_sorted(&self.x);
        assert_sorted(&self.y);
        events
    }

    /// Distance contribution of sorted position `p`.
    fn contribution(&self, p: usize) -> u64 {
        self.x.load(p).saturating_sub(self.y.load(p))
    }

    /// Contribution of `p`, counted only if it was not already counted as
    /// `counted` (the two changed positions may coincide).
    fn contribution_other(&self, p: usize, counted: usize) -> u64 {
        if p == counted {
            0
        } else {
            self.contribution(p)
        }
    }

    fn apply_delta(&mut self, before: u64, after: u64) {
        self.delta = self.delta + after - before;
    }

    /// Run until the copies meet or `max_steps` coupled steps elapse,
    /// reading `β(t)` from `schedule`. Already-met pairs report their
    /// current step immediately.
    pub fn run_until_met(
        &mut self,
        schedule: &Schedule,
        max_steps: u64,
    ) -> Result<CouplingOutcome, ScheduleError> {
        if self.delta == 0 {
            return Ok(CouplingOutcome::CoupledAt {
                step: self.step_count,
            });
        }
        while self.step_count < max_steps {
            let beta = schedule.beta_at(self.step_count)?;
            self.step(beta);
            if self.delta == 0 {
                return Ok(CouplingOutcome::CoupledAt {
                    step: self.step_count,
                });
            }
        }
        Ok(CouplingOutcome::TimedOut { max_steps })
    }
}
