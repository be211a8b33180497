//! One-step dynamics: coin flip, greedy d-choice insertion, random deletion.
//!
//! A step of the process advances the system by exactly one event:
//!
//! 1. draw one uniform coin `u ∈ [0,1)`; the step is an **insertion** when
//!    `u < β` and a **deletion** otherwise;
//! 2. an insertion draws `d` bin indices uniformly at random *with
//!    replacement* and places the ball in the least-loaded choice (the
//!    earliest drawn choice wins ties — equally loaded bins are
//!    interchangeable, so the tie rule does not affect the law of the load
//!    vector);
//! 3. a deletion removes one ball according to the [`DeletionModel`]:
//!    * [`DeletionModel::Bin`] picks a uniformly random **non-empty bin** and
//!      removes one of its balls;
//!    * [`DeletionModel::Ball`] picks a uniformly random **ball** (bins are
//!      hit proportionally to their load) and removes it.
//!
//! A deletion from an empty system is a [`StepEvent::Noop`].
//!
//! # Randomness budget (determinism contract)
//!
//! Each step consumes, in order: one `uniform_f64` coin, then either `d`
//! calls of `below(n)` (insertion) or one call of `below(·)` (deletion with
//! at least one ball present) or nothing further (empty-system deletion).
//! Replaying the same seed therefore reproduces the same event sequence.

use serde::{Deserialize, Serialize};

use crate::rng::RngState;
use crate::state::BinState;

/// Which object a deletion step removes uniformly at random.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeletionModel {
    /// Pick a uniformly random non-empty bin, remove one of its balls.
    Bin,
    /// Pick a uniformly random ball (load-proportional bin choice), remove it.
    Ball,
}

/// What a single step did to the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepEvent {
    /// A ball was placed into `bin`, the least-loaded of the drawn `choices`
    /// (earliest choice wins ties). `choices` preserves draw order.
    Insert { bin: usize, choices: Vec<usize> },
    /// One ball was removed from the uniformly chosen non-empty `bin`.
    DeleteBin { bin: usize },
    /// A uniformly chosen ball was removed; it lived in `bin`.
    DeleteBall { bin: usize },
    /// A deletion step hit an empty system; nothing changed.
    Noop,
}

/// Place one ball greedily: draw `d` uniform bin choices with replacement and
/// insert into the least-loaded one (earliest drawn choice wins ties).
///
/// Consumes exactly `d` calls of `below(n)`. Panics if `d == 0`.
pub fn greedy_insert(state: &mut BinState, d: usize, rng: &mut RngState) -> StepEvent {
    assert!(d >= 1, "greedy insertion needs at least one choice");
    let n = state.n() as u64;
    let mut choices = Vec::with_capacity(d);
    let mut best = rng.below(n) as usize;
    choices.push(best);
    for _ in 1..d {
        let c = rng.below(n) as usize;
        choices.push(c);
        if state.load(c) < state.load(best) {
            best = c;
        }
    }
    state.force_insert(best);
    StepEvent::Insert { bin: best, choices }
}

/// Remove one ball from a uniformly random non-empty bin, or report
/// [`StepEvent::Noop`] when every bin is empty.
///
/// Consumes one `below(#non-empty)` call, or nothing on an empty system.
pub fn delete_random_bin(state: &mut BinState, rng: &mut RngState) -> StepEvent {
    match state.sample_nonempty_uniform(rng) {
        Some(bin) => {
            state.force_delete(bin);
            StepEvent::DeleteBin { bin }
        }
        None => StepEvent::Noop,
    }
}

/// Remove one uniformly random ball (each bin is hit with probability
/// proportional to its load), or report [`StepEvent::Noop`] when the system
/// holds no balls.
///
/// Consumes one `below(total load)` call, or nothing on an empty system.
pub fn delete_random_ball(state: &mut BinState, rng: &mut RngState) -> StepEvent {
    match state.sample_ball_weighted(rng) {
        Some(bin) => {
            state.force_delete(bin);
            StepEvent::DeleteBall { bin }
        }
        None => StepEvent::Noop,
    }
}

/// Advance the system by one step: insert with probability `beta`, otherwise
/// delete under `model`. See the module docs for the exact randomness budget.
pub fn step(
    state: &mut BinState,
    beta: f64,
    d: usize,
    model: DeletionModel,
    rng: &mut RngState,
) -> StepEvent {
    debug_assert!(
        (0.0..=1.0).contains(&beta),
        "insertion probability {beta} outside [0, 1]"
    );
    if rng.uniform_f64() < beta {
        greedy_insert(state, d, rng)
    } else {
        match model {
            DeletionModel::Bin => delete_random_bin(state, rng),
            DeletionModel::Ball => delete_random_ball(state, rng),
        }
    }
}

/// Probability that a greedy `d`-choice insertion lands on the bin of rank
/// `i` (1-based, bins viewed in non-increasing load order with distinct
/// ranks): `p_i = (i/n)^d − ((i−1)/n)^d`.
///
/// The maximum of `d` independent uniform ranks has exactly this law; ties
/// between equal loads redistribute mass only among interchangeable bins.
/// Entries sum to 1. For `n = 4, d = 2` this is `[1, 3, 5, 7] / 16`.
#[must_use]
pub fn rank_insertion_probs(n: usize, d: usize) -> Vec<f64> {
    assert!(n >= 1 && d >= 1);
    let nf = n as f64;
    (1..=n)
        .map(|i| (i as f64 / nf).powi(d as i32) - ((i - 1) as f64 / nf).powi(d as i32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_probs_match_small_case_and_sum_to_one() {
        let p = rank_insertion_probs(4, 2);
        let expect = [1.0 / 16.0, 3.0 / 16.0, 5.0 / 16.0, 7.0 / 16.0];
        for (a, b) in p.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        for &(n, d) in &[(1, 1), (7, 2), (16, 3), (100, 5)] {
            let sum: f64 = rank_insertion_probs(n, d).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "n={n} d={d} sum={sum}");
        }
    }

    #[test]
    fn insertion_picks_least_loaded_choice() {
        let mut rng = RngState::new(11);
        let mut state = BinState::from_loads(&[9, 0, 4, 7, 1, 3, 0, 2]);
        for _ in 0..500 {
            let before: Vec<u64> = state.loads().to_vec();
            match greedy_insert(&mut state, 2, &mut rng) {
                StepEvent::Insert { bin, choices } => {
                    assert_eq!(choices.len(), 2);
                    assert!(choices.contains(&bin));
                    let min = choices.iter().map(|&c| before[c]).min().unwrap();
                    assert_eq!(before[bin], min);
                    assert_eq!(state.load(bin), before[bin] + 1);
                }
                other => panic!("unexpected event {other:?}"),
            }
        }
    }

    #[test]
    fn ties_go_to_the_earliest_choice() {
        let mut rng = RngState::new(3);
        let mut state = BinState::from_loads(&[5, 5, 5, 5]);
        let event = greedy_insert(&mut state, 3, &mut rng);
        match event {
            StepEvent::Insert { bin, choices } => assert_eq!(bin, choices[0]),
            other => panic!("unexpected event {other:?}"),
        }
    }

    #[test]
    fn deletions_on_empty_system_are_noops() {
        let mut rng = RngState::new(5);
        let mut state = BinState::new(6);
        assert_eq!(delete_random_bin(&mut state, &mut rng), StepEvent::Noop);
        assert_eq!(delete_random_ball(&mut state, &mut rng), StepEvent::Noop);
        assert_eq!(state.total_load(), 0);
        let event = step(&mut state, 0.0, 2, DeletionModel::Bin, &mut rng);
        assert_eq!(event, StepEvent::Noop);
    }

    #[test]
    fn bin_deletion_only_hits_nonempty_bins() {
        let mut rng = RngState::new(7);
        let mut state = BinState::from_loads(&[0, 3, 0, 1, 0, 2]);
        for _ in 0..200 {
            // Top the bins back up so the support stays {1, 3, 5}.
            for (bin, target) in [(1usize, 3u64), (3, 1), (5, 2)] {
                while state.load(bin) < target {
                    state.force_insert(bin);
                }
            }
            match delete_random_bin(&mut state, &mut rng) {
                StepEvent::DeleteBin { bin } => assert!([1, 3, 5].contains(&bin)),
                other => panic!("unexpected event {other:?}"),
            }
        }
    }

    #[test]
    fn ball_deletion_is_load_proportional() {
        // Loads [30, 10]: bin 0 should absorb about 3/4 of deletions.
        let mut rng = RngState::new(41);
        let trials = 40_000;
        let mut hits0 = 0u64;
        for _ in 0..trials {
            let mut state = BinState::from_loads(&[30, 10]);
            match delete_random_ball(&mut state, &mut rng) {
                StepEvent::DeleteBall { bin } => {
                    if bin == 0 {
                        hits0 += 1;
                    }
                }
                other => panic!("unexpected event {other:?}"),
            }
        }
        let p = hits0 as f64 / trials as f64;
        let se = (0.75 * 0.25 / trials as f64).sqrt();
        assert!((p - 0.75).abs() < 4.0 * se, "p={p}");
    }

    #[test]
    fn steps_conserve_ball_count_arithmetic() {
        let mut rng = RngState::new(99);
        let mut state = BinState::new(16);
        let mut expected: i64 = 0;
        for t in 0..5_000 {
            let beta = if t % 3 == 0 { 0.8 } else { 0.3 };
            match step(&mut state, beta, 2, DeletionModel::Ball, &mut rng) {
                StepEvent::Insert { .. } => expected += 1,
                StepEvent::DeleteBall { .. } | StepEvent::DeleteBin { .. } => expected -= 1,
                StepEvent::Noop => {}
            }
            assert_eq!(state.total_load() as i64, expected);
        }
        state.check_coherence().unwrap();
    }

    #[test]
    fn replaying_a_seed_reproduces_the_event_sequence() {
        let run = |seed: u64| {
            let mut rng = RngState::new(seed);
            let mut state = BinState::new(12);
            (0..2_000)
                .map(|_| step(&mut state, 0.55, 2, DeletionModel::Bin, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(1234), run(1234));
        assert_ne!(run(1234), run(1235));
    }
}
