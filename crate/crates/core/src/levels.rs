//! Level thresholds, level classification, and one-step level-mass moves.
//!
//! A *level* `ℓ` watches the ball mass `m_ℓ` at or above the height
//! `base_height + ℓ` (see [`crate::metrics::base_height`]). Levels are
//! compared against a decreasing threshold sequence `α_0 > α_1 > …` built
//! from the bin count `n` and a ceiling `β̂` on the insertion probability:
//!
//! * `α_0 = ((1−β̂)/(128·β̂))·n`;
//! * `α_ℓ = (32·β̂/(1−β̂))·α_{ℓ−1}²/n` while the previous value still exceeds
//!   the crossover scale `√((3(1−β̂)/(2β̂))·n·ln n)`;
//! * the first index `ℓ*` whose predecessor sits at or below the crossover
//!   gets `α_{ℓ*} = 12·ln n`, and the sequence ends with `α_{ℓ*+1} = 24`.
//!
//! All logarithms are natural. The squared recursion contracts by at least a
//! factor 4 per level (`α_1/α_0` is exactly 1/4), so the build always
//! terminates. Each consecutive pair is additionally checked against the
//! sandwich `(8β̂/(1−β̂))·α_{ℓ−1}²/n ≤ α_ℓ ≤ α_{ℓ−1}/4`; indices that violate
//! it are *reported* in [`Thresholds::sandwich_violations`] — at moderate `n`
//! the tail entries routinely violate it, which is informative, not fatal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{balls_at_or_above, base_height};
use crate::state::BinState;

/// Threshold construction failure.
#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("insertion ceiling beta_hat must lie strictly inside (0, 1) (got {beta_hat})")]
    BadBetaHat { beta_hat: f64 },
    #[error("need at least 2 bins (got {n})")]
    TooFewBins { n: usize },
    #[error(
        "bin count {n} is degenerate for beta_hat {beta_hat}: base threshold \
         {alpha0:.3} does not exceed 12 ln n = {floor:.3}"
    )]
    DegenerateN {
        n: usize,
        beta_hat: f64,
        alpha0: f64,
        floor: f64,
    },
}

/// How a level's ball mass compares to its threshold `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelStatus {
    /// Mass below `α/2`: comfortably inside the allowance.
    Safe,
    /// Mass in `[α/2, α)`: inside the allowance but consuming its slack.
    Critical,
    /// Mass at or above `α`: the allowance is broken.
    Invalid,
}

impl LevelStatus {
    /// Classify a ball mass against a threshold.
    #[must_use]
    pub fn from_mass(mass: u64, alpha: f64) -> Self {
        let m = mass as f64;
        if m < alpha / 2.0 {
            LevelStatus::Safe
        } else if m < alpha {
            LevelStatus::Critical
        } else {
            LevelStatus::Invalid
        }
    }
}

/// The full threshold sequence for one `(n, β̂)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Number of bins the sequence was built for.
    pub n: usize,
    /// Ceiling on the insertion probability.
    pub beta_hat: f64,
    /// Crossover scale `√((3(1−β̂)/(2β̂))·n·ln n)` that ends the squared
    /// recursion.
    pub cutoff: f64,
    /// `α_0 ..= α_{ℓ*+1}`; always `ell_star + 2` entries, strictly positive.
    pub alphas: Vec<f64>,
    /// First index whose predecessor sits at or below `cutoff`; the index of
    /// the `12 ln n` entry.
    pub ell_star: usize,
    /// Indices `ℓ` where `α_ℓ` escapes the sandwich
    /// `(8β̂/(1−β̂))·α_{ℓ−1}²/n ≤ α_ℓ ≤ α_{ℓ−1}/4`.
    pub sandwich_violations: Vec<usize>,
}

impl Thresholds {
    /// Number of levels the sequence covers (`ℓ* + 2`).
    #[must_use]
    pub fn level_count(&self) -> usize {
        self.alphas.len()
    }
}

/// Build the threshold sequence for `n` bins under insertion ceiling
/// `beta_hat`.
///
/// Fails with [`ThresholdError::DegenerateN`] when the base threshold
/// `α_0` does not exceed `12 ln n` — below that scale the sequence has no
/// room to decrease and carries no information.
pub fn build_thresholds(n: usize, beta_hat: f64) -> Result<Thresholds, ThresholdError> {
    if !(beta_hat.is_finite() && 0.0 < beta_hat && beta_hat < 1.0) {
        return Err(ThresholdError::BadBetaHat { beta_hat });
    }
    if n < 2 {
        return Err(ThresholdError::TooFewBins { n });
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    // ratio = (1−β̂)/β̂ appears in every coefficient.
    let ratio = (1.0 - beta_hat) / beta_hat;

    let alpha0 = ratio / 128.0 * nf;
    let floor = 12.0 * ln_n;
    if alpha0 <= floor {
        return Err(ThresholdError::DegenerateN {
            n,
            beta_hat,
            alpha0,
            floor,
        });
    }
    let cutoff = (1.5 * ratio * nf * ln_n).sqrt();

    let mut alphas = vec![alpha0];
    while *alphas.last().unwrap() > cutoff {
        let prev = *alphas.last().unwrap();
        let next = (32.0 / ratio) * prev * prev / nf;
        // prev ≤ α_0 = ratio·n/128 forces next ≤ prev/4, so this terminates.
        assert!(next < prev, "threshold recursion failed to contract");
        alphas.push(next);
    }
    let ell_star = alphas.len();
    alphas.push(floor); // α_{ℓ*} = 12 ln n
    alphas.push(24.0); // α_{ℓ*+1}

    let mut sandwich_violations = Vec::new();
    for ell in 1..alphas.len() {
        let prev = alphas[ell - 1];
        let lower = (8.0 / ratio) * prev * prev / nf;
        let upper = prev / 4.0;
        let a = alphas[ell];
        // Relative slack absorbs rounding at the exact-equality boundaries.
        if a < lower * (1.0 - 1e-12) || a > upper * (1.0 + 1e-12) {
            sandwich_violations.push(ell);
        }
    }

    Ok(Thresholds {
        n,
        beta_hat,
        cutoff,
        alphas,
        ell_star,
        sandwich_violations,
    })
}

/// Number of bins with load at least `v` (all `n` bins when `v = 0`).
fn bins_at_or_above(state: &BinState, v: u64) -> u64 {
    if v == 0 {
        return state.n() as u64;
    }
    state.histogram().range(v..).map(|(_, &bins)| bins).sum()
}

/// Classify every level of `thresholds` against the current state.
///
/// Level `ℓ` watches the mass at or above height
/// `base_height(state, gamma) + ℓ`; the returned vector holds
/// `(mass, status)` per level, in level order.
#[must_use]
pub fn classify_levels(
    state: &BinState,
    thresholds: &Thresholds,
    gamma: u64,
) -> Vec<(u64, LevelStatus)> {
    let base = base_height(state, gamma);
    thresholds
        .alphas
        .iter()
        .enumerate()
        .map(|(ell, &alpha)| {
            let mass = balls_at_or_above(state, base + ell as u64);
            (mass, LevelStatus::from_mass(mass, alpha))
        })
        .collect()
}

/// One-step move probabilities of the ball mass at height `h ≥ 1`.
///
/// Returns `(p_up, p_down_lb)` where
///
/// * `p_up = β·(K/n)²` with `K` = number of bins of load ≥ `h−1` is the
///   *exact* probability that the next step inserts a ball at height ≥ `h`
///   (both choices must already reach height `h−1`);
/// * `p_down_lb = (1−β)·(#bins of load ≥ h)/n` is a lower bound on the
///   probability that a bin-model deletion removes a ball at height ≥ `h`
///   (the true denominator is the non-empty bin count, which never exceeds
///   `n`).
#[must_use]
pub fn level_step_probs(state: &BinState, h: u64, beta: f64) -> (f64, f64) {
    assert!(h >= 1, "level masses live at heights >= 1");
    let n = state.n() as u64;
    let k = bins_at_or_above(state, h - 1);
    // K² counts the ordered choice pairs landing at height ≥ h; the integer
    // square keeps the value bit-identical to a pair-enumeration count.
    let p_up = beta * ((k * k) as f64 / (n * n) as f64);
    let at_h = bins_at_or_above(state, h) as f64;
    let p_down_lb = (1.0 - beta) * at_h / n as f64;
    (p_up, p_down_lb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::balls_at_or_above;
    use crate::rng::RngState;

    #[test]
    fn frozen_sequence_for_one_million_bins() {
        let n = 1 << 20;
        let t = build_thresholds(n, 0.5).unwrap();
        assert_eq!(t.ell_star, 2);
        assert_eq!(t.alphas.len(), 4);
        assert!((t.alphas[0] - 8192.0).abs() < 1e-9);
        assert!((t.alphas[1] - 2048.0).abs() < 1e-9);
        assert!((t.alphas[2] - 12.0 * (n as f64).ln()).abs() < 1e-9);
        assert_eq!(t.alphas[3], 24.0);
        // First contraction is exactly 1/4.
        assert_eq!(t.alphas[1] / t.alphas[0], 0.25);
        assert!(t.sandwich_violations.is_empty(), "{:?}", t.sandwich_violations);
    }

    #[test]
    fn sequence_is_strictly_decreasing_until_the_tail() {
        for &(n, bh) in &[(1usize << 17, 0.5), (1 << 20, 0.7), (1 << 15, 0.3)] {
            let t = build_thresholds(n, bh).unwrap();
            for w in t.alphas.windows(2) {
                assert!(w[1] < w[0], "n={n} beta_hat={bh} alphas={:?}", t.alphas);
            }
            assert!(t.alphas[t.ell_star - 1] <= t.cutoff);
            if t.ell_star >= 2 {
                assert!(t.alphas[t.ell_star - 2] > t.cutoff);
            }
        }
    }

    #[test]
    fn moderate_sizes_report_sandwich_violations() {
        // At 2^14 bins the 12·ln(n) entry exceeds a quarter of its
        // predecessor, which the build reports rather than rejects.
        let t = build_thresholds(1 << 14, 0.5).unwrap();
        assert_eq!(t.ell_star, 1);
        assert_eq!(t.sandwich_violations, vec![1]);
    }

    #[test]
    fn degenerate_sizes_are_rejected() {
        match build_thresholds(256, 0.5) {
            Err(ThresholdError::DegenerateN { alpha0, floor, .. }) => {
                assert!(alpha0 <= floor);
            }
            other => panic!("expected degenerate rejection, got {other:?}"),
        }
        assert!(matches!(
            build_thresholds(1 << 20, 1.0),
            Err(ThresholdError::BadBetaHat { .. })
        ));
        assert!(matches!(
            build_thresholds(1, 0.5),
            Err(ThresholdError::TooFewBins { .. })
        ));
    }

    #[test]
    fn status_boundaries_are_half_open() {
        assert_eq!(LevelStatus::from_mass(4, 10.0), LevelStatus::Safe);
        assert_eq!(LevelStatus::from_mass(5, 10.0), LevelStatus::Critical);
        assert_eq!(LevelStatus::from_mass(9, 10.0), LevelStatus::Critical);
        assert_eq!(LevelStatus::from_mass(10, 10.0), LevelStatus::Invalid);
    }

    #[test]
    fn step_probs_match_a_worked_example() {
        let state = BinState::from_loads(&[3, 1, 0, 2]);
        // h = 2: both choices need load ≥ 1 (3 such bins); 2 bins reach 2.
        let (up, down) = level_step_probs(&state, 2, 0.6);
        assert!((up - 0.6 * 9.0 / 16.0).abs() < 1e-15);
        assert!((down - 0.4 * 2.0 / 4.0).abs() < 1e-15);
        // h = 1: every insertion lands at height ≥ 1.
        let (up, down) = level_step_probs(&state, 1, 0.6);
        assert!((up - 0.6).abs() < 1e-15);
        assert!((down - 0.4 * 3.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn bin_counts_agree_with_mass_differences() {
        // For h ≥ 2 the up-move count K equals m_{h−1} − m_h.
        let mut rng = RngState::new(29);
        for _ in 0..40 {
            let loads: Vec<u64> = (0..10).map(|_| rng.below(7)).collect();
            let state = BinState::from_loads(&loads);
            for h in 2..=8 {
                let k = bins_at_or_above(&state, h - 1);
                let diff = balls_at_or_above(&state, h - 1) - balls_at_or_above(&state, h);
                assert_eq!(k, diff, "loads={loads:?} h={h}");
            }
        }
    }

    #[test]
    fn classify_levels_tracks_the_watermark_base() {
        let state = BinState::from_loads(&[40, 1, 1, 1, 1, 1, 1, 3]);
        let thresholds = Thresholds {
            n: 8,
            beta_hat: 0.5,
            cutoff: 0.0,
            alphas: vec![64.0, 16.0, 4.0],
            ell_star: 1,
            sandwich_violations: vec![],
        };
        // Watermark m_max = 49, base = ceil(49/8) + 1 = 8.
        let report = classify_levels(&state, &thresholds, 1);
        assert_eq!(report.len(), 3);
        let m0 = balls_at_or_above(&state, 8);
        assert_eq!(report[0].0, m0);
        assert_eq!(m0, 33);
        assert_eq!(report[0].1, LevelStatus::Critical); // 33 ∈ [32, 64)
        assert_eq!(report[1], (32, LevelStatus::Invalid)); // 32 ≥ 16
        assert_eq!(report[2], (31, LevelStatus::Invalid));
    }
}
