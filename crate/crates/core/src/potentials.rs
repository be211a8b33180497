//! Exponential potentials of the load vector and one-step drift of Γ.
//!
//! With `m` balls in `n` bins and deviations `y_i = x_i − m/n`:
//!
//! * `Φ_α = Σ_i e^{α·y_i}` weighs overloaded bins ([`phi_signed`]);
//! * `Ψ_α = Σ_i e^{−α·y_i}` weighs underloaded bins ([`psi_signed`]);
//! * `Γ_α = Φ_α + Ψ_α ≥ 2n` ([`gamma_potential`]);
//! * `Φ⁺_α = Σ_i e^{α·X⁺_i}` with `X⁺_i = max(0, x_i − ⌈m/n⌉)`, the clipped
//!   variant ([`phi_clipped`]) in which zero-excess bins contribute 1;
//! * `Π_α` assigns potential to *balls*: a ball at height `⌈m/n⌉ + h'`
//!   carries `e^α` for `h' = 1` and `e^{αh'} − e^{α(h'−1)}` for `h' ≥ 2`,
//!   zero at or below `⌈m/n⌉` ([`ball_potential_sum`]). Per bin the
//!   contributions telescope to `e^{α·X⁺_i}`, giving the identity
//!   `Π + #{i : X⁺_i = 0} = Φ⁺`.
//!
//! All potentials are recomputed from the load histogram in
//! `O(#distinct loads)` — the average moves every step, so incremental
//! maintenance of the signed variants is not possible anyway.
//!
//! [`exact_drift`] computes `E[ΔΓ | x]` for one step (insert with
//! probability β by the greedy two-choice rule, otherwise delete a ball from
//! a uniformly random non-empty bin) in closed form by grouping the
//! enumeration over the n² choice pairs and the deletion targets by distinct
//! load value. [`drift_estimate`] measures the same quantity by Monte Carlo.
//!
//! Exponents are capped at [`EXP_CAP`] (natural-log units): operations
//! return [`PotentialError::Overflow`] instead of silently producing
//! infinities that would poison drift statistics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::run_trials;
use crate::process::{step, DeletionModel};
use crate::rng::RngState;
use crate::state::BinState;

/// Largest exponent (in natural-log units) any potential evaluation may use.
pub const EXP_CAP: f64 = 700.0;

/// Potential evaluation failure.
#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("exponent {exponent:.3} exceeds the safe cap {cap}; refusing to overflow")]
    Overflow { exponent: f64, cap: f64 },
    #[error("alpha must be positive and finite (got {alpha})")]
    BadAlpha { alpha: f64 },
    #[error("insertion probability must lie in [0, 1] (got {beta})")]
    BadBeta { beta: f64 },
    #[error("epsilon must lie in (0, 3/16] (got {epsilon})")]
    BadEpsilon { epsilon: f64 },
    #[error("beta lower bound must lie in (0, 1] (got {beta_lb})")]
    BadBetaLowerBound { beta_lb: f64 },
    #[error("drift estimation needs at least 1000 trials (got {trials})")]
    TooFewTrials { trials: u64 },
}

/// Exponent and regime constants used by the potential harnesses:
/// `alpha` is the exponent parameter, `epsilon ∈ (0, 3/16]` the drift-regime
/// margin, and `beta_lb` a constant lower bound on the insertion
/// probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub alpha: f64,
    pub epsilon: f64,
    pub beta_lb: f64,
}

impl PotentialParams {
    pub fn new(alpha: f64, epsilon: f64, beta_lb: f64) -> Result<Self, PotentialError> {
        ensure_alpha(alpha)?;
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 3.0 / 16.0 {
            return Err(PotentialError::BadEpsilon { epsilon });
        }
        if !beta_lb.is_finite() || beta_lb <= 0.0 || beta_lb > 1.0 {
            return Err(PotentialError::BadBetaLowerBound { beta_lb });
        }
        Ok(Self {
            alpha,
            epsilon,
            beta_lb,
        })
    }

    /// `α ≤ β/16`: the regime in which logarithmic discrepancy bounds hold.
    #[must_use]
    pub fn fits_discrepancy_regime(&self) -> bool {
        self.alpha <= self.beta_lb / 16.0
    }

    /// `α ≤ ε·β/3`: the regime in which the Γ drift recursion contracts.
    #[must_use]
    pub fn fits_drift_regime(&self) -> bool {
        self.alpha <= self.epsilon * self.beta_lb / 3.0
    }
}

fn ensure_alpha(alpha: f64) -> Result<(), PotentialError> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(PotentialError::BadAlpha { alpha })
    }
}

fn ensure_exponent(exponent: f64) -> Result<(), PotentialError> {
    if exponent > EXP_CAP {
        Err(PotentialError::Overflow {
            exponent,
            cap: EXP_CAP,
        })
    } else {
        Ok(())
    }
}

/// Largest absolute deviation of any load from the average.
fn max_abs_deviation(state: &BinState) -> f64 {
    let avg = state.average();
    (state.max_load() as f64 - avg).max(avg - state.min_load() as f64)
}

/// Both signed potentials in one histogram pass.
fn phi_psi(state: &BinState, alpha: f64) -> Result<(f64, f64), PotentialError> {
    ensure_alpha(alpha)?;
    ensure_exponent(alpha * max_abs_deviation(state))?;
    let avg = state.average();
    let mut phi = 0.0;
    let mut psi = 0.0;
    for (&load, &count) in state.histogram() {
        let y = load as f64 - avg;
        let c = count as f64;
        phi += c * (alpha * y).exp();
        psi += c * (-alpha * y).exp();
    }
    Ok((phi, psi))
}

/// Overload potential `Φ_α = Σ_i e^{α(x_i − m/n)}`.
pub fn phi_signed(state: &BinState, alpha: f64) -> Result<f64, PotentialError> {
    phi_psi(state, alpha).map(|(phi, _)| phi)
}

/// Underload potential `Ψ_α = Σ_i e^{−α(x_i − m/n)}`.
pub fn psi_signed(state: &BinState, alpha: f64) -> Result<f64, PotentialError> {
    phi_psi(state, alpha).map(|(_, psi)| psi)
}

/// Two-sided potential `Γ_α = Φ_α + Ψ_α`; at least `2n` for any state.
pub fn gamma_potential(state: &BinState, alpha: f64) -> Result<f64, PotentialError> {
    phi_psi(state, alpha).map(|(phi, psi)| phi + psi)
}

/// Rounded-up average load `⌈m/n⌉`, the clipping height of the `X⁺` family.
fn clip_height(state: &BinState) -> u64 {
    state.total_load().div_ceil(state.n() as u64)
}

/// Clipped overload potential `Φ⁺_α = Σ_i e^{α·max(0, x_i − ⌈m/n⌉)}`;
/// bins without excess contribute `e⁰ = 1`.
pub fn phi_clipped(state: &BinState, alpha: f64) -> Result<f64, PotentialError> {
    ensure_alpha(alpha)?;
    let clip = clip_height(state);
    ensure_exponent(alpha * state.max_load().saturating_sub(clip) as f64)?;
    let mut sum = 0.0;
    let mut bins_above = 0u64;
    for (&load, &count) in state.histogram().range(clip + 1..) {
        sum += count as f64 * (alpha * (load - clip) as f64).exp();
        bins_above += count;
    }
    Ok(sum + (state.n() as u64 - bins_above) as f64)
}

/// Number of bins with no excess above `⌈m/n⌉` (`X⁺_i = 0`).
#[must_use]
pub fn zero_excess_bins(state: &BinState) -> u64 {
    let clip = clip_height(state);
    let above: u64 = state.histogram().range(clip + 1..).map(|(_, &c)| c).sum();
    state.n() as u64 - above
}

/// Ball-wise potential `Π_α`: each ball at height `⌈m/n⌉ + h'` contributes
/// `e^α` for `h' = 1` and `e^{αh'} − e^{α(h'−1)}` for `h' ≥ 2`; balls at or
/// below `⌈m/n⌉` contribute nothing.
///
/// Summed ball by ball (the route differs from [`phi_clipped`] on purpose);
/// per bin the contributions telescope to `e^{α·X⁺}`, so
/// `Π + #{zero-excess bins} = Φ⁺` exactly. Costs `O(Σ_i X⁺_i)` — it is a
/// verification instrument, not a per-step observable.
pub fn ball_potential_sum(state: &BinState, alpha: f64) -> Result<f64, PotentialError> {
    ensure_alpha(alpha)?;
    let clip = clip_height(state);
    ensure_exponent(alpha * state.max_load().saturating_sub(clip) as f64)?;
    let mut total = 0.0;
    for (&load, &count) in state.histogram().range(clip + 1..) {
        let excess = load - clip;
        let mut bin_sum = alpha.exp();
        for h in 2..=excess {
            bin_sum += (alpha * h as f64).exp() - (alpha * (h - 1) as f64).exp();
        }
        total += count as f64 * bin_sum;
    }
    Ok(total)
}

/// Exact one-step drift `E[Γ_α(x') − Γ_α(x) | x]` under: insert with
/// probability `beta_t` by the greedy two-choice rule, otherwise delete one
/// ball from a uniformly random non-empty bin (no-op on an empty system).
///
/// The n² insertion pairs are grouped by the target's load value `v`: the
/// less-loaded choice has load `v` with probability `(A_v² − A_w²)/n²`,
/// where `A_v` counts bins of load ≥ `v` and `w` is the next distinct load
/// above `v`. A deletion hits a load-`v` bin with probability
/// `c_v / #non-empty`. Both transitions shift the average by `∓1/n`, which
/// multiplies the whole of Φ and Ψ by `e^{∓α/n}` — accounted exactly.
pub fn exact_drift(state: &BinState, beta_t: f64, alpha: f64) -> Result<f64, PotentialError> {
    ensure_alpha(alpha)?;
    if !beta_t.is_finite() || !(0.0..=1.0).contains(&beta_t) {
        return Err(PotentialError::BadBeta { beta: beta_t });
    }
    // One step moves a deviation by at most 1 + 1/n < 2.
    ensure_exponent(alpha * (max_abs_deviation(state) + 2.0))?;

    let n = state.n() as f64;
    let avg = state.average();
    let (phi, psi) = phi_psi(state, alpha)?;
    let gamma = phi + psi;

    let hist: Vec<(u64, u64)> = state.histogram().iter().map(|(&v, &c)| (v, c)).collect();
    // suffix[i] = number of bins with load ≥ hist[i].0.
    let mut suffix = vec![0u64; hist.len() + 1];
    for i in (0..hist.len()).rev() {
        suffix[i] = suffix[i + 1] + hist[i].1;
    }
    debug_assert_eq!(suffix[0], state.n() as u64);

    let shrink = (-alpha / n).exp(); // average moves up by 1/n
    let grow = (alpha / n).exp(); // average moves down by 1/n
    let mut drift = 0.0;

    if beta_t > 0.0 {
        for (i, &(v, _)) in hist.iter().enumerate() {
            let a_here = suffix[i] as f64;
            let a_above = suffix[i + 1] as f64;
            let p = (a_here * a_here - a_above * a_above) / (n * n);
            let y = v as f64 - avg;
            let phi_new = phi + (alpha * (y + 1.0)).exp() - (alpha * y).exp();
            let psi_new = psi + (-alpha * (y + 1.0)).exp() - (-alpha * y).exp();
            let gamma_new = shrink * phi_new + grow * psi_new;
            drift += beta_t * p * (gamma_new - gamma);
        }
    }

    let nonempty = state.nonempty_count() as f64;
    if beta_t < 1.0 && nonempty > 0.0 {
        for &(v, c) in hist.iter().skip_while(|&&(v, _)| v == 0) {
            let p = c as f64 / nonempty;
            let y = v as f64 - avg;
            let phi_new = phi + (alpha * (y - 1.0)).exp() - (alpha * y).exp();
            let psi_new = psi + (-alpha * (y - 1.0)).exp() - (-alpha * y).exp();
            let gamma_new = grow * phi_new + shrink * psi_new;
            drift += (1.0 - beta_t) * p * (gamma_new - gamma);
        }
    }
    // A deletion drawn on an empty system changes nothing and adds 0.
    Ok(drift)
}

/// Monte-Carlo estimate of the same one-step drift as [`exact_drift`]:
/// freeze `state`, run `trials` independent single steps (greedy two-choice
/// insertion with probability `beta_t`, uniform non-empty-bin deletion
/// otherwise), and average `Γ(x') − Γ(x)`.
///
/// Returns `(mean, standard error)`. Trial `i` uses the RNG child stream
/// `rng.child(i)`, so results are independent of the number of worker
/// threads. Requires `trials ≥ 1000`.
pub fn drift_estimate(
    state: &BinState,
    beta_t: f64,
    alpha: f64,
    trials: u64,
    rng: &RngState,
) -> Result<(f64, f64), PotentialError> {
    ensure_alpha(alpha)?;
    if !beta_t.is_finite() || !(0.0..=1.0).contains(&beta_t) {
        return Err(PotentialError::BadBeta { beta: beta_t });
    }
    if trials < 1000 {
        return Err(PotentialError::TooFewTrials { trials });
    }
    ensure_exponent(alpha * (max_abs_deviation(state) + 2.0))?;
    let gamma_before = gamma_potential(state, alpha)?;

    let deltas: Vec<f64> = run_trials(trials, |i| {
        let mut trial_state = state.clone();
        let mut trial_rng = rng.child(i);
        step(&mut trial_state, beta_t, 2, DeletionModel::Bin, &mut trial_rng);
        gamma_potential(&trial_state, alpha)
            .expect("one step stays under the pre-checked exponent cap")
            - gamma_before
    });

    let count = trials as f64;
    let mean = deltas.iter().sum::<f64>() / count;
    let var = deltas.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (count - 1.0);
    Ok((mean, (var / count).sqrt()))
}
