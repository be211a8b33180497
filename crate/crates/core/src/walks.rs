//! One-dimensional random walks: barrier crossing and reflected hitting
//! times.
//!
//! Two walks back the level and meeting arguments:
//!
//! * a **biased walk** on ℤ starting at 0, stepping `+1` with probability
//!   `1/(1+r)` and `−1` with probability `r/(1+r)` (`r` is the ratio of
//!   down-step to up-step probability). The chance of reaching `+b` before
//!   `−a` is `(r^a − 1)/(r^{a+b} − 1)`;
//! * a **lazy reflecting walk** on `{0, …, D}` starting at `D`: each step
//!   holds with probability `α`; otherwise the kernel moves — interior
//!   states step `±1` with probability ½ each, state `D` steps down or holds
//!   with probability ½ each — until the walk hits 0. The expected hitting
//!   time is exactly `D(D+1)/(1−α)`.
//!
//! Simulations are exact in distribution. The lazy walk is sampled by
//! running the kernel chain and adding a geometric dwell per kernel step
//! (`P(dwell = k) = α^{k−1}(1−α)`), which reproduces the lazy chain's
//! hitting-time law while doing only `D(D+1)` expected kernel steps per
//! trial.

use thiserror::Error;

use crate::exec::run_trials;
use crate::rng::RngState;

/// Invalid walk parameters.
#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("step-probability ratio r must be positive and finite (got {r})")]
    BadRatio { r: f64 },
    #[error("ratio r = {r} is within 1e-9 of 1; the crossing formula degenerates for an unbiased walk")]
    RIsOne { r: f64 },
    #[error("barriers must be at least 1 step away (got a={a}, b={b})")]
    BadBarrier { a: u64, b: u64 },
    #[error("reflecting walk depth must be at least 1 (got {d})")]
    BadDepth { d: u64 },
    #[error("laziness must lie in [0, 1) (got {alpha})")]
    BadLaziness { alpha: f64 },
    #[error("need at least one trial")]
    NoTrials,
}

fn ensure_ratio(r: f64) -> Result<(), WalkError> {
    if !r.is_finite() || r <= 0.0 {
        return Err(WalkError::BadRatio { r });
    }
    if (r - 1.0).abs() <= 1e-9 {
        return Err(WalkError::RIsOne { r });
    }
    Ok(())
}

fn ensure_barriers(a: u64, b: u64) -> Result<(), WalkError> {
    if a == 0 || b == 0 {
        return Err(WalkError::BadBarrier { a, b });
    }
    Ok(())
}

/// Probability that the biased walk started at 0 reaches `+b` before `−a`:
/// `(r^a − 1)/(r^{a+b} − 1)`.
///
/// For `r > 1` the algebraically identical form
/// `r^{−b}·(1 − r^{−a})/(1 − r^{−(a+b)})` is used so large barriers cannot
/// overflow. The unbiased case `r = 1` is rejected (the formula degenerates;
/// its limit `a/(a+b)` is a different regime on purpose).
pub fn biased_rw_cross_prob(r: f64, a: u64, b: u64) -> Result<f64, WalkError> {
    ensure_ratio(r)?;
    ensure_barriers(a, b)?;
    let ln_r = r.ln();
    let (a, b) = (a as f64, b as f64);
    let p = if r > 1.0 {
        // Negative exponents only: e^{−b·ln r}·(1 − e^{−a·ln r})/(1 − e^{−(a+b)·ln r}).
        (-b * ln_r).exp() * (-(-a * ln_r).exp_m1()) / (-(-(a + b) * ln_r).exp_m1())
    } else {
        ((a * ln_r).exp_m1()) / (((a + b) * ln_r).exp_m1())
    };
    debug_assert!((0.0..=1.0).contains(&p), "crossing probability {p}");
    Ok(p)
}

/// Empirical fraction of `trials` in which the biased walk reaches `+b`
/// before `−a`. Trial `i` runs on the RNG child stream `rng.child(i)`, so
/// the result does not depend on worker-thread count.
pub fn simulate_biased_walk_crossing(
    r: f64,
    a: u64,
    b: u64,
    trials: u64,
    rng: &RngState,
) -> Result<f64, WalkError> {
    ensure_ratio(r)?;
    ensure_barriers(a, b)?;
    if trials == 0 {
        return Err(WalkError::NoTrials);
    }
    let p_up = 1.0 / (1.0 + r);
    let (down, up) = (-(a as i64), b as i64);
    let crossings: Vec<u64> = run_trials(trials, |i| {
        let mut rng = rng.child(i);
        let mut pos = 0i64;
        loop {
            pos += if rng.uniform_f64() < p_up { 1 } else { -1 };
            if pos == up {
                return 1;
            }
            if pos == down {
                return 0;
            }
        }
    });
    Ok(crossings.iter().sum::<u64>() as f64 / trials as f64)
}

/// Hitting times of 0 for the lazy reflecting walk on `{0, …, D}` started at
/// `D`, one entry per trial (lazy steps counted, holds included).
///
/// The mean converges to `D(D+1)/(1−lazy_alpha)`. Trial `i` runs on the RNG
/// child stream `rng.child(i)`.
pub fn reflecting_lazy_walk_hit_time(
    d: u64,
    lazy_alpha: f64,
    trials: u64,
    rng: &RngState,
) -> Result<Vec<u64>, WalkError> {
    if d == 0 {
        return Err(WalkError::BadDepth { d });
    }
    if !lazy_alpha.is_finite() || !(0.0..1.0).contains(&lazy_alpha) {
        return Err(WalkError::BadLaziness { alpha: lazy_alpha });
    }
    if trials == 0 {
        return Err(WalkError::NoTrials);
    }
    let ln_alpha = if lazy_alpha > 0.0 {
        Some(lazy_alpha.ln())
    } else {
        None
    };
    Ok(run_trials(trials, |i| {
        let mut rng = rng.child(i);
        let mut pos = d;
        let mut time = 0u64;
        while pos > 0 {
            // Dwell before this kernel move: 1 + Geometric(1−α) extra holds.
            time += match ln_alpha {
                Some(la) => 1 + ((1.0 - rng.uniform_f64()).ln() / la) as u64,
                None => 1,
            };
            let coin = rng.uniform_f64() < 0.5;
            if pos == d {
                // Reflecting top: step down or hold, each with probability ½.
                if coin {
                    pos -= 1;
                }
            } else if coin {
                pos -= 1;
            } else {
                pos += 1;
            }
        }
        time
    }))
}
