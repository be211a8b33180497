//! Insertion-probability sequences β(t) with declared bounds.
//!
//! A [`Schedule`] answers "what is the insertion probability of the step that
//! advances time t → t+1?" via [`Schedule::beta_at`]`(t)`, and declares its
//! infimum/supremum `(β_lo, β_hi)` over the whole run. Every emitted value
//! lies inside the declared bounds, which in turn lie inside `[0, 1]` —
//! enforced at construction, so downstream consumers (threshold builders,
//! potential harnesses) can trust `bounds()` without scanning.
//!
//! Finite kinds (`Explicit`, `PiecewiseConstant`, `DeletionBurst`) are
//! consumed index-exactly: querying at or past the end is an error, never a
//! silent extrapolation.
//!
//! # Serialized form
//!
//! Schedules serialize as their kind only (internally tagged JSON); bounds and
//! length are re-derived on deserialization, so a round-trip re-validates and
//! cannot smuggle inconsistent bounds:
//!
//! ```text
//! {"kind":"Constant","beta":0.6}
//! {"kind":"Explicit","betas":[0.9,0.1]}
//! {"kind":"Sinusoid","mid":0.6,"amplitude":0.2,"period":1000}
//! {"kind":"PiecewiseConstant","segments":[{"steps":10,"beta":0.9}]}
//! {"kind":"DeletionBurst","beta_pre":1.0,"t_switch":100,"epsilon":0.1,"burst_len":192}
//! ```

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Schedule construction or query failure.
#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("insertion probability {value} at {context} is outside [0, 1]")]
    ProbabilityOutOfRange { value: f64, context: String },
    #[error("schedule has no steps")]
    Empty,
    #[error("sinusoid needs period >= 1 (got {period})")]
    BadPeriod { period: u64 },
    #[error("sinusoid amplitude must be non-negative and finite (got {amplitude})")]
    BadAmplitude { amplitude: f64 },
    #[error("piecewise segment {index} has zero steps")]
    EmptySegment { index: usize },
    #[error("deletion burst needs epsilon in (0, 1/2) (got {epsilon})")]
    BadEpsilon { epsilon: f64 },
    #[error("schedule ends at step {len} but step {t} was queried")]
    PastEnd { t: u64, len: u64 },
}

/// One constant-β stretch of a piecewise schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Number of steps the segment lasts. Must be >= 1.
    pub steps: u64,
    /// Insertion probability during the segment.
    pub beta: f64,
}

/// The shape of a schedule; see [`Schedule`] for the validated wrapper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ScheduleKind {
    /// β(t) = `beta` forever.
    Constant { beta: f64 },
    /// Constant stretches, consumed in order; finite.
    PiecewiseConstant { segments: Vec<Segment> },
    /// β(t) = `mid` + `amplitude`·sin(2πt/`period`); infinite.
    Sinusoid {
        mid: f64,
        amplitude: f64,
        period: u64,
    },
    /// β(t) = `betas[t]`; finite, index-exact.
    Explicit { betas: Vec<f64> },
    /// β = `beta_pre` for the first `t_switch` steps, then β = 1/2 − `epsilon`
    /// for `burst_len` further steps; finite. Build with
    /// [`Schedule::deletion_burst`] to derive `burst_len` from the bin count.
    DeletionBurst {
        beta_pre: f64,
        t_switch: u64,
        epsilon: f64,
        burst_len: u64,
    },
}

/// A validated insertion-probability sequence with declared bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleKind", into = "ScheduleKind")]
pub struct Schedule {
    kind: ScheduleKind,
    /// (infimum, supremum) of every β(t) the schedule can emit.
    bounds: (f64, f64),
    /// Total steps for finite kinds; `None` for unbounded kinds.
    len: Option<u64>,
}

fn check_prob(value: f64, context: &str) -> Result<f64, ScheduleError> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ScheduleError::ProbabilityOutOfRange {
            value,
            context: context.to_string(),
        })
    }
}

impl TryFrom<ScheduleKind> for Schedule {
    type Error = ScheduleError;

    fn try_from(kind: ScheduleKind) -> Result<Self, Self::Error> {
        let (bounds, len) = match &kind {
            ScheduleKind::Constant { beta } => {
                let b = check_prob(*beta, "Constant")?;
                ((b, b), None)
            }
            ScheduleKind::PiecewiseConstant { segments } => {
                if segments.is_empty() {
                    return Err(ScheduleError::Empty);
                }
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                let mut total = 0u64;
                for (index, seg) in segments.iter().enumerate() {
                    if seg.steps == 0 {
                        return Err(ScheduleError::EmptySegment { index });
                    }
                    let b = check_prob(seg.beta, &format!("segment {index}"))?;
                    lo = lo.min(b);
                    hi = hi.max(b);
                    total += seg.steps;
                }
                ((lo, hi), Some(total))
            }
            ScheduleKind::Sinusoid {
                mid,
                amplitude,
                period,
            } => {
                if *period == 0 {
                    return Err(ScheduleError::BadPeriod { period: *period });
                }
                if !amplitude.is_finite() || *amplitude < 0.0 {
                    return Err(ScheduleError::BadAmplitude {
                        amplitude: *amplitude,
                    });
                }
                let lo = check_prob(mid - amplitude, "Sinusoid trough")?;
                let hi = check_prob(mid + amplitude, "Sinusoid crest")?;
                ((lo, hi), None)
            }
            ScheduleKind::Explicit { betas } => {
                if betas.is_empty() {
                    return Err(ScheduleError::Empty);
                }
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (i, &b) in betas.iter().enumerate() {
                    let b = check_prob(b, &format!("betas[{i}]"))?;
                    lo = lo.min(b);
                    hi = hi.max(b);
                }
                ((lo, hi), Some(betas.len() as u64))
            }
            ScheduleKind::DeletionBurst {
                beta_pre,
                t_switch,
                epsilon,
                burst_len,
            } => {
                if !epsilon.is_finite() || *epsilon <= 0.0 || *epsilon >= 0.5 {
                    return Err(ScheduleError::BadEpsilon { epsilon: *epsilon });
                }
                let pre = check_prob(*beta_pre, "DeletionBurst pre-phase")?;
                let burst = 0.5 - epsilon;
                let (lo, hi) = if *t_switch == 0 {
                    (burst, burst)
                } else {
                    (pre.min(burst), pre.max(burst))
                };
                ((lo, hi), Some(t_switch + burst_len))
            }
        };
        Ok(Self { kind, bounds, len })
    }
}

impl From<Schedule> for ScheduleKind {
    fn from(s: Schedule) -> Self {
        s.kind
    }
}

impl Schedule {
    /// β(t) = `beta` forever.
    pub fn constant(beta: f64) -> Result<Self, ScheduleError> {
        ScheduleKind::Constant { beta }.try_into()
    }

    /// Finite schedule reading `betas` index-exactly.
    pub fn explicit(betas: Vec<f64>) -> Result<Self, ScheduleError> {
        ScheduleKind::Explicit { betas }.try_into()
    }

    /// Constant stretches consumed in order.
    pub fn piecewise(segments: Vec<Segment>) -> Result<Self, ScheduleError> {
        ScheduleKind::PiecewiseConstant { segments }.try_into()
    }

    /// β(t) = `mid` + `amplitude`·sin(2πt/`period`).
    pub fn sinusoid(mid: f64, amplitude: f64, period: u64) -> Result<Self, ScheduleError> {
        ScheduleKind::Sinusoid {
            mid,
            amplitude,
            period,
        }
        .try_into()
    }

    /// Heavy-load burst construction: β = `beta_pre` for `t_switch` steps,
    /// then β = 1/2 − ε for ⌈n·ln(n) / (2 + 4ε)⌉ further steps.
    ///
    /// The burst length is derived from the bin count `n` (natural log), e.g.
    /// n = 100, ε = 0.1 gives ⌈100·ln 100 / 2.4⌉ = 192 burst steps.
    pub fn deletion_burst(
        n: usize,
        beta_pre: f64,
        t_switch: u64,
        epsilon: f64,
    ) -> Result<Self, ScheduleError> {
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 0.5 {
            return Err(ScheduleError::BadEpsilon { epsilon });
        }
        let n = n as f64;
        let burst_len = (n * n.ln() / (2.0 + 4.0 * epsilon)).ceil() as u64;
        ScheduleKind::DeletionBurst {
            beta_pre,
            t_switch,
            epsilon,
            burst_len,
        }
        .try_into()
    }

    /// Insertion probability of the step advancing time `t` → `t+1`.
    ///
    /// Pure: querying the same `t` twice yields the same value. Finite
    /// schedules return [`ScheduleError::PastEnd`] for `t >= len`.
    pub fn beta_at(&self, t: u64) -> Result<f64, ScheduleError> {
        if let Some(len) = self.len {
            if t >= len {
                return Err(ScheduleError::PastEnd { t, len });
            }
        }
        let beta = match &self.kind {
            ScheduleKind::Constant { beta } => *beta,
            ScheduleKind::PiecewiseConstant { segments } => {
                let mut remaining = t;
                let mut value = f64::NAN;
                for seg in segments {
                    if remaining < seg.steps {
                        value = seg.beta;
                        break;
                    }
                    remaining -= seg.steps;
                }
                value
            }
            ScheduleKind::Sinusoid {
                mid,
                amplitude,
                period,
            } => {
                let phase = TAU * (t % period) as f64 / *period as f64;
                // Validation bounds mid ± amplitude inside [0,1]; the clamp
                // only guards against sub-ulp rounding at the extremes.
                (mid + amplitude * phase.sin()).clamp(0.0, 1.0)
            }
            ScheduleKind::Explicit { betas } => betas[t as usize],
            ScheduleKind::DeletionBurst {
                beta_pre,
                t_switch,
                epsilon,
                ..
            } => {
                if t < *t_switch {
                    *beta_pre
                } else {
                    0.5 - epsilon
                }
            }
        };
        debug_assert!(beta >= self.bounds.0 - 1e-15 && beta <= self.bounds.1 + 1e-15);
        Ok(beta)
    }

    /// Declared (infimum, supremum) over every step of the run.
    #[must_use]
    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    /// Total number of steps for finite kinds, `None` for unbounded kinds.
    #[must_use]
    pub fn len(&self) -> Option<u64> {
        self.len
    }

    /// True when the schedule emits no steps (never: construction rejects
    /// empty schedules), kept for API symmetry with `len`.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == Some(0)
    }

    /// The underlying kind.
    #[must_use]
    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_emits_its_value_forever() {
        let s = Schedule::constant(0.6).unwrap();
        assert_eq!(s.beta_at(0).unwrap(), 0.6);
        assert_eq!(s.beta_at(1_000_000).unwrap(), 0.6);
        assert_eq!(s.bounds(), (0.6, 0.6));
        assert_eq!(s.len(), None);
    }

    #[test]
    fn explicit_is_index_exact() {
        let s = Schedule::explicit(vec![0.1, 0.9, 0.5]).unwrap();
        assert_eq!(s.beta_at(0).unwrap(), 0.1);
        assert_eq!(s.beta_at(2).unwrap(), 0.5);
        assert_eq!(
            s.beta_at(3),
            Err(ScheduleError::PastEnd { t: 3, len: 3 })
        );
        assert_eq!(s.bounds(), (0.1, 0.9));
    }

    #[test]
    fn piecewise_segments_consume_in_order() {
        let s = Schedule::piecewise(vec![
            Segment { steps: 2, beta: 0.9 },
            Segment { steps: 3, beta: 0.2 },
        ])
        .unwrap();
        let got: Vec<f64> = (0..5).map(|t| s.beta_at(t).unwrap()).collect();
        assert_eq!(got, vec![0.9, 0.9, 0.2, 0.2, 0.2]);
        assert!(s.beta_at(5).is_err());
        assert_eq!(s.len(), Some(5));
    }

    #[test]
    fn sinusoid_stays_in_declared_bounds() {
        let s = Schedule::sinusoid(0.5, 0.3, 37).unwrap();
        let (lo, hi) = s.bounds();
        for t in 0..500 {
            let b = s.beta_at(t).unwrap();
            assert!(b >= lo && b <= hi, "t={t} b={b}");
        }
    }

    #[test]
    fn deletion_burst_lengths_and_values() {
        // n = 100, eps = 0.1: burst length ceil(100 ln 100 / 2.4) = 192.
        let s = Schedule::deletion_burst(100, 1.0, 10, 0.1).unwrap();
        assert_eq!(s.len(), Some(10 + 192));
        assert_eq!(s.beta_at(9).unwrap(), 1.0);
        assert!((s.beta_at(10).unwrap() - 0.4).abs() < 1e-15);
        assert!((s.beta_at(201).unwrap() - 0.4).abs() < 1e-15);
        assert!(s.beta_at(202).is_err());
    }

    #[test]
    fn out_of_range_probability_rejected() {
        assert!(Schedule::constant(1.2).is_err());
        assert!(Schedule::constant(-0.1).is_err());
        assert!(Schedule::constant(f64::NAN).is_err());
        assert!(Schedule::sinusoid(0.9, 0.2, 10).is_err()); // crest above 1
        assert!(Schedule::explicit(vec![]).is_err());
        assert!(Schedule::deletion_burst(8, 1.0, 0, 0.5).is_err());
    }

    #[test]
    fn serde_round_trip_revalidates() {
        let s = Schedule::deletion_burst(100, 0.8, 5, 0.2).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: Schedule = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
        // Bounds were recomputed, not read from the wire.
        assert_eq!(back.bounds(), s.bounds());

        let bad = r#"{"kind":"Constant","beta":1.5}"#;
        assert!(serde_json::from_str::<Schedule>(bad).is_err());
    }
}
