//! The experiment configuration document and its validation rules.
//!
//! A configuration is one JSON object; unknown keys are rejected so typos
//! surface as errors instead of silently falling back to defaults. Fields
//! with natural defaults may be omitted. Command-line flags override fields
//! after parsing, and the merged document is validated once before a run.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use binsim_core::levels::build_thresholds;
use binsim_core::{DeletionModel, Schedule, ThresholdError};

/// An invalid experiment configuration.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("need at least 2 bins (got n = {n})")]
    TooFewBins { n: usize },
    #[error("need at least 1 step (got steps = {steps})")]
    NoSteps { steps: u64 },
    #[error("sample_every must be at least 1 (got {sample_every})")]
    BadSampleEvery { sample_every: u64 },
    #[error("insertion needs at least 1 choice (got d = {d})")]
    BadChoiceCount { d: usize },
    #[error("need at least 1 replica (got seeds_count = {seeds_count})")]
    NoReplicas { seeds_count: u64 },
    #[error("potential scale alpha must be positive and finite (got {alpha})")]
    BadAlpha { alpha: f64 },
    #[error("schedule ends after {len} steps but the run needs {steps}")]
    ScheduleTooShort { len: u64, steps: u64 },
    #[error(
        "thresholds_enabled needs a valid threshold table for the schedule \
         supremum: {source}"
    )]
    BadThresholds {
        #[from]
        source: ThresholdError,
    },
}

fn default_name() -> String {
    "run".to_string()
}

fn default_seeds_count() -> u64 {
    1
}

fn default_deletion_model() -> DeletionModel {
    DeletionModel::Bin
}

fn default_d() -> usize {
    2
}

fn default_gamma() -> u64 {
    1
}

fn default_sample_every() -> u64 {
    1
}

/// One simulation experiment, fully determined: identical configurations
/// produce byte-identical sample streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label echoed into reports; no semantic effect.
    #[serde(default = "default_name")]
    pub name: String,
    /// Number of bins.
    pub n: usize,
    /// Steps to execute per replica.
    pub steps: u64,
    /// Master seed; replica `k` runs on stream `k` of this seed.
    #[serde(default)]
    pub seed: u64,
    /// Number of independent replicas (streams `0..seeds_count`).
    #[serde(default = "default_seeds_count")]
    pub seeds_count: u64,
    /// Insertion-probability sequence β(t).
    pub schedule: Schedule,
    /// What a deletion step removes: a ball from a uniform non-empty bin, or
    /// a uniform ball.
    #[serde(default = "default_deletion_model")]
    pub deletion_model: DeletionModel,
    /// Number of uniform bin choices per insertion.
    #[serde(default = "default_d")]
    pub d: usize,
    /// Exponential-potential scale; when set, each replica reports its final
    /// Γ potential.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Slack above the watermark average used as the base height for level
    /// classification.
    #[serde(default = "default_gamma")]
    pub gamma: u64,
    /// Emit a metrics sample every this many steps (the final step is always
    /// sampled).
    #[serde(default = "default_sample_every")]
    pub sample_every: u64,
    /// When true, classify level masses against the critical-threshold table
    /// built for the schedule's supremum and report invalid-level counts.
    #[serde(default)]
    pub thresholds_enabled: bool,
    /// Default output directory; the `--out` flag overrides it.
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Check every invariant the runner relies on.
    ///
    /// Finite schedules must cover the full run, and enabling threshold
    /// classification requires the table to be constructible for this `n`
    /// and the schedule's supremum.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return Err(ConfigError::TooFewBins { n: self.n });
        }
        if self.steps < 1 {
            return Err(ConfigError::NoSteps { steps: self.steps });
        }
        if self.sample_every < 1 {
            return Err(ConfigError::BadSampleEvery {
                sample_every: self.sample_every,
            });
        }
        if self.d < 1 {
            return Err(ConfigError::BadChoiceCount { d: self.d });
        }
        if self.seeds_count < 1 {
            return Err(ConfigError::NoReplicas {
                seeds_count: self.seeds_count,
            });
        }
        if let Some(alpha) = self.alpha {
            if !alpha.is_finite() || alpha <= 0.0 {
                return Err(ConfigError::BadAlpha { alpha });
            }
        }
        if let Some(len) = self.schedule.len() {
            if len < self.steps {
                return Err(ConfigError::ScheduleTooShort {
                    len,
                    steps: self.steps,
                });
            }
        }
        if self.thresholds_enabled {
            build_thresholds(self.n, self.schedule.bounds().1)?;
        }
        Ok(())
    }
}
