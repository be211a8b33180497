//! Run reports: per-replica summaries and aggregates recomputable from them.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

/// Extremes and final observables of one replica, tracked at every step (not
/// just at sample times).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    /// Replica index; the replica ran on stream `replica` of the master seed.
    pub replica: u64,
    /// Steps executed.
    pub final_step: u64,
    /// Ball count after the last step.
    pub final_total_load: u64,
    /// Largest one-sided discrepancy seen at any step.
    pub max_disc: f64,
    /// Largest absolute discrepancy seen at any step.
    pub max_adisc: f64,
    /// Largest overload (against the watermark average) seen at any step.
    pub max_overload: f64,
    /// Final Γ potential, present when the configuration sets `alpha`.
    pub final_gamma: Option<f64>,
    /// Total `(sample, level)` classifications that came out invalid, present
    /// when the configuration enables threshold classification.
    pub invalid_level_count: Option<u64>,
    /// Number of metric samples the replica emitted.
    pub sample_count: u64,
}

/// Order statistics of one summary metric across replicas.
///
/// Quantiles use the nearest-rank rule on the sorted values, so they are
/// exact order statistics, not interpolations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub mean: f64,
    pub min: f64,
    pub p50: f64,
    pub p90: f64,
    pub max: f64,
}

impl StatSummary {
    /// Summarize a non-empty slice.
    #[must_use]
    pub fn from_values(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "no values to summarize");
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("summary values are never NaN"));
        let rank = |q: f64| {
            let k = sorted.len() as f64;
            let idx = ((q * k).ceil() as usize).clamp(1, sorted.len());
            sorted[idx - 1]
        };
        Self {
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            min: sorted[0],
            p50: rank(0.5),
            p90: rank(0.9),
            max: *sorted.last().unwrap(),
        }
    }
}

/// Aggregates over the per-replica maxima; recomputable from the summary
/// rows by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub max_disc: StatSummary,
    pub max_adisc: StatSummary,
    pub max_overload: StatSummary,
}

impl AggregateStats {
    /// Recompute the aggregates from summary rows.
    #[must_use]
    pub fn from_seeds(seeds: &[SeedSummary]) -> Self {
        let pluck = |f: fn(&SeedSummary) -> f64| {
            StatSummary::from_values(&seeds.iter().map(f).collect::<Vec<_>>())
        };
        Self {
            max_disc: pluck(|s| s.max_disc),
            max_adisc: pluck(|s| s.max_adisc),
            max_overload: pluck(|s| s.max_overload),
        }
    }
}

/// The full report of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Version of the engine that produced the report.
    pub engine_version: String,
    /// Echo of the configuration that was executed (after flag overrides).
    pub config: ExperimentConfig,
    /// Wall-clock duration of the replica fan-out, in seconds. The only
    /// field that varies between identical runs.
    pub wall_clock_seconds: f64,
    /// One summary per replica, in replica order.
    pub seeds: Vec<SeedSummary>,
    /// Order statistics over the per-replica maxima.
    pub aggregate: AggregateStats,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(replica: u64, disc: f64) -> SeedSummary {
        SeedSummary {
            replica,
            final_step: 10,
            final_total_load: 5,
            max_disc: disc,
            max_adisc: disc + 1.0,
            max_overload: disc - 0.5,
            final_gamma: None,
            invalid_level_count: None,
            sample_count: 10,
        }
    }

    #[test]
    fn nearest_rank_quantiles_are_order_statistics() {
        let s = StatSummary::from_values(&[4.0, 1.0, 3.0, 2.0, 5.0]);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.p50, 3.0); // ceil(0.5*5) = 3rd of [1,2,3,4,5]
        assert_eq!(s.p90, 5.0); // ceil(0.9*5) = 5th
        assert_eq!(s.max, 5.0);
        assert!((s.mean - 3.0).abs() < 1e-15);

        let one = StatSummary::from_values(&[7.25]);
        assert_eq!(one.p50, 7.25);
        assert_eq!(one.p90, 7.25);
    }

    #[test]
    fn aggregates_are_recomputable_from_rows() {
        let seeds: Vec<SeedSummary> = (0..7).map(|r| summary(r, r as f64)).collect();
        let agg = AggregateStats::from_seeds(&seeds);
        assert_eq!(agg, AggregateStats::from_seeds(&seeds));
        assert_eq!(agg.max_disc.max, 6.0);
        assert_eq!(agg.max_adisc.max, 7.0);
        assert_eq!(agg.max_overload.min, -0.5);
    }
}
