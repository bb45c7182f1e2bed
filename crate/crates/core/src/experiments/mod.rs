//! Seeded Monte Carlo experiments.
//!
//! Every experiment is described by a serializable config carrying its
//! master seed. Replication `r` draws from the stream
//! `task_rng(seed, r)` (see [`crate::rng::split_seed`]), replications run
//! in parallel, and their outputs are collected in index order before
//! being summed, so results are bit-for-bit identical for any thread
//! count. Verdicts use a fixed slack of three standard errors.

mod montecarlo;
mod sampling;
mod shattering;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use montecarlo::{
    coupon_tail_sim, mc_expected_dispersion, partition_emptiness_prob, BehwConfig, CouponConfig,
    Estimator, ExpDispConfig, PartitionConfig, EXPDISP_WORK_BUDGET,
};
pub use sampling::{lune_partition, sample_uniform_sphere, wedge_index};
pub use shattering::{
    cap_labelings, cap_shattering_check, vc_dimension_experiment, VcConfig, MAX_SHATTER_POINTS,
};

/// Verdict slack in standard errors.
pub const SIGMAS: f64 = 3.0;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Sample mean and standard error of the mean (sums taken in order).
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Self { value: f64::NAN, stderr: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Self { value: mean, stderr: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self { value: mean, stderr: (var / n).sqrt() }
    }

    /// Binomial proportion `hits / reps` with stderr `sqrt(p (1 - p) / reps)`.
    pub fn proportion(hits: u64, reps: u64) -> Self {
        let p = hits as f64 / reps as f64;
        Self { value: p, stderr: (p * (1.0 - p) / reps as f64).sqrt() }
    }
}

/// Parameters of any experiment; `run` dispatches on the variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentConfig {
    ExpectedDispersion(ExpDispConfig),
    CouponTail(CouponConfig),
    PartitionEmptiness(PartitionConfig),
    VcDimension(VcConfig),
    BehwEnvelope(BehwConfig),
}

impl ExperimentConfig {
    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::ExpectedDispersion(c) => c.seed,
            ExperimentConfig::CouponTail(c) => c.seed,
            ExperimentConfig::PartitionEmptiness(c) => c.seed,
            ExperimentConfig::VcDimension(c) => c.seed,
            ExperimentConfig::BehwEnvelope(c) => c.seed,
        }
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        match self {
            ExperimentConfig::ExpectedDispersion(c) => c.run(),
            ExperimentConfig::CouponTail(c) => c.run(),
            ExperimentConfig::PartitionEmptiness(c) => c.run(),
            ExperimentConfig::VcDimension(c) => c.run(),
            ExperimentConfig::BehwEnvelope(c) => c.run(),
        }
    }
}

/// Outcome of an experiment. Maps are ordered so serialization is stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub estimates: BTreeMap<String, Estimate>,
    pub bound_values: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, bool>,
    pub replication: u64,
}

impl ExperimentResult {
    fn new(config: ExperimentConfig, replication: u64) -> Self {
        Self {
            config,
            estimates: BTreeMap::new(),
            bound_values: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            replication,
        }
    }

    /// True when every recorded verdict holds.
    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn estimate(&self, name: &str) -> Option<Estimate> {
        self.estimates.get(name).copied()
    }
}
