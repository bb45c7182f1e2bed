//! Expected dispersion, coupon-collector tails, partition emptiness and the
//! tail-bound envelope.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{sample_uniform_sphere, wedge_index};
use super::{Estimate, ExperimentConfig, ExperimentResult, SIGMAS};
use crate::bounds::{behw_tail, cap_vc, expected_lower, expected_upper_sphere, partition_count};
use crate::dispersion::{
    dispersion_grid_oracle, largest_empty_arc, largest_empty_cap_exact,
    largest_empty_slice_search, oracle_error, OracleFamily, SearchConfig,
    MAX_SLICE_RESOLUTION_D2,
};
use crate::error::{Error, Result};
use crate::rng::{split_seed, task_rng};

/// Cap on `reps x (estimated work per replication)` for the expected
/// dispersion experiment.
pub const EXPDISP_WORK_BUDGET: f64 = 1e11;

/// Stream index reserved for the coupled coupon simulation of the
/// partition experiment, far from any replication index.
const COUPON_STREAM: u64 = u64::MAX;

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}

/// Seed of the point set used by replication `rep`.
fn rep_seed(seed: u64, rep: u64) -> u64 {
    split_seed(seed, rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Grid oracle (d <= 2): brackets each dispersion within a known error.
    Oracle,
    /// Certified search: a lower bound per replication, so its mean is
    /// biased downward.
    Search,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpDispConfig {
    pub d: usize,
    pub n: usize,
    pub reps: usize,
    pub estimator: Estimator,
    pub seed: u64,
    /// Oracle resolution.
    pub resolution: usize,
    /// Search starts per replication.
    pub starts: usize,
}

impl ExpDispConfig {
    /// Defaults: resolution 720 on S^1 and 30 on S^2, 8 search starts.
    pub fn new(d: usize, n: usize, reps: usize, estimator: Estimator, seed: u64) -> Self {
        Self {
            d,
            n,
            reps,
            estimator,
            seed,
            resolution: if d == 1 { 720 } else { 30 },
            starts: 8,
        }
    }

    fn work_per_rep(&self) -> f64 {
        let (n, m) = (self.n.max(1) as f64, self.resolution as f64);
        match (self.estimator, self.d) {
            (Estimator::Oracle, 1) => n * m,
            (Estimator::Oracle, _) => m.powi(5),
            (Estimator::Search, _) => {
                self.starts as f64 * SearchConfig::default().max_evals as f64 * n
            }
        }
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        require(self.d >= 1, || "d must be at least 1".into())?;
        require(self.reps >= 30, || format!("reps must be at least 30, got {}", self.reps))?;
        let grid_err = match self.estimator {
            Estimator::Oracle => {
                require(self.d <= 2, || format!("oracle estimator needs d <= 2, got {}", self.d))?;
                if self.d == 2 && self.resolution > MAX_SLICE_RESOLUTION_D2 {
                    return Err(Error::BudgetExceeded {
                        cost: self.resolution as f64,
                        budget: MAX_SLICE_RESOLUTION_D2 as f64,
                    });
                }
                oracle_error(self.d, self.resolution, OracleFamily::Slices)?
            }
            Estimator::Search => 0.0,
        };
        let cost = self.reps as f64 * self.work_per_rep();
        if cost > EXPDISP_WORK_BUDGET {
            return Err(Error::BudgetExceeded { cost, budget: EXPDISP_WORK_BUDGET });
        }

        let values: Vec<f64> = (0..self.reps as u64)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let seed = rep_seed(self.seed, r);
                let pts = sample_uniform_sphere(self.d, self.n, seed);
                let res = match self.estimator {
                    Estimator::Oracle => {
                        dispersion_grid_oracle(&pts, self.d, self.resolution, OracleFamily::Slices)?
                    }
                    Estimator::Search => {
                        let cfg = SearchConfig { starts: self.starts, seed, ..Default::default() };
                        largest_empty_slice_search(&pts, self.d, &cfg)?
                    }
                };
                Ok(res.lower_value)
            })
            .collect::<Result<_>>()?;

        let est = Estimate::from_samples(&values);
        let mut out = ExperimentResult::new(
            ExperimentConfig::ExpectedDispersion(self.clone()),
            self.reps as u64,
        );
        out.estimates.insert("mean_disp".into(), est);
        out.bound_values.insert("grid_error".into(), grid_err);

        let lower = expected_lower(self.n as u64);
        if lower.valid {
            out.bound_values.insert("expected_lower".into(), lower.value);
            // a per-replication lower bound cannot refute a lower bound on the mean
            if self.estimator == Estimator::Oracle {
                let ok = est.value + SIGMAS * est.stderr + grid_err >= lower.value;
                out.verdicts.insert("mean_above_expected_lower".into(), ok);
            }
        }
        let upper = expected_upper_sphere(self.n as u64, self.d as u64);
        if upper.valid {
            out.bound_values.insert("expected_upper_sphere".into(), upper.value);
            let ok = est.value - SIGMAS * est.stderr <= upper.value.min(1.0);
            out.verdicts.insert("mean_below_expected_upper".into(), ok);
        }
        Ok(out)
    }
}

/// [`ExpDispConfig::run`] with default resolution and starts.
pub fn mc_expected_dispersion(
    d: usize,
    n: usize,
    reps: usize,
    estimator: Estimator,
    seed: u64,
) -> Result<ExperimentResult> {
    ExpDispConfig::new(d, n, reps, estimator, seed).run()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouponConfig {
    pub ell: u64,
    pub n: u64,
    pub reps: u64,
    pub seed: u64,
}

/// Whether `n` uniform draws from `ell` coupons miss at least one.
fn coupon_incomplete(ell: u64, n: u64, seed: u64, rep: u64) -> bool {
    let mut rng = task_rng(seed, rep);
    let mut seen = vec![false; ell as usize];
    let mut distinct = 0;
    for _ in 0..n {
        let c = rng.gen_range(0..ell) as usize;
        if !seen[c] {
            seen[c] = true;
            distinct += 1;
            if distinct == ell {
                return false;
            }
        }
    }
    true
}

fn proportion_par(reps: u64, hit: impl Fn(u64) -> bool + Sync + Send) -> Estimate {
    let hits: Vec<bool> = (0..reps).into_par_iter().map(hit).collect();
    Estimate::proportion(hits.iter().filter(|&&h| h).count() as u64, reps)
}

impl CouponConfig {
    pub fn run(&self) -> Result<ExperimentResult> {
        require(self.ell >= 2, || format!("ell must be at least 2, got {}", self.ell))?;
        require(self.reps >= 1000, || format!("reps must be at least 1000, got {}", self.reps))?;
        let est = proportion_par(self.reps, |r| coupon_incomplete(self.ell, self.n, self.seed, r));
        let mut out = ExperimentResult::new(ExperimentConfig::CouponTail(self.clone()), self.reps);
        out.estimates.insert("tail_prob".into(), est);
        // the tail is decreasing in n, so the claim covers every n up to
        // the safe threshold
        if let Ok(safe) = crate::bounds::coupon_safe_n(self.ell) {
            out.bound_values.insert("coupon_safe_n".into(), safe as f64);
            if self.n <= safe {
                out.verdicts.insert(
                    "tail_above_half".into(),
                    est.value > 0.5 - SIGMAS * est.stderr,
                );
            }
        }
        Ok(out)
    }
}

/// Estimate of `P[tau_ell > n]`, the chance that `n` draws miss a coupon.
pub fn coupon_tail_sim(ell: u64, n: u64, reps: u64, seed: u64) -> Result<ExperimentResult> {
    CouponConfig { ell, n, reps, seed }.run()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    pub d: usize,
    pub n: u64,
    pub reps: u64,
    pub seed: u64,
}

impl PartitionConfig {
    pub fn run(&self) -> Result<ExperimentResult> {
        require(self.d >= 1, || "d must be at least 1".into())?;
        require(self.reps >= 1000, || format!("reps must be at least 1000, got {}", self.reps))?;
        let ell = partition_count(self.n)?;
        let est = proportion_par(self.reps, |r| {
            let pts = sample_uniform_sphere(self.d, self.n as usize, rep_seed(self.seed, r));
            let mut seen = vec![false; ell as usize];
            for p in &pts {
                seen[wedge_index(p, ell as usize)] = true;
            }
            seen.contains(&false)
        });
        let coupon = CouponConfig {
            ell,
            n: self.n,
            reps: self.reps,
            seed: split_seed(self.seed, COUPON_STREAM),
        }
        .run()?;
        let tail = coupon.estimates["tail_prob"];

        let mut out = ExperimentResult::new(ExperimentConfig::PartitionEmptiness(self.clone()), self.reps);
        out.estimates.insert("empty_wedge_prob".into(), est);
        out.estimates.insert("coupon_tail".into(), tail);
        out.estimates.insert(
            "expected_disp_lower".into(),
            Estimate { value: est.value / ell as f64, stderr: est.stderr / ell as f64 },
        );
        out.bound_values.insert("ell".into(), ell as f64);
        let lower = expected_lower(self.n);
        if lower.valid {
            out.bound_values.insert("expected_lower".into(), lower.value);
        }
        let slack = SIGMAS * (est.stderr.powi(2) + tail.stderr.powi(2)).sqrt();
        out.verdicts.insert(
            "matches_coupon_tail".into(),
            (est.value - tail.value).abs() <= slack,
        );
        Ok(out)
    }
}

/// Probability that some wedge of the `partition_count(n)`-lune partition
/// is empty after `n` uniform points, with the coupled coupon simulation.
pub fn partition_emptiness_prob(d: usize, n: u64, reps: u64, seed: u64) -> Result<ExperimentResult> {
    PartitionConfig { d, n, reps, seed }.run()
}

/// Empirical exceedance of cap dispersion against the tail bound
/// `behw_tail(n, d + 2, t)` on the grid `t = k / grid`, `k = 1..=grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehwConfig {
    pub d: usize,
    pub n: usize,
    pub reps: usize,
    pub grid: usize,
    pub seed: u64,
}

impl BehwConfig {
    pub fn run(&self) -> Result<ExperimentResult> {
        require(self.d >= 1, || "d must be at least 1".into())?;
        require(self.grid >= 1, || "grid must be at least 1".into())?;
        require(self.reps >= 30, || format!("reps must be at least 30, got {}", self.reps))?;
        let vc = cap_vc(self.d as u64);
        require(self.n as u64 >= vc, || format!("n must be at least {vc}"))?;
        let values: Vec<f64> = (0..self.reps as u64)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let pts = sample_uniform_sphere(self.d, self.n, rep_seed(self.seed, r));
                let res = if self.d == 1 {
                    largest_empty_arc(&pts)?
                } else {
                    largest_empty_cap_exact(&pts, self.d)?
                };
                Ok(res.lower_value)
            })
            .collect::<Result<_>>()?;

        let mut out = ExperimentResult::new(ExperimentConfig::BehwEnvelope(self.clone()), self.reps as u64);
        out.estimates.insert("mean_cap_disp".into(), Estimate::from_samples(&values));
        for k in 1..=self.grid {
            let t = k as f64 / self.grid as f64;
            let hits = values.iter().filter(|&&v| v > t).count() as u64;
            let est = Estimate::proportion(hits, self.reps as u64);
            let bound = behw_tail(self.n as u64, vc, t)?;
            let key = format!("t={t:.3}");
            out.estimates.insert(format!("exceedance[{key}]"), est);
            out.bound_values.insert(format!("behw_tail[{key}]"), bound);
            out.verdicts.insert(
                format!("below_tail[{key}]"),
                est.value <= bound + SIGMAS * est.stderr,
            );
        }
        Ok(out)
    }
}
