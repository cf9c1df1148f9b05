//! Paired Monte-Carlo comparison of estimators against the exact mean.
//!
//! Every replication draws one dataset and evaluates every requested
//! estimator on that same dataset, so method comparisons share the sampling
//! noise. The data substream for replication r depends only on (seed, r),
//! never on which estimators were requested.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::dirichlet::{sample_weights, weighted_mean};
use crate::distributions::{sample_distribution, DistributionSpec};
use crate::error::{Error, Result};
use crate::estimators::point_estimate;
use crate::rng::{derive_seed, derive_substream};
use crate::sample::{EstimatorConfig, Method};
use crate::stats::{jackknife_se_of_mean, mean};

const DATA_TAG: u64 = 0x11;
const WEIGHT_TAG: u64 = 0x12;

/// One simulation study: a distribution, a sample size, the estimators to
/// compare and the replication budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub dist: DistributionSpec,
    pub n: usize,
    pub estimators: Vec<Method>,
    /// Alpha and draw count for the weighted-median estimators; the seed
    /// field is ignored here (per-replication seeds derive from `seed`).
    pub config: EstimatorConfig,
    /// Block count for the median of means.
    pub mm_groups: usize,
    pub replications: usize,
    pub seed: u64,
}

impl SimulationSpec {
    pub fn new(
        dist: DistributionSpec,
        n: usize,
        estimators: Vec<Method>,
        config: EstimatorConfig,
        replications: usize,
        seed: u64,
    ) -> Result<Self> {
        let spec = Self {
            dist,
            n,
            estimators,
            config,
            mm_groups: 3,
            replications,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.dist.validate()?;
        self.config.validate()?;
        if self.n == 0 {
            return Err(Error::ConfigError("n must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::ConfigError("no estimators requested".into()));
        }
        if self.replications < 2 {
            return Err(Error::ConfigError("need at least 2 replications".into()));
        }
        if self.mm_groups == 0 || self.mm_groups > self.n {
            return Err(Error::ConfigError(format!(
                "mm_groups must be in 1..={}, got {}",
                self.n, self.mm_groups
            )));
        }
        Ok(())
    }
}

/// Error summary for one estimator across replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub mse: f64,
    pub mad: f64,
    pub bias: f64,
    pub std: f64,
    /// Jackknife standard error of the MSE estimate.
    pub mse_se: f64,
}

/// Full output of one simulation study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub true_mean: f64,
    pub per_estimator: BTreeMap<Method, EstimatorSummary>,
    /// Replications in which each estimator beat the sample mean in
    /// absolute error.
    pub wins: BTreeMap<Method, usize>,
    pub replications: usize,
}

/// Runs the paired study. Deterministic in the spec, independent of thread
/// count.
pub fn run_simulation(spec: &SimulationSpec) -> Result<SimulationReport> {
    spec.validate()?;
    let theta = spec.dist.true_mean()?;
    let data_root = derive_seed(spec.seed, DATA_TAG);
    let weight_root = derive_seed(spec.seed, WEIGHT_TAG);
    let methods = &spec.estimators;

    // rows: per replication, the mean estimate first, then one estimate per
    // requested method (all on the same data)
    let rows: Vec<(f64, Vec<f64>)> = (0..spec.replications)
        .into_par_iter()
        .map(|r| -> Result<(f64, Vec<f64>)> {
            let data =
                sample_distribution(&spec.dist, spec.n, &derive_substream(data_root, r as u64))?;
            let cfg = EstimatorConfig {
                seed: derive_seed(weight_root, r as u64),
                ..spec.config
            };
            let mean_est = crate::estimators::sample_mean(&data);
            let ests = methods
                .iter()
                .map(|&m| point_estimate(m, &data, &cfg, spec.mm_groups))
                .collect::<Result<Vec<f64>>>()?;
            Ok((mean_est, ests))
        })
        .collect::<Result<_>>()?;

    let reps = spec.replications as f64;
    let mut per_estimator = BTreeMap::new();
    let mut wins = BTreeMap::new();
    for (k, &method) in methods.iter().enumerate() {
        let estimates: Vec<f64> = rows.iter().map(|(_, e)| e[k]).collect();
        let sq_errors: Vec<f64> = estimates.iter().map(|e| (e - theta).powi(2)).collect();
        let mse = mean(&sq_errors);
        let mad = estimates.iter().map(|e| (e - theta).abs()).sum::<f64>() / reps;
        let bias = mean(&estimates) - theta;
        let center = mean(&estimates);
        let std = (estimates.iter().map(|e| (e - center).powi(2)).sum::<f64>() / (reps - 1.0))
            .sqrt();
        per_estimator.insert(
            method,
            EstimatorSummary {
                mse,
                mad,
                bias,
                std,
                mse_se: jackknife_se_of_mean(&sq_errors),
            },
        );
        let won = rows
            .iter()
            .filter(|(mean_est, e)| (e[k] - theta).abs() < (mean_est - theta).abs())
            .count();
        wins.insert(method, won);
    }
    Ok(SimulationReport {
        true_mean: theta,
        per_estimator,
        wins,
        replications: spec.replications,
    })
}

/// Simulates the weighted mean over both fresh data and fresh weights:
/// draw t uses data substream t and weight substream t of two disjoint
/// families derived from `seed`.
pub fn simulate_unconditional_means(
    dist: &DistributionSpec,
    n: usize,
    alpha: f64,
    draws: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n == 0 || draws == 0 {
        return Err(Error::ConfigError("n and draws must be positive".into()));
    }
    let data_root = derive_seed(seed, DATA_TAG);
    let weight_root = derive_seed(seed, WEIGHT_TAG);
    let one = |t: usize| -> Result<f64> {
        let data = sample_distribution(dist, n, &derive_substream(data_root, t as u64))?;
        let w = sample_weights(n, alpha, &derive_substream(weight_root, t as u64))?;
        weighted_mean(&w, &data)
    };
    if draws >= 2048 {
        (0..draws).into_par_iter().map(one).collect()
    } else {
        (0..draws).map(one).collect()
    }
}
