//! Percentile bootstrap confidence intervals for the Bayesian median of
//! means.
//!
//! Recomputing the estimator on every bootstrap resample would cost
//! O(B J n) fresh Dirichlet draws; fixing one set of J weight vectors and
//! reusing it across all B resamples cuts the sampling cost to O(J n) while
//! leaving the intervals essentially unchanged. Resampling indices come from
//! a stream family disjoint from the weight draws, so toggling
//! `fix_dirichlet_draws` never perturbs which data points are resampled.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dirichlet::sample_weights;
use crate::distributions::{sample_distribution, DistributionSpec};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, derive_substream};
use crate::sample::Sample;
use crate::stats::{median_in_place, quantile_sorted};

const WEIGHT_TAG: u64 = 0x41;
const RESAMPLE_TAG: u64 = 0x42;
const FRESH_WEIGHT_TAG: u64 = 0x43;
const COVERAGE_DATA_TAG: u64 = 0x44;
const COVERAGE_CI_TAG: u64 = 0x45;

/// Settings for the bootstrap interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CIConfig {
    /// Complement of the confidence level (0.05 for a 95% interval).
    pub level_complement: f64,
    /// Number of bootstrap resamples (B).
    pub replicates: usize,
    /// Number of Dirichlet weight vectors (J).
    pub draws: usize,
    /// Dirichlet concentration.
    pub alpha: f64,
    pub seed: u64,
    /// Reuse one set of weight vectors across all resamples.
    pub fix_dirichlet_draws: bool,
}

impl CIConfig {
    /// Defaults: 95% level, 1000 resamples, one weight vector per data
    /// point, concentration 1, fixed draws.
    pub fn default_for(n: usize, seed: u64) -> Self {
        Self {
            level_complement: 0.05,
            replicates: 1000,
            draws: n,
            alpha: 1.0,
            seed,
            fix_dirichlet_draws: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.level_complement > 0.0 && self.level_complement < 1.0) {
            return Err(Error::ConfigError(format!(
                "level complement must be in (0, 1), got {}",
                self.level_complement
            )));
        }
        if self.replicates < 2 {
            return Err(Error::ConfigError("need at least 2 replicates".into()));
        }
        if self.draws == 0 {
            return Err(Error::ConfigError("draws must be at least 1".into()));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::ConfigError(format!(
                "alpha must be a positive real, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Percentile interval with its point estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CIResult {
    pub lower: f64,
    pub upper: f64,
    pub point_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap_estimates: Option<Vec<f64>>,
}

fn flat_weight_matrix(n: usize, alpha: f64, root: u64, draws: usize) -> Result<Vec<f64>> {
    let mut flat = Vec::with_capacity(draws * n);
    for j in 0..draws {
        let w = sample_weights(n, alpha, &derive_substream(root, j as u64))?;
        flat.extend_from_slice(w.values());
    }
    Ok(flat)
}

fn median_of_weighted(flat_weights: &[f64], values: &[f64], draws: usize) -> f64 {
    let n = values.len();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let mut means: Vec<f64> = (0..draws)
        .map(|j| {
            let row = &flat_weights[j * n..(j + 1) * n];
            let dot: f64 = row.iter().zip(values).map(|(w, v)| w * v).sum();
            dot.clamp(lo, hi)
        })
        .collect();
    median_in_place(&mut means)
}

fn ci_bmm_impl(sample: &Sample, config: &CIConfig, keep: bool) -> Result<CIResult> {
    config.validate()?;
    let n = sample.len();
    let weight_root = derive_seed(config.seed, WEIGHT_TAG);
    let resample_root = derive_seed(config.seed, RESAMPLE_TAG);
    let fresh_root = derive_seed(config.seed, FRESH_WEIGHT_TAG);

    let fixed = flat_weight_matrix(n, config.alpha, weight_root, config.draws)?;
    let point_estimate = median_of_weighted(&fixed, sample.values(), config.draws);

    let mut estimates: Vec<f64> = (0..config.replicates)
        .into_par_iter()
        .map(|b| -> Result<f64> {
            let mut rng = derive_substream(resample_root, b as u64).rng();
            let resampled: Vec<f64> = (0..n)
                .map(|_| sample.values()[rng.random_range(0..n)])
                .collect();
            if config.fix_dirichlet_draws {
                Ok(median_of_weighted(&fixed, &resampled, config.draws))
            } else {
                let fresh = flat_weight_matrix(
                    n,
                    config.alpha,
                    derive_seed(fresh_root, b as u64),
                    config.draws,
                )?;
                Ok(median_of_weighted(&fresh, &resampled, config.draws))
            }
        })
        .collect::<Result<_>>()?;

    let kept = keep.then(|| estimates.clone());
    estimates.sort_unstable_by(f64::total_cmp);
    let half = config.level_complement / 2.0;
    Ok(CIResult {
        lower: quantile_sorted(&estimates, half),
        upper: quantile_sorted(&estimates, 1.0 - half),
        point_estimate,
        bootstrap_estimates: kept,
    })
}

/// Percentile bootstrap interval for the Bayesian median of means.
///
/// Deterministic in `(sample, config)`. Endpoints are the
/// `level_complement / 2` and `1 - level_complement / 2` quantiles of the
/// replicate estimates under the linear-interpolation quantile convention.
pub fn ci_bmm(sample: &Sample, config: &CIConfig) -> Result<CIResult> {
    ci_bmm_impl(sample, config, false)
}

/// Same as [`ci_bmm`] but retains the replicate estimates.
pub fn ci_bmm_retaining(sample: &Sample, config: &CIConfig) -> Result<CIResult> {
    ci_bmm_impl(sample, config, true)
}

/// Tally of interval coverage over repeated data draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageReport {
    pub nominal: f64,
    pub empirical: f64,
    pub n_draws: usize,
    /// Draws where the truth fell below the interval.
    pub misses_low: usize,
    /// Draws where the truth fell above the interval.
    pub misses_high: usize,
}

/// Draws `n_draws` fresh datasets, builds an interval for each, and counts
/// misses by side against the distribution's exact mean.
pub fn coverage_experiment(
    dist: &DistributionSpec,
    n: usize,
    config: &CIConfig,
    n_draws: usize,
    seed: u64,
) -> Result<CoverageReport> {
    config.validate()?;
    if n_draws == 0 {
        return Err(Error::ConfigError("need at least 1 draw".into()));
    }
    let theta = dist.true_mean()?;
    let data_root = derive_seed(seed, COVERAGE_DATA_TAG);
    let ci_root = derive_seed(seed, COVERAGE_CI_TAG);
    let sides: Vec<(u8, u8)> = (0..n_draws)
        .into_par_iter()
        .map(|r| -> Result<(u8, u8)> {
            let data = sample_distribution(dist, n, &derive_substream(data_root, r as u64))?;
            let mut cfg = *config;
            cfg.seed = derive_seed(ci_root, r as u64);
            let ci = ci_bmm(&data, &cfg)?;
            Ok((u8::from(theta < ci.lower), u8::from(theta > ci.upper)))
        })
        .collect::<Result<_>>()?;
    let misses_low = sides.iter().map(|&(l, _)| l as usize).sum();
    let misses_high = sides.iter().map(|&(_, h)| h as usize).sum();
    Ok(CoverageReport {
        nominal: 1.0 - config.level_complement,
        empirical: 1.0 - (misses_low + misses_high) as f64 / n_draws as f64,
        n_draws,
        misses_low,
        misses_high,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample_collapses() {
        let s = Sample::new(vec![3.0; 10]).unwrap();
        let ci = ci_bmm(&s, &CIConfig::default_for(10, 7)).unwrap();
        assert_eq!((ci.lower, ci.upper, ci.point_estimate), (3.0, 3.0, 3.0));
    }

    #[test]
    fn deterministic_and_ordered() {
        let s = Sample::new(vec![1.0, 5.0, 2.0, 8.0, 3.0, 9.0, 4.0, 2.5]).unwrap();
        let cfg = CIConfig {
            replicates: 200,
            ..CIConfig::default_for(8, 11)
        };
        let a = ci_bmm(&s, &cfg).unwrap();
        let b = ci_bmm(&s, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.lower <= a.upper);
        assert!(a.lower >= s.min() && a.upper <= s.max());
        assert!(a.point_estimate >= s.min() && a.point_estimate <= s.max());
    }

    #[test]
    fn wider_level_complement_narrows_the_interval() {
        let s = Sample::new((0..40).map(|i| (i as f64).sin() * 3.0 + i as f64 / 7.0).collect())
            .unwrap();
        let mut cfg = CIConfig::default_for(40, 5);
        cfg.replicates = 400;
        let wide = ci_bmm(&s, &cfg).unwrap();
        cfg.level_complement = 0.2;
        let narrow = ci_bmm(&s, &cfg).unwrap();
        assert!(narrow.upper - narrow.lower <= wide.upper - wide.lower);
        assert!(narrow.lower >= wide.lower && narrow.upper <= wide.upper);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let s = Sample::new(vec![1.0, 2.0]).unwrap();
        let mut cfg = CIConfig::default_for(2, 0);
        cfg.replicates = 1;
        assert!(ci_bmm(&s, &cfg).is_err());
        let mut cfg = CIConfig::default_for(2, 0);
        cfg.level_complement = 1.0;
        assert!(ci_bmm(&s, &cfg).is_err());
    }

    #[test]
    fn single_draw_coverage_is_zero_or_one() {
        let dist = DistributionSpec::Normal { mean: 0.0, sd: 1.0 };
        let cfg = CIConfig {
            replicates: 100,
            ..CIConfig::default_for(30, 3)
        };
        let rep = coverage_experiment(&dist, 30, &cfg, 1, 17).unwrap();
        assert!(rep.empirical == 0.0 || rep.empirical == 1.0);
        assert_eq!(
            rep.empirical,
            1.0 - (rep.misses_low + rep.misses_high) as f64
        );
    }
}
