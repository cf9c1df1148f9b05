//! Point estimators for a location parameter.
//!
//! The centerpiece is the Bayesian median of means: draw J weight vectors
//! from a symmetric Dirichlet, form the weighted averages of the sample, and
//! return their median. Small concentrations push the estimate toward the
//! sample median, large ones toward the sample mean. The closed-form
//! approximation `abmm` applies the first-order skewness correction directly,
//! with no sampling at all.

use rayon::prelude::*;

use crate::dirichlet::{sample_weights, weighted_mean};
use crate::error::{Error, Result};
use crate::rng::derive_substream;
use crate::sample::{summary_stats, EstimateReport, EstimatorConfig, Method, Sample};
use crate::stats::median_in_place;

/// Parallelize the weighted-average loop above this many draws.
const PAR_DRAWS_THRESHOLD: usize = 4096;

/// Arithmetic mean of the sample.
pub fn sample_mean(sample: &Sample) -> f64 {
    sample.values().iter().sum::<f64>() / sample.len() as f64
}

/// Median of a slice without reordering the caller's data.
///
/// Odd lengths return the middle order statistic, even lengths the average
/// of the two middle order statistics.
pub fn sample_median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut scratch = values.to_vec();
    Ok(median_in_place(&mut scratch))
}

fn resampled_means(sample: &Sample, config: &EstimatorConfig) -> Result<Vec<f64>> {
    let n = sample.len();
    let draw = |j: usize| -> Result<f64> {
        let stream = derive_substream(config.seed, j as u64);
        let weights = sample_weights(n, config.alpha, &stream)?;
        weighted_mean(&weights, sample)
    };
    if config.draws >= PAR_DRAWS_THRESHOLD {
        (0..config.draws).into_par_iter().map(draw).collect()
    } else {
        (0..config.draws).map(draw).collect()
    }
}

fn bmm_impl(sample: &Sample, config: &EstimatorConfig, keep_means: bool) -> Result<EstimateReport> {
    config.validate()?;
    if sample.is_constant() {
        let c = sample.values()[0];
        return Ok(EstimateReport {
            estimate: c,
            method: Method::Bmm,
            config_echo: Some(*config),
            resampled_means: keep_means.then(|| vec![c; config.draws]),
        });
    }
    let mut means = resampled_means(sample, config)?;
    let estimate = if keep_means {
        let mut scratch = means.clone();
        median_in_place(&mut scratch)
    } else {
        median_in_place(&mut means)
    };
    Ok(EstimateReport {
        estimate,
        method: Method::Bmm,
        config_echo: Some(*config),
        resampled_means: keep_means.then_some(means),
    })
}

/// Bayesian median of means: the median of `config.draws` Dirichlet-weighted
/// averages of the sample.
///
/// Deterministic in `(sample, config)`: weight vector j always comes from
/// substream j of the config seed, so the result does not depend on how the
/// draws are scheduled.
pub fn bmm(sample: &Sample, config: &EstimatorConfig) -> Result<EstimateReport> {
    bmm_impl(sample, config, false)
}

/// Same as [`bmm`] but retains the resampled averages in the report.
pub fn bmm_retaining_means(sample: &Sample, config: &EstimatorConfig) -> Result<EstimateReport> {
    bmm_impl(sample, config, true)
}

/// Approximate Bayesian median of means: the sample mean shifted by the
/// first-order skewness correction
/// `mean - sqrt(s^2) * skew / (3 (n alpha + 2))`.
///
/// Exactly the sample mean whenever the sample skewness is zero.
pub fn abmm(sample: &Sample, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::ConfigError(format!(
            "alpha must be a positive real, got {alpha}"
        )));
    }
    let stats = summary_stats(sample);
    if stats.variance_biased == 0.0 {
        return Ok(stats.mean);
    }
    let n_alpha = sample.len() as f64 * alpha;
    // sqrt(s^2) * skew = m3 / s^2
    let correction = stats.variance_biased.sqrt() * stats.skewness / (3.0 * (n_alpha + 2.0));
    Ok(stats.mean - correction)
}

/// Classical median of means over `groups` consecutive blocks.
///
/// When the sample does not split evenly, the leading `n mod groups` blocks
/// take one extra element. The split follows the input order, so this
/// estimator is not permutation invariant.
pub fn median_of_means(sample: &Sample, groups: usize) -> Result<f64> {
    let n = sample.len();
    if groups == 0 || groups > n {
        return Err(Error::ConfigError(format!(
            "groups must be in 1..={n}, got {groups}"
        )));
    }
    let base = n / groups;
    let extra = n % groups;
    let mut block_means = Vec::with_capacity(groups);
    let mut start = 0;
    for g in 0..groups {
        let len = base + usize::from(g < extra);
        let block = &sample.values()[start..start + len];
        block_means.push(block.iter().sum::<f64>() / len as f64);
        start += len;
    }
    Ok(median_in_place(&mut block_means))
}

/// Hodges-Lehmann estimator: the median of all n(n-1)/2 pairwise averages
/// with distinct indices.
pub fn hodges_lehmann(sample: &Sample) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::ConfigError(
            "hodges_lehmann needs at least 2 values".into(),
        ));
    }
    let values = sample.values();
    let mut averages = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            averages.push((values[i] + values[j]) / 2.0);
        }
    }
    Ok(median_in_place(&mut averages))
}

/// Dispatches a method tag to its estimator. `mm_groups` only matters for
/// [`Method::Mm`].
pub fn point_estimate(
    method: Method,
    sample: &Sample,
    config: &EstimatorConfig,
    mm_groups: usize,
) -> Result<f64> {
    match method {
        Method::Mean => Ok(sample_mean(sample)),
        Method::Median => sample_median(sample.values()),
        Method::Bmm => Ok(bmm(sample, config)?.estimate),
        Method::Abmm => abmm(sample, config.alpha),
        Method::Mm => median_of_means(sample, mm_groups),
        Method::Hl => hodges_lehmann(sample),
    }
}
