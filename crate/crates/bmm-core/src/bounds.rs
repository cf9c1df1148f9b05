//! Closed-form bound calculators and the Monte-Carlo experiments that
//! check them empirically.
//!
//! Calculators are pure formula evaluations; the experiment functions run
//! seeded, paired simulations and wrap the outcome in a [`BoundReport`]
//! whose `satisfied` flag compares the empirical value against the bound
//! with a three-standard-error allowance.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{
    conditional_median, conditional_variance, density_y, DensitySpec, QuadratureConfig,
};
use crate::distributions::{sample_distribution, DistributionSpec};
use crate::error::{Error, Result};
use crate::estimators::{bmm, sample_mean};
use crate::rng::{derive_seed, derive_substream};
use crate::sample::{summary_stats, EstimatorConfig, Sample};
use crate::stats::{correlation, mean};

/// Outcome of one empirical-versus-bound experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_value: f64,
    pub empirical_value: f64,
    pub n_trials: usize,
    pub satisfied: bool,
    pub standard_error: f64,
}

impl BoundReport {
    pub fn new(bound_value: f64, empirical_value: f64, n_trials: usize, standard_error: f64) -> Self {
        Self {
            bound_value,
            empirical_value,
            n_trials,
            satisfied: empirical_value <= bound_value + 3.0 * standard_error,
            standard_error,
        }
    }
}

/// Upper bound on |median - mean| for any law with standard deviation
/// `sigma`: the gap never exceeds one standard deviation.
pub fn mean_median_gap_bound(sigma: f64) -> f64 {
    sigma
}

/// Sharper gap bound available under exponential concentration
/// `P[|X - med| > t] <= a e^{-t^2 / b}`: `min(sqrt(ab), a sqrt(pi b) / 2)`.
pub fn exp_concentration_gap_bound(a: f64, b: f64) -> f64 {
    (a * b).sqrt().min(a * (std::f64::consts::PI * b).sqrt() / 2.0)
}

/// Deviation bound for the median of means with `n` points split into
/// groups: with probability `1 - delta` the estimate is within
/// `6 sigma sqrt(log(1/delta) / n)` of the mean.
pub fn mm_deviation_bound(sigma: f64, n: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::ConfigError(format!(
            "delta must be in (0, 1], got {delta}"
        )));
    }
    if sigma < 0.0 || n == 0 {
        return Err(Error::ConfigError("need sigma >= 0 and n >= 1".into()));
    }
    Ok(6.0 * sigma * ((1.0 / delta).ln() / n as f64).sqrt())
}

/// Small-deviation tail bound for the sampled median around the population
/// median: `2 exp(-2 J t^2 C^2)`, with `C` a floor on the density over the
/// deviation window. Reported raw; it exceeds one for small `t`.
pub fn bmm_small_t_bound(draws: usize, t: f64, c: f64) -> f64 {
    2.0 * (-2.0 * draws as f64 * t * t * c * c).exp()
}

/// Large-deviation tail bound `(4 sqrt(V) / t)^{J/2}`, valid for
/// `t > 2 sqrt(V)` where `V` is the conditional variance of the weighted
/// mean.
pub fn bmm_large_t_bound(draws: usize, t: f64, cond_var: f64) -> Result<f64> {
    if cond_var < 0.0 {
        return Err(Error::ConfigError("variance must be nonnegative".into()));
    }
    let sd = cond_var.sqrt();
    if t <= 2.0 * sd {
        return Err(Error::DomainError(format!(
            "large-t bound requires t > 2 sqrt(V) = {}",
            2.0 * sd
        )));
    }
    Ok((4.0 * sd / t).powf(draws as f64 / 2.0))
}

/// Bound on |median(Y) - theta| over both data and weights:
/// `sqrt((sigma2 / n) * n (alpha + 1) / (n alpha + 1))`.
pub fn median_bias_bound_unconditional(sigma2: f64, n: usize, alpha: f64) -> f64 {
    (sigma2 * (alpha + 1.0) / (n as f64 * alpha + 1.0)).sqrt()
}

/// Bound on |median(Y | sample) - sample mean|: `sqrt(s^2 / (n alpha + 1))`.
pub fn median_bias_bound_conditional(sample: &Sample, alpha: f64) -> f64 {
    let s2 = summary_stats(sample).variance_biased;
    (s2 / (sample.len() as f64 * alpha + 1.0)).sqrt()
}

/// Both median-bias bounds for one sample, using `sigma2` for the
/// unconditional part.
pub fn median_bias_bounds(sample: &Sample, sigma2: f64, alpha: f64) -> (f64, f64) {
    (
        median_bias_bound_unconditional(sigma2, sample.len(), alpha),
        median_bias_bound_conditional(sample, alpha),
    )
}

/// Total bias bound for the sampled-median estimator:
/// `sqrt(pi / 2J) / c_tilde + (2 / (J - 2)) 4 n^{-J/4} sigma / sqrt(alpha)
///  + sqrt(sigma2 / (n alpha + 1))`, requiring `J > 2`.
pub fn bias_bound_total(
    draws: usize,
    n: usize,
    alpha: f64,
    sigma2: f64,
    c_tilde: f64,
) -> Result<f64> {
    if draws <= 2 {
        return Err(Error::DomainError(format!(
            "bias bound requires J > 2, got {draws}"
        )));
    }
    if !(c_tilde > 0.0) || !(alpha > 0.0) || sigma2 < 0.0 || n == 0 {
        return Err(Error::ConfigError(
            "need c_tilde > 0, alpha > 0, sigma2 >= 0, n >= 1".into(),
        ));
    }
    let j = draws as f64;
    let sigma = sigma2.sqrt();
    let first = (std::f64::consts::PI / (2.0 * j)).sqrt() / c_tilde;
    let second = 2.0 / (j - 2.0) * 4.0 * (n as f64).powf(-j / 4.0) * sigma / alpha.sqrt();
    let third = (sigma2 / (n as f64 * alpha + 1.0)).sqrt();
    Ok(first + second + third)
}

/// Density floor `C`: the minimum of the weighted-mean density over
/// `[center - half_width, center + half_width]` on a 101-point grid,
/// clipped to the open support. Grid points that collide with sample atoms
/// are skipped.
pub fn density_floor_constant(
    spec: &DensitySpec,
    center: f64,
    half_width: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let (lo, hi) = spec.support();
    let pad = quad.singularity_clip.max(1e-12 * (hi - lo));
    let a = (center - half_width).max(lo + pad);
    let b = (center + half_width).min(hi - pad);
    if !(a < b) {
        return Err(Error::ConfigError(
            "density window does not intersect the support".into(),
        ));
    }
    let mut floor = f64::INFINITY;
    let mut evaluated = 0usize;
    for k in 0..=100 {
        let y = a + (b - a) * k as f64 / 100.0;
        match density_y(spec, y, quad) {
            Ok(f) => {
                floor = floor.min(f);
                evaluated += 1;
            }
            Err(Error::AtomError(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    if evaluated == 0 {
        return Err(Error::QuadratureError(
            "no valid grid points for the density floor".into(),
        ));
    }
    Ok(floor)
}

fn bmm_trials(
    sample: &Sample,
    alpha: f64,
    draws: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|r| {
            let cfg = EstimatorConfig {
                alpha,
                draws,
                seed: derive_seed(seed, r as u64),
            };
            bmm(sample, &cfg).map(|rep| rep.estimate)
        })
        .collect()
}

/// Compares the sampling variance of the estimator across repeated runs on
/// one fixed sample with the asymptotic prediction `1 / (4 J f(m)^2)`.
pub fn median_clt_check(
    sample: &Sample,
    alpha: f64,
    draws: usize,
    trials: usize,
    seed: u64,
) -> Result<BoundReport> {
    if trials < 2 {
        return Err(Error::ConfigError("need at least 2 trials".into()));
    }
    if sample.is_constant() {
        return Ok(BoundReport::new(0.0, 0.0, trials, 0.0));
    }
    let quad = QuadratureConfig::default();
    let spec = DensitySpec::new(sample.clone(), alpha)?;
    let m = conditional_median(sample, alpha)?.value;
    let f_m = density_y(&spec, m, &quad)?;
    if f_m <= 0.0 {
        return Err(Error::NumericalError("zero density at the median".into()));
    }
    let theory = 1.0 / (4.0 * draws as f64 * f_m * f_m);
    let estimates = bmm_trials(sample, alpha, draws, trials, seed)?;
    let center = mean(&estimates);
    let emp_var = estimates.iter().map(|e| (e - center).powi(2)).sum::<f64>()
        / (trials - 1) as f64;
    // variance of a sample variance under approximate normality
    let se = emp_var * (2.0 / (trials as f64 - 1.0)).sqrt();
    Ok(BoundReport::new(theory, emp_var, trials, se))
}

/// Empirical tail frequency of |estimate - m| > t across repeated runs on a
/// fixed sample, reported against [`bmm_small_t_bound`]. `density_floor`
/// overrides the grid-search construction of the constant `C`.
pub fn bmm_small_t_experiment(
    sample: &Sample,
    alpha: f64,
    draws: usize,
    t: f64,
    trials: usize,
    density_floor: Option<f64>,
    seed: u64,
) -> Result<BoundReport> {
    let m = conditional_median(sample, alpha)?.value;
    let c = match density_floor {
        Some(c) => c,
        None => {
            let spec = DensitySpec::new(sample.clone(), alpha)?;
            density_floor_constant(&spec, m, t, &QuadratureConfig::default())?
        }
    };
    let bound = bmm_small_t_bound(draws, t, c);
    let estimates = bmm_trials(sample, alpha, draws, trials, seed)?;
    let hits = estimates.iter().filter(|e| (*e - m).abs() > t).count();
    let freq = hits as f64 / trials as f64;
    let se = (freq * (1.0 - freq) / trials as f64).sqrt();
    Ok(BoundReport::new(bound, freq, trials, se))
}

/// Same experiment against the large-deviation bound
/// [`bmm_large_t_bound`].
pub fn bmm_large_t_experiment(
    sample: &Sample,
    alpha: f64,
    draws: usize,
    t: f64,
    trials: usize,
    seed: u64,
) -> Result<BoundReport> {
    let cond_var = conditional_variance(sample, alpha)?;
    let bound = bmm_large_t_bound(draws, t, cond_var)?;
    let m = conditional_median(sample, alpha)?.value;
    let estimates = bmm_trials(sample, alpha, draws, trials, seed)?;
    let hits = estimates.iter().filter(|e| (*e - m).abs() > t).count();
    let freq = hits as f64 / trials as f64;
    let se = (freq * (1.0 - freq) / trials as f64).sqrt();
    Ok(BoundReport::new(bound, freq, trials, se))
}

/// Frequency of |median of means - true mean| exceeding
/// [`mm_deviation_bound`] over fresh datasets; the report compares that
/// frequency against `delta`.
pub fn mm_deviation_experiment(
    dist: &DistributionSpec,
    n: usize,
    groups: usize,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<BoundReport> {
    let theta = dist.true_mean()?;
    let sigma = dist.true_variance()?.sqrt();
    let bound = mm_deviation_bound(sigma, n, delta)?;
    let data_root = derive_seed(seed, 0x21);
    let hits: Vec<u8> = (0..trials)
        .into_par_iter()
        .map(|r| -> Result<u8> {
            let data = sample_distribution(dist, n, &derive_substream(data_root, r as u64))?;
            let est = crate::estimators::median_of_means(&data, groups)?;
            Ok(u8::from((est - theta).abs() > bound))
        })
        .collect::<Result<_>>()?;
    let freq = hits.iter().map(|&h| h as f64).sum::<f64>() / trials as f64;
    let se = (freq * (1.0 - freq) / trials as f64).sqrt();
    Ok(BoundReport::new(delta, freq, trials, se))
}

/// Paired Monte-Carlo decomposition of the estimator's squared error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MSEIdentityReport {
    /// Mean squared error of the weighted-median estimator against the truth.
    pub lhs: f64,
    /// Mean squared error of the plain sample mean.
    pub mse_mean: f64,
    /// Mean squared gap between the two estimators.
    pub discrepancy: f64,
    /// Correlation between the two estimators across replications.
    pub correlation: f64,
    pub var_mean: f64,
    pub var_p: f64,
    /// `lhs - [mse_mean + discrepancy - 2 var_mean (1 - corr sqrt(var_p / var_mean))]`;
    /// zero in expectation.
    pub identity_residual: f64,
    pub residual_se: f64,
    pub n_trials: usize,
}

fn identity_residual(
    theta: f64,
    est_p: &[f64],
    est_mean: &[f64],
) -> (f64, f64, f64, f64, f64, f64, f64) {
    let n = est_p.len() as f64;
    let lhs = est_p.iter().map(|e| (e - theta).powi(2)).sum::<f64>() / n;
    let mse_mean = est_mean.iter().map(|e| (e - theta).powi(2)).sum::<f64>() / n;
    let discrepancy = est_p
        .iter()
        .zip(est_mean)
        .map(|(p, m)| (p - m).powi(2))
        .sum::<f64>()
        / n;
    let mp = mean(est_p);
    let mm = mean(est_mean);
    let var_p = est_p.iter().map(|e| (e - mp).powi(2)).sum::<f64>() / n;
    let var_mean = est_mean.iter().map(|e| (e - mm).powi(2)).sum::<f64>() / n;
    let rho = correlation(est_p, est_mean);
    let rhs = mse_mean + discrepancy
        - 2.0 * var_mean * (1.0 - rho * (var_p / var_mean).sqrt());
    (lhs, mse_mean, discrepancy, rho, var_mean, var_p, lhs - rhs)
}

/// Runs `trials` paired replications (same data for both estimators) and
/// reports the exact mean-squared-error decomposition with its Monte-Carlo
/// residual and a batch-based standard error.
pub fn mse_identity_experiment(
    dist: &DistributionSpec,
    n: usize,
    alpha: f64,
    draws: usize,
    trials: usize,
    seed: u64,
) -> Result<MSEIdentityReport> {
    if trials < 50 {
        return Err(Error::ConfigError("need at least 50 trials".into()));
    }
    let theta = dist.true_mean()?;
    let data_root = derive_seed(seed, 0x22);
    let weight_root = derive_seed(seed, 0x23);
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|r| -> Result<(f64, f64)> {
            let data = sample_distribution(dist, n, &derive_substream(data_root, r as u64))?;
            let cfg = EstimatorConfig {
                alpha,
                draws,
                seed: derive_seed(weight_root, r as u64),
            };
            let p = bmm(&data, &cfg)?.estimate;
            Ok((p, sample_mean(&data)))
        })
        .collect::<Result<_>>()?;
    let est_p: Vec<f64> = pairs.iter().map(|&(p, _)| p).collect();
    let est_mean: Vec<f64> = pairs.iter().map(|&(_, m)| m).collect();
    let (lhs, mse_mean, discrepancy, rho, var_mean, var_p, residual) =
        identity_residual(theta, &est_p, &est_mean);

    // batch-means standard error for the residual
    let batches = 25usize.min(trials / 2);
    let batch_len = trials / batches;
    let mut batch_residuals = Vec::with_capacity(batches);
    for b in 0..batches {
        let lo = b * batch_len;
        let hi = if b + 1 == batches { trials } else { lo + batch_len };
        let (.., r) = identity_residual(theta, &est_p[lo..hi], &est_mean[lo..hi]);
        batch_residuals.push(r);
    }
    let bm = mean(&batch_residuals);
    let bvar = batch_residuals.iter().map(|r| (r - bm).powi(2)).sum::<f64>()
        / (batches as f64 - 1.0);
    let residual_se = (bvar / batches as f64).sqrt();

    Ok(MSEIdentityReport {
        lhs,
        mse_mean,
        discrepancy,
        correlation: rho,
        var_mean,
        var_p,
        identity_residual: residual,
        residual_se,
        n_trials: trials,
    })
}
