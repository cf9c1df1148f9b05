//! Distribution theory for the Dirichlet-weighted mean of a fixed sample.
//!
//! For weights from a symmetric Dirichlet with concentration `alpha`, the
//! weighted mean `Y` of the sample values has computable conditional moments
//! (a one-dimensional recursion), and for certain concentrations an explicit
//! density:
//!
//! - `alpha = 1/n`: closed form
//!   `f(y) = sin(pi alpha #{theta_i < y}) / pi * prod |theta_i - y|^{-alpha}`.
//! - `1/n < alpha < 1`: a real integral of a signed singular integrand over
//!   `(-inf, y]`, evaluated here by adaptive quadrature with analytic
//!   handling of the integrable endpoint singularities.
//!
//! Other concentrations have no implemented formula; the conditional median
//! then falls back to Monte Carlo over the weight distribution.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::dirichlet::{sample_weights, weighted_mean};
use crate::error::{Error, Result};
use crate::quad::{integrate_panel, Budget};
use crate::rng::derive_substream;
use crate::sample::{summary_stats, Sample};
use crate::stats::median_with_se;

/// Tolerances and budgets for density/CDF quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Absolute tolerance for each integral evaluation.
    pub abs_tol: f64,
    /// Cap on adaptive subdivisions per top-level evaluation.
    pub max_subdivisions: usize,
    /// Half-width of the exclusion window around each singular point; the
    /// excluded mass is restored from the local power-law exponent.
    pub singularity_clip: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            max_subdivisions: 10_000,
            singularity_clip: 1e-10,
        }
    }
}

/// Which density formula applies for a given `(n, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DensityBranch {
    ClosedFormAlphaEqualsOneOverN,
    RealIntegralBranch,
    Unsupported,
}

/// A sample with its atoms grouped and the applicable density branch.
#[derive(Debug, Clone)]
pub struct DensitySpec {
    sample: Sample,
    alpha: f64,
    branch: DensityBranch,
    /// Distinct sample values in increasing order with multiplicities.
    atoms: Vec<(f64, usize)>,
}

impl DensitySpec {
    pub fn new(sample: Sample, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::ConfigError(format!(
                "alpha must be a positive real, got {alpha}"
            )));
        }
        if sample.is_constant() {
            return Err(Error::ConfigError(
                "the weighted mean of a constant sample is degenerate".into(),
            ));
        }
        let n = sample.len();
        let recip = 1.0 / n as f64;
        let branch = if (alpha - recip).abs() < 1e-12 {
            DensityBranch::ClosedFormAlphaEqualsOneOverN
        } else if alpha > recip && alpha < 1.0 {
            DensityBranch::RealIntegralBranch
        } else {
            DensityBranch::Unsupported
        };
        let mut sorted = sample.values().to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let mut atoms: Vec<(f64, usize)> = Vec::new();
        for v in sorted {
            match atoms.last_mut() {
                Some((a, k)) if *a == v => *k += 1,
                _ => atoms.push((v, 1)),
            }
        }
        Ok(Self {
            sample,
            alpha,
            branch,
            atoms,
        })
    }

    pub fn branch(&self) -> DensityBranch {
        self.branch
    }

    pub fn supported(&self) -> bool {
        self.branch != DensityBranch::Unsupported
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sample(&self) -> &Sample {
        &self.sample
    }

    pub fn support(&self) -> (f64, f64) {
        (self.atoms[0].0, self.atoms[self.atoms.len() - 1].0)
    }

    fn n_alpha(&self) -> f64 {
        self.sample.len() as f64 * self.alpha
    }

    /// Exponent of the density near an atom of multiplicity `mult`:
    /// the combined weight of the other atoms behaves like a
    /// Beta(alpha (n - mult), alpha mult) coordinate near zero.
    fn atom_exponent(&self, mult: usize) -> f64 {
        self.alpha * (self.sample.len() - mult) as f64 - 1.0
    }
}

/// Conditional moment `E[Y^m | sample]` via the Dirichlet-mean recursion
///
/// `E[Y^m] = sum_{k<m} Gamma(na+k)/Gamma(na+m) * (m-1)!/k! * E[Y^k] * alpha S_{m-k}`
///
/// with `S_q` the power sums of the sample. Gamma ratios are evaluated in
/// log space so large `n alpha` stays finite. Orders above 12 are rejected.
pub fn conditional_moment(sample: &Sample, alpha: f64, m: usize) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::ConfigError(format!(
            "alpha must be a positive real, got {alpha}"
        )));
    }
    if m > 12 {
        return Err(Error::UnsupportedOrder(m));
    }
    if m == 0 {
        return Ok(1.0);
    }
    let n_alpha = sample.len() as f64 * alpha;
    let mut power_sums = vec![0.0; m + 1];
    for &v in sample.values() {
        let mut p = 1.0;
        for q in 1..=m {
            p *= v;
            power_sums[q] += p;
        }
    }
    let mut moments = vec![0.0; m + 1];
    moments[0] = 1.0;
    for order in 1..=m {
        let lg_denom = ln_gamma(n_alpha + order as f64);
        let mut acc = 0.0;
        for k in 0..order {
            let gamma_ratio = (ln_gamma(n_alpha + k as f64) - lg_denom).exp();
            // (order-1)! / k! as an exact small product
            let falling: f64 = ((k + 1)..order).map(|i| i as f64).product();
            acc += gamma_ratio * falling * moments[k] * alpha * power_sums[order - k];
        }
        moments[order] = acc;
    }
    Ok(moments[m])
}

/// Conditional variance `V[Y | sample] = s^2 / (n alpha + 1)` with `s^2` the
/// 1/n sample variance.
pub fn conditional_variance(sample: &Sample, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::ConfigError(format!(
            "alpha must be a positive real, got {alpha}"
        )));
    }
    let s2 = summary_stats(sample).variance_biased;
    Ok(s2 / (sample.len() as f64 * alpha + 1.0))
}

/// Conditional skewness of the weighted mean, from the moment recursion.
pub fn conditional_skewness(sample: &Sample, alpha: f64) -> Result<f64> {
    let m1 = conditional_moment(sample, alpha, 1)?;
    let m2 = conditional_moment(sample, alpha, 2)?;
    let m3 = conditional_moment(sample, alpha, 3)?;
    let var = m2 - m1 * m1;
    if var <= 0.0 {
        return Ok(0.0);
    }
    Ok((m3 - 3.0 * m1 * var - m1.powi(3)) / var.powf(1.5))
}

/// Variance of the weighted mean when the data themselves are drawn with
/// variance `sigma2`: `(sigma2 / n) * n (alpha + 1) / (n alpha + 1)`.
///
/// Approaches `sigma2` as `alpha -> 0` and `sigma2 / n` as `alpha -> inf`.
pub fn unconditional_variance(sigma2: f64, n: usize, alpha: f64) -> f64 {
    sigma2 * (alpha + 1.0) / (n as f64 * alpha + 1.0)
}

fn closed_form_density(spec: &DensitySpec, y: f64) -> f64 {
    let alpha = spec.alpha;
    let mut count = 0usize;
    let mut log_prod = 0.0;
    for &(a, k) in &spec.atoms {
        if y > a {
            count += k;
        }
        log_prod += k as f64 * (a - y).abs().ln();
    }
    let s = (std::f64::consts::PI * alpha * count as f64).sin();
    (s / std::f64::consts::PI) * (-alpha * log_prod).exp()
}

/// Signed integrand of the real-integral branch at inner variable `s`.
fn real_branch_integrand(spec: &DensitySpec, y: f64, s: f64) -> f64 {
    let alpha = spec.alpha;
    let n_alpha = spec.n_alpha();
    let mut count = 0usize;
    let mut log_prod = 0.0;
    for &(a, k) in &spec.atoms {
        if s >= a {
            count += k;
        }
        if a != s {
            log_prod += k as f64 * (a - s).abs().ln();
        }
    }
    let angle = (std::f64::consts::PI * alpha * count as f64).sin();
    if angle == 0.0 {
        return 0.0;
    }
    let magnitude = (n_alpha - 2.0) * (y - s).ln() - alpha * log_prod;
    (n_alpha - 1.0) / std::f64::consts::PI * angle * magnitude.exp()
}

fn real_branch_density(spec: &DensitySpec, y: f64, quad: &QuadratureConfig) -> Result<f64> {
    let alpha = spec.alpha;
    let n_alpha = spec.n_alpha();
    // singular points: every atom below y, then y itself
    let mut points: Vec<(f64, f64)> = spec
        .atoms
        .iter()
        .filter(|(a, _)| *a < y)
        .map(|&(a, k)| (a, -alpha * k as f64))
        .collect();
    points.push((y, n_alpha - 2.0));
    let f = |s: f64| real_branch_integrand(spec, y, s);
    let mut budget = Budget::new(quad.max_subdivisions);
    let panel_tol = quad.abs_tol / points.len() as f64;
    let mut total = 0.0;
    for w in points.windows(2) {
        let (a, exp_a) = w[0];
        let (b, exp_b) = w[1];
        total += integrate_panel(
            &f,
            a,
            b,
            exp_a,
            exp_b,
            panel_tol,
            quad.singularity_clip,
            &mut budget,
        )?;
    }
    Ok(total)
}

/// Density of the weighted mean at `y`, for a supported branch.
///
/// Returns 0 outside the support. Evaluation at (or within the clip window
/// of) a sample value is rejected, since the density is singular there.
pub fn density_y(spec: &DensitySpec, y: f64, quad: &QuadratureConfig) -> Result<f64> {
    if let Some(&(a, _)) = spec
        .atoms
        .iter()
        .find(|(a, _)| (a - y).abs() < quad.singularity_clip)
    {
        return Err(Error::AtomError(a));
    }
    let (lo, hi) = spec.support();
    if y <= lo || y >= hi {
        return Ok(0.0);
    }
    match spec.branch {
        DensityBranch::ClosedFormAlphaEqualsOneOverN => Ok(closed_form_density(spec, y)),
        DensityBranch::RealIntegralBranch => {
            Ok(real_branch_density(spec, y, quad)?.max(0.0))
        }
        DensityBranch::Unsupported => Err(Error::UnsupportedAlpha {
            alpha: spec.alpha,
            n: spec.sample.len(),
        }),
    }
}

/// CDF of the weighted mean at `y`: the density integrated from the support
/// minimum, clamped to [0, 1].
pub fn cdf_y(spec: &DensitySpec, y: f64, quad: &QuadratureConfig) -> Result<f64> {
    if !spec.supported() {
        return Err(Error::UnsupportedAlpha {
            alpha: spec.alpha,
            n: spec.sample.len(),
        });
    }
    let (lo, hi) = spec.support();
    if y <= lo {
        return Ok(0.0);
    }
    if y >= hi {
        return Ok(1.0);
    }
    // panel boundaries: atoms up to y, then y itself (a regular endpoint)
    let mut points: Vec<(f64, f64)> = spec
        .atoms
        .iter()
        .filter(|(a, _)| *a < y)
        .map(|&(a, k)| (a, spec.atom_exponent(k)))
        .collect();
    points.push((y, 0.0));
    let f = |u: f64| match density_y(spec, u, quad) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    };
    let mut budget = Budget::new(quad.max_subdivisions);
    let panel_tol = quad.abs_tol / points.len() as f64;
    let mut total = 0.0;
    for w in points.windows(2) {
        let (a, exp_a) = w[0];
        let (b, exp_b) = w[1];
        total += integrate_panel(
            &f,
            a,
            b,
            exp_a,
            exp_b,
            panel_tol,
            quad.singularity_clip,
            &mut budget,
        )?;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Simulates weighted means of a fixed sample over fresh weight draws.
///
/// Draw `t` always uses substream `t` of `seed`, so the output is identical
/// regardless of parallel scheduling.
pub fn simulate_conditional_means(
    sample: &Sample,
    alpha: f64,
    draws: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::ConfigError(format!(
            "alpha must be a positive real, got {alpha}"
        )));
    }
    let n = sample.len();
    let one = |t: usize| -> Result<f64> {
        let stream = derive_substream(seed, t as u64);
        let w = sample_weights(n, alpha, &stream)?;
        weighted_mean(&w, sample)
    };
    if draws >= 4096 {
        (0..draws).into_par_iter().map(one).collect()
    } else {
        (0..draws).map(one).collect()
    }
}

/// Median of the weighted-mean distribution given the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalMedian {
    pub value: f64,
    /// Standard error of the estimate when it came from Monte Carlo.
    pub standard_error: Option<f64>,
    pub monte_carlo: bool,
}

/// Number of weight draws used by the Monte-Carlo fallback.
pub const MEDIAN_FALLBACK_DRAWS: usize = 1_000_000;
/// Fixed internal seed so the fallback is deterministic in (sample, alpha).
const MEDIAN_FALLBACK_SEED: u64 = 0x00C0_FFEE_5EED_0001;

/// Conditional median of the weighted mean.
///
/// Supported density branches solve `cdf(y) = 1/2` by bisection to 1e-10 of
/// the support range; anything else (including quadrature failure on
/// pathological atom configurations) falls back to the median of
/// [`MEDIAN_FALLBACK_DRAWS`] simulated weighted means, reported with a
/// standard error. Constant samples return the constant.
pub fn conditional_median(sample: &Sample, alpha: f64) -> Result<ConditionalMedian> {
    conditional_median_with(
        sample,
        alpha,
        &QuadratureConfig::default(),
        MEDIAN_FALLBACK_DRAWS,
    )
}

/// [`conditional_median`] with explicit quadrature settings and fallback
/// draw count.
pub fn conditional_median_with(
    sample: &Sample,
    alpha: f64,
    quad: &QuadratureConfig,
    fallback_draws: usize,
) -> Result<ConditionalMedian> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::ConfigError(format!(
            "alpha must be a positive real, got {alpha}"
        )));
    }
    if sample.is_constant() {
        return Ok(ConditionalMedian {
            value: sample.values()[0],
            standard_error: None,
            monte_carlo: false,
        });
    }
    let spec = DensitySpec::new(sample.clone(), alpha)?;
    if spec.supported() {
        if let Ok(value) = bisect_median(&spec, quad) {
            return Ok(ConditionalMedian {
                value,
                standard_error: None,
                monte_carlo: false,
            });
        }
    }
    let ys = simulate_conditional_means(sample, alpha, fallback_draws, MEDIAN_FALLBACK_SEED)?;
    let (value, se) = median_with_se(&ys);
    Ok(ConditionalMedian {
        value,
        standard_error: Some(se),
        monte_carlo: true,
    })
}

fn bisect_median(spec: &DensitySpec, quad: &QuadratureConfig) -> Result<f64> {
    let (min, max) = spec.support();
    let range = max - min;
    let eps = 1e-9 * range;
    let mut lo = min + eps;
    let mut hi = max - eps;
    let f_lo = cdf_y(spec, lo, quad)? - 0.5;
    let f_hi = cdf_y(spec, hi, quad)? - 0.5;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::QuadratureError(
            "cdf endpoints do not bracket 1/2".into(),
        ));
    }
    let tol = 1e-10 * range.max(1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = cdf_y(spec, mid, quad)? - 0.5;
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
