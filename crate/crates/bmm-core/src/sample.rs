//! Input data and shared estimator types.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector of unbiased estimates of one real parameter.
///
/// Construction validates that the sample is nonempty and every value is
/// finite; all estimators in the crate rely on that.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::ConfigError(format!("non-finite sample value {bad}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one value
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when all values are equal; estimators short-circuit on this.
    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }
}

/// Summary statistics in the population (1/n) convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub variance_biased: f64,
    pub skewness: f64,
    pub min: f64,
    pub max: f64,
}

/// Mean, 1/n variance and 1/n skewness of a sample.
///
/// Skewness is defined as zero when the variance is zero, so constant
/// samples are handled without special-casing downstream.
pub fn summary_stats(sample: &Sample) -> SummaryStats {
    let values = sample.values();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
    SummaryStats {
        mean,
        variance_biased: m2,
        skewness,
        min: sample.min(),
        max: sample.max(),
    }
}

/// Knobs of the Bayesian median of means procedure.
///
/// `alpha` is the symmetric Dirichlet concentration, `draws` the number of
/// weight vectors (J), and `seed` roots the weight substreams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub alpha: f64,
    pub draws: usize,
    pub seed: u64,
}

impl EstimatorConfig {
    pub fn new(alpha: f64, draws: usize, seed: u64) -> Result<Self> {
        let cfg = Self { alpha, draws, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Recommended defaults: concentration 1 and one draw per data point.
    pub fn default_for(n: usize, seed: u64) -> Self {
        Self {
            alpha: 1.0,
            draws: n,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::ConfigError(format!(
                "alpha must be a positive real, got {}",
                self.alpha
            )));
        }
        if self.draws == 0 {
            return Err(Error::ConfigError("draws must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Point-estimation method tags used in reports, simulation tables and the
/// CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mean,
    Median,
    Bmm,
    Abmm,
    /// Classical median of means over consecutive blocks.
    Mm,
    /// Hodges-Lehmann pairwise-average median.
    Hl,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Mean,
        Method::Median,
        Method::Bmm,
        Method::Abmm,
        Method::Mm,
        Method::Hl,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mean => "mean",
            Method::Median => "median",
            Method::Bmm => "bmm",
            Method::Abmm => "abmm",
            Method::Mm => "mm",
            Method::Hl => "hl",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Method::Mean),
            "median" => Ok(Method::Median),
            "bmm" => Ok(Method::Bmm),
            "abmm" => Ok(Method::Abmm),
            "mm" => Ok(Method::Mm),
            "hl" => Ok(Method::Hl),
            other => Err(Error::ConfigError(format!("unknown method '{other}'"))),
        }
    }
}

/// Outcome of a point estimation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_echo: Option<EstimatorConfig>,
    /// The resampled averages behind a BMM estimate, retained on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resampled_means: Option<Vec<f64>>,
}
