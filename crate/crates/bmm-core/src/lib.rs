//! Robust aggregation of unbiased estimates around the Bayesian median of
//! means (BMM): the median of many Dirichlet-weighted averages of the input
//! values.
//!
//! The crate bundles everything needed to study and use the estimator:
//!
//! - [`estimators`]: sample mean/median, BMM, its deterministic skewness
//!   correction (aBMM), the classical median of means and Hodges-Lehmann.
//! - [`dirichlet`]: reproducible symmetric Dirichlet weight sampling,
//!   including the fast ordered-uniform path for concentration 1.
//! - [`analytics`]: exact conditional moments, density, CDF and median of the
//!   Dirichlet-weighted mean given the data.
//! - [`bounds`]: closed-form concentration/bias bound calculators plus
//!   Monte-Carlo experiments that check them empirically.
//! - [`bootstrap`]: percentile bootstrap confidence intervals with fixed
//!   Dirichlet draws, and a coverage experiment.
//! - [`importance`]: importance-sampling demonstrations (exponential tilting
//!   terms and the constrained-permutation counter).
//! - [`distributions`] and [`simulate`]: synthetic data generators with known
//!   means and the paired Monte-Carlo comparison engine behind the CLI.
//!
//! All randomness flows through explicit [`rng::RngStream`] values so results
//! are bit-reproducible for a given seed, independent of thread count.

pub mod analytics;
pub mod bootstrap;
pub mod bounds;
pub mod dirichlet;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod importance;
mod quad;
pub mod rng;
pub mod sample;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use rng::{derive_seed, derive_substream, RngStream};
pub use sample::{summary_stats, EstimateReport, EstimatorConfig, Method, Sample, SummaryStats};
