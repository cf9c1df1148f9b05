//! Symmetric Dirichlet weight sampling.
//!
//! Weight vectors are drawn either by normalizing Gamma(alpha, 1) variates or,
//! for concentration exactly 1, from the spacings of sorted uniforms. Both
//! paths are parameterized by an explicit [`RngStream`], so callers can hand
//! substreams to parallel workers and keep results reproducible.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sample::Sample;

/// Tolerance for the exact-sum simplex invariant.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// One probability vector on the n-simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletWeights {
    values: Vec<f64>,
}

impl DirichletWeights {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Wraps a raw vector, checking the simplex invariant.
    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::NumericalError("negative or non-finite weight".into()));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NumericalError(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(Self { values })
    }
}

/// Divides by the sum and snaps the last coordinate so the vector sums to
/// one within [`SIMPLEX_TOL`]. Returns `None` when the raw draws carry no
/// mass at all (underflow at tiny concentrations).
fn normalize(mut raw: Vec<f64>) -> Option<DirichletWeights> {
    let sum: f64 = raw.iter().sum();
    if !(sum > 0.0) || !sum.is_finite() {
        return None;
    }
    for v in &mut raw {
        *v /= sum;
    }
    let n = raw.len();
    let partial: f64 = raw[..n - 1].iter().sum();
    let drift = 1.0 - (partial + raw[n - 1]);
    if drift.abs() < SIMPLEX_TOL {
        raw[n - 1] = (1.0 - partial).max(0.0);
    }
    Some(DirichletWeights { values: raw })
}

/// Draws one weight vector from the symmetric Dirichlet with concentration
/// `alpha` by normalizing n Gamma(alpha, 1) variates.
///
/// At very small concentrations most Gamma draws underflow to zero; an
/// all-zero vector is resampled, up to 100 attempts.
pub fn sample_symmetric_dirichlet(
    n: usize,
    alpha: f64,
    stream: &RngStream,
) -> Result<DirichletWeights> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::ConfigError(format!(
            "alpha must be a positive real, got {alpha}"
        )));
    }
    if n == 1 {
        return Ok(DirichletWeights { values: vec![1.0] });
    }
    let gamma = Gamma::new(alpha, 1.0)
        .map_err(|e| Error::ConfigError(format!("gamma shape {alpha}: {e}")))?;
    let mut rng = stream.rng();
    for _ in 0..100 {
        let raw: Vec<f64> = (0..n).map(|_| gamma.sample(&mut rng)).collect();
        if let Some(w) = normalize(raw) {
            return Ok(w);
        }
    }
    Err(Error::NumericalError(format!(
        "all gamma draws underflowed after 100 attempts (n = {n}, alpha = {alpha})"
    )))
}

/// Fast draw for concentration exactly 1: the spacings of n - 1 sorted
/// uniforms on [0, 1] are Dirichlet(1, ..., 1) distributed.
pub fn sample_dirichlet_uniform_fast(n: usize, stream: &RngStream) -> Result<DirichletWeights> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n == 1 {
        return Ok(DirichletWeights { values: vec![1.0] });
    }
    let mut rng = stream.rng();
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_unstable_by(f64::total_cmp);
    let mut values = Vec::with_capacity(n);
    let mut prev = 0.0;
    for &c in &cuts {
        values.push(c - prev);
        prev = c;
    }
    values.push(1.0 - prev);
    // spacings of sorted points in [0, 1) are nonnegative and telescope to 1
    let partial: f64 = values[..n - 1].iter().sum();
    values[n - 1] = (1.0 - partial).max(0.0);
    Ok(DirichletWeights { values })
}

/// Draws one weight vector, routing concentration exactly 1 through the
/// ordered-uniform shortcut and everything else through gamma
/// normalization.
pub fn sample_weights(n: usize, alpha: f64, stream: &RngStream) -> Result<DirichletWeights> {
    if alpha == 1.0 {
        sample_dirichlet_uniform_fast(n, stream)
    } else {
        sample_symmetric_dirichlet(n, alpha, stream)
    }
}

/// Inner product of a weight vector with a sample.
///
/// The result of a convex combination is clamped to the sample range to keep
/// the support invariant exact under floating-point roundoff.
pub fn weighted_mean(weights: &DirichletWeights, sample: &Sample) -> Result<f64> {
    if weights.len() != sample.len() {
        return Err(Error::ShapeError {
            expected: sample.len(),
            got: weights.len(),
        });
    }
    let dot: f64 = weights
        .values
        .iter()
        .zip(sample.values())
        .map(|(w, v)| w * v)
        .sum();
    Ok(dot.clamp(sample.min(), sample.max()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_substream;

    fn assert_simplex(w: &DirichletWeights) {
        assert!(w.values().iter().all(|&v| v >= 0.0));
        let sum: f64 = w.values().iter().sum();
        assert!((sum - 1.0).abs() <= SIMPLEX_TOL, "sum {sum}");
    }

    #[test]
    fn dimension_one_is_degenerate() {
        let s = derive_substream(1, 0);
        assert_eq!(
            sample_symmetric_dirichlet(1, 0.3, &s).unwrap().values(),
            &[1.0]
        );
        assert_eq!(sample_dirichlet_uniform_fast(1, &s).unwrap().values(), &[1.0]);
    }

    #[test]
    fn simplex_invariant_both_paths() {
        for k in 0..50 {
            let s = derive_substream(7, k);
            assert_simplex(&sample_symmetric_dirichlet(6, 0.5, &s).unwrap());
            assert_simplex(&sample_symmetric_dirichlet(6, 4.0, &s).unwrap());
            assert_simplex(&sample_dirichlet_uniform_fast(6, &s).unwrap());
        }
    }

    #[test]
    fn tiny_alpha_still_produces_weights() {
        for k in 0..20 {
            let s = derive_substream(11, k);
            let w = sample_symmetric_dirichlet(5, 1e-3, &s).unwrap();
            assert_simplex(&w);
        }
    }

    #[test]
    fn reproducible_per_stream() {
        let s = derive_substream(42, 3);
        let a = sample_symmetric_dirichlet(8, 1.5, &s).unwrap();
        let b = sample_symmetric_dirichlet(8, 1.5, &s).unwrap();
        assert_eq!(a, b);
        let c = sample_dirichlet_uniform_fast(8, &s).unwrap();
        let d = sample_dirichlet_uniform_fast(8, &s).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn weighted_mean_basics() {
        let sample = Sample::new(vec![1.0, 2.0, 3.0]).unwrap();
        let uniform = DirichletWeights::from_vec(vec![1.0 / 3.0; 3]).unwrap();
        assert!((weighted_mean(&uniform, &sample).unwrap() - 2.0).abs() < 1e-15);

        let onehot = DirichletWeights::from_vec(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(weighted_mean(&onehot, &sample).unwrap(), 3.0);

        let skewed = Sample::new(vec![0.0, 0.0, 3.0]).unwrap();
        for k in 0..20 {
            let w = sample_dirichlet_uniform_fast(3, &derive_substream(5, k)).unwrap();
            let y = weighted_mean(&w, &skewed).unwrap();
            assert!((0.0..=3.0).contains(&y));
        }
    }

    #[test]
    fn weighted_mean_shape_error() {
        let sample = Sample::new(vec![1.0, 2.0]).unwrap();
        let w = DirichletWeights::from_vec(vec![1.0]).unwrap();
        assert_eq!(
            weighted_mean(&w, &sample),
            Err(Error::ShapeError {
                expected: 2,
                got: 1
            })
        );
    }
}
