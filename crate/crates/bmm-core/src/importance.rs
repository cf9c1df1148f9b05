//! Importance-sampling demonstrations with exact oracles.
//!
//! Two problems are covered: estimating the mean of an exponential via
//! exponential tilting, and counting the permutations of `0..m` in which no
//! element moves more than one position from its index. The count satisfies
//! `P_m = P_{m-1} + P_{m-2}` with `P_1 = 1, P_2 = 2`, so an exact oracle is
//! available to test the sequential sampler against.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::point_estimate;
use crate::rng::{derive_seed, derive_substream, RngStream};
use crate::sample::{EstimateReport, EstimatorConfig, Method, Sample};

/// One sequentially constructed constrained permutation with its
/// importance weight (the product of branch counts along the construction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibDraw {
    /// `permutation[position] = object`; every object sits within one slot
    /// of its index.
    pub permutation: Vec<usize>,
    pub weight: u128,
}

impl FibDraw {
    /// Checks the defining constraint: a bijection with `|pos - obj| <= 1`.
    pub fn satisfies_constraint(&self) -> bool {
        let m = self.permutation.len();
        let mut seen = vec![false; m];
        for (pos, &obj) in self.permutation.iter().enumerate() {
            if obj >= m || seen[obj] || pos.abs_diff(obj) > 1 {
                return false;
            }
            seen[obj] = true;
        }
        true
    }
}

/// Exact count of constrained permutations of `m` objects via the
/// two-term recursion. Overflows u64 above m = 92.
pub fn fib_oracle(m: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::ConfigError("m must be at least 1".into()));
    }
    if m > 92 {
        return Err(Error::OverflowError(m));
    }
    let (mut prev, mut cur) = (1u64, 1u64); // P_0 := 1, P_1 = 1
    for _ in 2..=m {
        let next = cur + prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Brute-force count by backtracking over position assignments; capped at
/// m = 14 to bound the search.
pub fn enumerate_fib_permutations(m: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::ConfigError("m must be at least 1".into()));
    }
    if m > 14 {
        return Err(Error::BudgetError(m));
    }
    fn assign(obj: usize, m: usize, taken: &mut [bool]) -> u64 {
        if obj == m {
            return 1;
        }
        let mut count = 0;
        let lo = obj.saturating_sub(1);
        let hi = (obj + 1).min(m - 1);
        for pos in lo..=hi {
            if !taken[pos] {
                taken[pos] = true;
                count += assign(obj + 1, m, taken);
                taken[pos] = false;
            }
        }
        count
    }
    Ok(assign(0, m, &mut vec![false; m]))
}

/// Builds one constrained permutation sequentially.
///
/// Object `i` is placed uniformly among its free neighbor positions; when it
/// takes position `i + 1`, object `i + 1` is forced into position `i` and
/// skipped. The running product of free-neighbor counts is the importance
/// weight, an unbiased estimate of the total count.
pub fn sample_fib_permutation(m: usize, stream: &RngStream) -> FibDraw {
    assert!(m >= 1, "m must be at least 1");
    let mut rng = stream.rng();
    let mut perm = vec![usize::MAX; m];
    let mut weight: u128 = 1;
    let mut i = 0usize;
    while i < m {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(m - 1);
        let mut avail = [0usize; 3];
        let mut count = 0;
        for pos in lo..=hi {
            if perm[pos] == usize::MAX {
                avail[count] = pos;
                count += 1;
            }
        }
        weight *= count as u128;
        let chosen = avail[rng.random_range(0..count)];
        perm[chosen] = i;
        if chosen != i {
            // the displaced neighbor is forced into the vacated slot
            perm[i] = chosen;
            i += 1;
        }
        i += 1;
    }
    FibDraw {
        permutation: perm,
        weight,
    }
}

const FIB_DATA_TAG: u64 = 0x31;

/// Draws `n_draws` importance weights for the count of constrained
/// permutations of `m` objects and aggregates them with the selected
/// estimator.
pub fn is_estimate_fib(
    m: usize,
    n_draws: usize,
    aggregator: Method,
    config: &EstimatorConfig,
    mm_groups: usize,
    seed: u64,
) -> Result<EstimateReport> {
    if m == 0 || n_draws == 0 {
        return Err(Error::ConfigError("m and n_draws must be positive".into()));
    }
    if !matches!(
        aggregator,
        Method::Mean | Method::Bmm | Method::Abmm | Method::Mm
    ) {
        return Err(Error::ConfigError(format!(
            "aggregator must be one of mean|bmm|abmm|mm, got {aggregator}"
        )));
    }
    config.validate()?;
    let root = derive_seed(seed, FIB_DATA_TAG);
    let draw = |t: usize| sample_fib_permutation(m, &derive_substream(root, t as u64)).weight as f64;
    let weights: Vec<f64> = if n_draws >= 4096 {
        (0..n_draws).into_par_iter().map(draw).collect()
    } else {
        (0..n_draws).map(draw).collect()
    };
    let sample = Sample::new(weights)?;
    let estimate = point_estimate(aggregator, &sample, config, mm_groups)?;
    Ok(EstimateReport {
        estimate,
        method: aggregator,
        config_echo: Some(*config),
        resampled_means: None,
    })
}

/// One exponential-tilting term `lambda x e^{-(lambda - 1) x}`.
pub(crate) fn expo_is_term(lambda: f64, x: f64) -> f64 {
    lambda * x * (-(lambda - 1.0) * x).exp()
}

/// Importance-sampling terms for the mean of Expo(lambda) built from
/// standard exponential proposals; each term is nonnegative and unbiased
/// for `1/lambda`.
pub fn expo_is_terms(lambda: f64, n: usize, stream: &RngStream) -> Result<Sample> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::ConfigError(format!(
            "lambda must be a positive real, got {lambda}"
        )));
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = stream.rng();
    let values = (0..n)
        .map(|_| {
            let x: f64 = rng.sample(Exp1);
            expo_is_term(lambda, x)
        })
        .collect();
    Sample::new(values)
}
