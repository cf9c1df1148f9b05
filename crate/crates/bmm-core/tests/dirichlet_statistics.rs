//! Distributional checks on the Dirichlet weight sampler.

mod common;

use common::*;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

use bmm_core::dirichlet::{sample_dirichlet_uniform_fast, sample_symmetric_dirichlet};
use bmm_core::{derive_substream, Sample};

fn gamma_path_coords(n: usize, alpha: f64, draws: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..draws)
        .map(|t| {
            sample_symmetric_dirichlet(n, alpha, &derive_substream(seed, t as u64))
                .unwrap()
                .values()
                .to_vec()
        })
        .collect()
}

fn fast_path_coords(n: usize, draws: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..draws)
        .map(|t| {
            sample_dirichlet_uniform_fast(n, &derive_substream(seed, t as u64))
                .unwrap()
                .values()
                .to_vec()
        })
        .collect()
}

#[test]
fn coordinate_moments_match_theory() {
    // symmetric Dirichlet: mean 1/n, variance (n-1) / (n^2 (n alpha + 1))
    let (n, alpha, draws) = (5usize, 1.0, 100_000usize);
    let coords = gamma_path_coords(n, alpha, draws, 101);
    let theory_var = (n - 1) as f64 / (n as f64).powi(2) / (n as f64 * alpha + 1.0);
    for i in 0..n {
        let xs: Vec<f64> = coords.iter().map(|w| w[i]).collect();
        let m = mean(&xs);
        let se = standard_error_of_mean(&xs);
        assert!(
            (m - 0.2).abs() < 3.0 * se,
            "coordinate {i}: mean {m} (se {se})"
        );
        let v = sample_variance(&xs);
        assert!(
            (v - theory_var).abs() < 0.05 * theory_var,
            "coordinate {i}: var {v} vs {theory_var}"
        );
    }
}

#[test]
fn marginal_is_beta_at_half() {
    // Dir_2(1/2, 1/2) coordinate is Beta(1/2, 1/2)
    let coords = gamma_path_coords(2, 0.5, 100_000, 33);
    let first: Vec<f64> = coords.iter().map(|w| w[0]).collect();
    let beta = Beta::new(0.5, 0.5).unwrap();
    let d = ks_statistic_one_sample(&first, |x| beta.cdf(x));
    let crit = ks_one_sample_critical(0.01, first.len());
    assert!(d < crit, "KS {d} vs critical {crit}");
}

#[test]
fn fast_path_marginal_is_uniform_for_two_points() {
    let coords = fast_path_coords(2, 100_000, 55);
    let first: Vec<f64> = coords.iter().map(|w| w[0]).collect();
    let d = ks_statistic_one_sample(&first, |x| x.clamp(0.0, 1.0));
    let crit = ks_one_sample_critical(0.01, first.len());
    assert!(d < crit, "KS {d} vs critical {crit}");
}

#[test]
fn fast_path_matches_gamma_path_in_distribution() {
    let n = 10;
    let draws = 100_000;
    let fast: Vec<f64> = fast_path_coords(n, draws, 7).iter().map(|w| w[0]).collect();
    let gamma: Vec<f64> = gamma_path_coords(n, 1.0, draws, 8).iter().map(|w| w[0]).collect();
    let d = ks_statistic_two_sample(&fast, &gamma);
    let crit = ks_two_sample_critical(0.01, draws, draws);
    assert!(d < crit, "coordinate KS {d} vs critical {crit}");

    // and for the induced weighted mean on a fixed skewed sample
    let sample = Sample::new(vec![0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]).unwrap();
    let y = |coords: Vec<Vec<f64>>| -> Vec<f64> {
        coords
            .iter()
            .map(|w| w.iter().zip(sample.values()).map(|(a, b)| a * b).sum())
            .collect()
    };
    let y_fast = y(fast_path_coords(n, draws, 9));
    let y_gamma = y(gamma_path_coords(n, 1.0, draws, 10));
    let d = ks_statistic_two_sample(&y_fast, &y_gamma);
    assert!(d < crit, "weighted-mean KS {d} vs critical {crit}");
}

#[test]
fn coordinates_are_exchangeable() {
    // the argmax coordinate should be uniform over 0..n; chi-square test at
    // the 0.1% level on 10^4 draws
    let n = 6;
    let draws = 10_000;
    let mut counts = vec![0usize; n];
    for w in gamma_path_coords(n, 0.8, draws, 77) {
        let argmax = w
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        counts[argmax] += 1;
    }
    let expected = draws as f64 / n as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let crit = ChiSquared::new((n - 1) as f64).unwrap().inverse_cdf(0.999);
    assert!(chi2 < crit, "chi2 {chi2} vs critical {crit}");
}
