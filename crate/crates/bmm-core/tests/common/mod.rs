//! Shared statistics helpers for the integration suites.

/// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
pub fn ks_statistic_one_sample<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable_by(f64::total_cmp);
    sb.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (sa.len(), sb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = sa[i].min(sb[j]);
        while i < na && sa[i] <= x {
            i += 1;
        }
        while j < nb && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    d
}

/// Asymptotic Kolmogorov critical coefficient: reject at level `alpha` when
/// D > c(alpha) / sqrt(n) (one sample) or
/// D > c(alpha) sqrt((n + m) / (n m)) (two samples).
pub fn ks_critical_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

pub fn ks_one_sample_critical(alpha: f64, n: usize) -> f64 {
    ks_critical_coefficient(alpha) / (n as f64).sqrt()
}

pub fn ks_two_sample_critical(alpha: f64, n: usize, m: usize) -> f64 {
    ks_critical_coefficient(alpha) * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}

pub fn standard_error_of_mean(values: &[f64]) -> f64 {
    (sample_variance(values) / values.len() as f64).sqrt()
}
