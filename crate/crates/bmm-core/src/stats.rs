//! Small numeric helpers shared across the crate.

/// Arithmetic mean. Returns NaN on empty input.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population (1/n) variance.
pub fn variance_biased(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64
}

/// Median by selection; reorders the buffer. Even lengths average the two
/// middle order statistics.
pub fn median_in_place(values: &mut [f64]) -> f64 {
    let n = values.len();
    debug_assert!(n > 0);
    let (_, &mut hi, _) = values.select_nth_unstable_by(n / 2, f64::total_cmp);
    if n % 2 == 1 {
        hi
    } else {
        let lo = values[..n / 2]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (lo + hi) / 2.0
    }
}

/// Quantile with the linear-interpolation convention: rank `q * (n - 1)`
/// between adjacent order statistics of the sorted input.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = rank - lo as f64;
        sorted[lo] + (sorted[hi] - sorted[lo]) * w
    }
}

/// Sample median together with an asymptotic standard error.
///
/// The error uses 1/(2 sqrt(n) f(med)) with the density at the median
/// estimated from the empirical CDF over a window around it.
pub fn median_with_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let med = quantile_sorted(&sorted, 0.5);
    if n < 16 {
        let sd = variance_biased(values).sqrt();
        return (med, 1.2533 * sd / (n as f64).sqrt());
    }
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let scale = if iqr > 0.0 {
        iqr / 1.349
    } else {
        variance_biased(values).sqrt()
    };
    if scale == 0.0 {
        return (med, 0.0);
    }
    let h = scale * (n as f64).powf(-0.2);
    let below = sorted.partition_point(|&v| v <= med - h);
    let above = sorted.partition_point(|&v| v <= med + h);
    let density = (above - below) as f64 / (2.0 * h * n as f64);
    if density <= 0.0 {
        return (med, 1.2533 * variance_biased(values).sqrt() / (n as f64).sqrt());
    }
    (med, 1.0 / (2.0 * (n as f64).sqrt() * density))
}

/// Leave-one-out jackknife standard error of the mean of `values`.
pub fn jackknife_se_of_mean(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let total: f64 = values.iter().sum();
    let nf = n as f64;
    // leave-one-out means and their spread
    let loo_mean_of_means = values
        .iter()
        .map(|v| (total - v) / (nf - 1.0))
        .sum::<f64>()
        / nf;
    let ss: f64 = values
        .iter()
        .map(|v| {
            let loo = (total - v) / (nf - 1.0);
            (loo - loo_mean_of_means).powi(2)
        })
        .sum();
    ((nf - 1.0) / nf * ss).sqrt()
}

/// Pearson correlation of two equal-length series.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let ma = mean(a);
    let mb = mean(b);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..a.len() {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma).powi(2);
        vb += (b[i] - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}
