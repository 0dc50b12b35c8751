//! Small sample-statistics helpers shared by the Monte Carlo estimators.

/// Mean, sample standard deviation and count of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std_dev: f64,
    pub count: usize,
}

impl Summary {
    /// Two-pass summary; the values are reduced in the order given, so the
    /// result is bit-reproducible for a fixed input order.
    pub fn from_slice(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Self { mean: f64::NAN, std_dev: f64::NAN, count };
        }
        let mean = pairwise_sum(values) / count as f64;
        let std_dev = if count > 1 {
            let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
            (pairwise_sum(&dev) / (count as f64 - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std_dev, count }
    }

    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.count as f64).sqrt()
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// One-sample Kolmogorov–Smirnov distance between the empirical distribution
/// of `samples` and the continuous `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    ks_statistic_sorted(&sorted, cdf)
}

/// As [`ks_statistic`] for already-sorted samples.
pub fn ks_statistic_sorted<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i as f64 + 1.0) / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}
