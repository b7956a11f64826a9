//! Small estimators shared by the Monte Carlo code and its tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided standard normal quantile for the given confidence level.
pub fn z_score(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(0.5 + 0.5 * confidence)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = z_score(confidence);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let rad = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        ((center - rad) / denom).max(0.0),
        ((center + rad) / denom).min(1.0),
    )
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanEstimate {
                mean: f64::NAN,
                std_error: f64::NAN,
                n,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        MeanEstimate {
            mean,
            std_error: (var / n as f64).sqrt(),
            n,
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// Kolmogorov–Smirnov distance between a sample and a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // Collapse ties so atoms are compared against the right-continuous CDF.
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        let f_left = cdf(xs[i].next_down());
        let below = i as f64 / n;
        let upto = (j + 1) as f64 / n;
        d = d.max((f_left - below).abs()).max((upto - f).abs());
        i = j + 1;
    }
    d
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_99() {
        assert!((z_score(0.99) - 2.575_829_303_549).abs() < 1e-9);
    }

    #[test]
    fn wilson_known_value() {
        // 50/100 at 95%: center 0.5, half-width 0.0960...
        let (lo, hi) = wilson(50, 100, 0.95);
        assert!((lo - 0.403_831).abs() < 1e-5, "{lo}");
        assert!((hi - 0.596_169).abs() < 1e-5, "{hi}");
    }

    #[test]
    fn wilson_at_boundary_stays_in_unit_interval() {
        let (lo, hi) = wilson(100, 100, 0.99);
        assert!(lo > 0.9 && hi == 1.0);
    }

    #[test]
    fn ks_of_identical_point_mass_is_zero() {
        let xs = vec![3.0; 10];
        assert_eq!(ks_distance(&xs, |x| if x >= 3.0 { 1.0 } else { 0.0 }), 0.0);
        assert_eq!(ks_two_sample(&xs, &xs), 0.0);
    }
}
