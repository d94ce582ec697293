//! Small statistics helpers for checking simulated samples.

use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

impl MeanEstimate {
    /// Returns `None` for an empty sample. A single value has zero error.
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        let n = samples.len();
        if n == 0 {
            return None;
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Some(MeanEstimate {
            mean,
            std_error,
            count: n,
        })
    }
}

/// Standard error of a proportion `p` estimated from `n` Bernoulli trials.
pub fn proportion_std_error(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// One-sample Kolmogorov–Smirnov statistic of `sorted` against `cdf`.
///
/// `sorted` must be ascending.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Critical value of the KS statistic at significance `alpha`, using the
/// asymptotic distribution with Stephens' finite-sample correction.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let sn = (n as f64).sqrt();
    c / (sn + 0.12 + 0.11 / sn)
}

/// Number of entries of an ascending slice that are `<= t`.
pub(crate) fn count_at_or_below(sorted: &[f64], t: f64) -> usize {
    sorted.partition_point(|&x| x <= t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_error() {
        let m = MeanEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        // sample sd = sqrt(5/3); se = sd / 2
        assert!((m.std_error - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(MeanEstimate::from_samples(&[7.0]).unwrap().std_error, 0.0);
        assert!(MeanEstimate::from_samples(&[]).is_none());
    }

    #[test]
    fn ks_of_uniform_grid() {
        // midpoints of n equal bins have D = 1 / (2n) against U(0, 1)
        let n = 100;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn ks_critical_one_percent() {
        // asymptotic constant at 1% is 1.6276
        let d = ks_critical_value(100_000, 0.01);
        assert!((d * (100_000f64).sqrt() - 1.6276).abs() < 1e-3);
    }

    #[test]
    fn counting() {
        let xs = [1.0, 2.0, 2.0, 5.0];
        assert_eq!(count_at_or_below(&xs, 0.5), 0);
        assert_eq!(count_at_or_below(&xs, 2.0), 3);
        assert_eq!(count_at_or_below(&xs, 9.0), 4);
    }
}
