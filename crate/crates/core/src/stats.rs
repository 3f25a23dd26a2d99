//! Small order-stable statistics helpers shared by the samplers and drivers.

use statrs::distribution::{ContinuousCDF, Normal};

/// Pairwise summation. The result depends only on the order of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        values.iter().sum()
    } else {
        let (left, right) = values.split_at(values.len() / 2);
        pairwise_sum(left) + pairwise_sum(right)
    }
}

pub fn mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Unbiased sample variance (two-pass). Zero for fewer than two values.
pub fn variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let squares: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    pairwise_sum(&squares) / (values.len() - 1) as f64
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `values` and a centred Gaussian with standard deviation `sd`.
pub fn ks_distance_normal(values: &[f64], sd: f64) -> f64 {
    let normal = Normal::new(0.0, sd).expect("standard deviation must be positive");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / m).max((i + 1) as f64 / m - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at the 1% level.
pub fn ks_critical_1pct(sample_count: usize) -> f64 {
    1.63 / (sample_count as f64).sqrt()
}

/// Ordinary least-squares slope and intercept of `y` against `x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn moments() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&v), 2.5);
        assert_abs_diff_eq!(variance(&v), 5.0 / 3.0, epsilon = 1e-15);
        assert_eq!(variance(&[3.0, 3.0]), 0.0);
        let long: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&long), 499500.0);
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let normal = Normal::new(0.0, 2.0).unwrap();
        let m = 2000;
        let values: Vec<f64> = (0..m).map(|i| normal.inverse_cdf((i as f64 + 0.5) / m as f64)).collect();
        assert_abs_diff_eq!(ks_distance_normal(&values, 2.0), 0.5 / m as f64, epsilon = 1e-9);
        assert!(ks_distance_normal(&values, 1.0) > 0.1);
    }

    #[test]
    fn fit_line() {
        let x = [1.0, 2.0, 3.0];
        let y = [1.0, -1.0, -3.0];
        let (slope, intercept) = least_squares(&x, &y);
        assert_abs_diff_eq!(slope, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(intercept, 3.0, epsilon = 1e-14);
    }
}
