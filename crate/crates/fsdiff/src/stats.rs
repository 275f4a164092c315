//! Summary statistics for replication studies.

use fsdiff_core::specfun::norm_cdf;

/// One-sample Kolmogorov-Smirnov distance to the standard normal.
pub fn ks_normal(sample: &[f64]) -> f64 {
    let mut z = sample.to_vec();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = norm_cdf(v);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of a KS distance `d` at sample size `n`, with
/// Stephens' small-sample adjustment of the argument.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lam = (sn + 0.12 + 0.11 / sn) * d;
    if lam < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lam * lam).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_critical_values() {
        // λ = 1.6276 is the 1% point, 1.3581 the 5% point
        assert!((ks_p_value(1.6276 / 1e4, 100_000_000) - 0.01).abs() < 1e-4);
        assert!((ks_p_value(1.3581 / 1e4, 100_000_000) - 0.05).abs() < 1e-4);
        assert_eq!(ks_p_value(0.0, 50), 1.0);
    }

    #[test]
    fn ks_of_quantiles_is_small() {
        let n = 1000;
        let z: Vec<f64> = (0..n)
            .map(|i| fsdiff_core::specfun::norm_quantile((i as f64 + 0.5) / n as f64).unwrap())
            .collect();
        assert!((ks_normal(&z) - 0.5 / n as f64).abs() < 1e-12);
    }
}
