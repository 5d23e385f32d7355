/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `samples` and `cdf`, checking both sides of every step.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let below = f - i as f64 / n;
            let above = (i + 1) as f64 / n - f;
            below.max(above)
        })
        .fold(0.0f64, f64::max)
        .clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Exp};

    #[test]
    fn single_sample_at_median() {
        let d = ks_distance(&[0.0], |x| 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2));
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn same_distribution_is_close() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let exp = Exp::new(1.0).unwrap();
        let xs: Vec<f64> = (0..100_000).map(|_| exp.sample(&mut rng)).collect();
        let d = ks_distance(&xs, |x| 1.0 - (-x).exp());
        assert!(d < 0.01, "{d}");
        let shifted = ks_distance(&xs, |x| 1.0 - (-(x / 2.0)).exp());
        assert!(shifted > 0.2);
    }

    #[test]
    fn bounded() {
        assert_eq!(ks_distance(&[5.0, 6.0], |_| 0.0), 1.0);
        assert_eq!(ks_distance(&[5.0, 6.0], |_| 1.0), 1.0);
        assert_eq!(ks_distance(&[], |_| 0.3), 0.0);
    }
}
