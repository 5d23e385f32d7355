//! Inverse Gaussian distribution: density, distribution function and the
//! closed-form maximum likelihood fit.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::normal;
use crate::error::EstimationError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseGaussianParams {
    /// Mean.
    pub mu: f64,
    /// Shape.
    pub lambda: f64,
}

impl InverseGaussianParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self, EstimationError> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(EstimationError::InvalidParameter(format!("inverse Gaussian mean must be positive, got {mu}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(EstimationError::InvalidParameter(format!("inverse Gaussian shape must be positive, got {lambda}")));
        }
        Ok(InverseGaussianParams { mu, lambda })
    }

    pub fn variance(&self) -> f64 {
        self.mu.powi(3) / self.lambda
    }

    pub fn pdf(&self, x: f64) -> Result<f64, EstimationError> {
        check_support(x)?;
        Ok(self.ln_pdf_unchecked(x).exp())
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64, EstimationError> {
        check_support(x)?;
        Ok(self.ln_pdf_unchecked(x))
    }

    fn ln_pdf_unchecked(&self, x: f64) -> f64 {
        let (mu, lambda) = (self.mu, self.lambda);
        0.5 * (lambda / (2.0 * PI)).ln() - 1.5 * x.ln() - lambda * (x - mu).powi(2) / (2.0 * mu * mu * x)
    }

    /// `Φ(√(λ/x)(x/μ − 1)) + e^{2λ/μ} Φ(−√(λ/x)(x/μ + 1))`, with the second
    /// term formed in log space.
    pub fn cdf(&self, x: f64) -> Result<f64, EstimationError> {
        check_support(x)?;
        Ok(self.cdf_unchecked(x))
    }

    pub(crate) fn cdf_unchecked(&self, x: f64) -> f64 {
        let (mu, lambda) = (self.mu, self.lambda);
        let s = (lambda / x).sqrt();
        let a = normal::cdf(s * (x / mu - 1.0));
        let b = (2.0 * lambda / mu + normal::ln_upper_tail(s * (x / mu + 1.0))).exp();
        (a + b).clamp(0.0, 1.0)
    }

    /// Draws one variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use rand_distr::Distribution;
        rand_distr::InverseGaussian::new(self.mu, self.lambda)
            .expect("parameters validated on construction")
            .sample(rng)
    }

    /// `d ln f / d ln x = −3/2 − λx/(2μ²) + λ/(2x)`.
    pub fn log_log_slope(&self, x: f64) -> f64 {
        -1.5 - self.lambda * x / (2.0 * self.mu * self.mu) + self.lambda / (2.0 * x)
    }
}

fn check_support(x: f64) -> Result<(), EstimationError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(EstimationError::InvalidParameter(format!("inverse Gaussian support is x > 0, got {x}")))
    }
}

/// `μ̂ = mean`, `λ̂ = n / Σ(1/xᵢ − 1/μ̂)`.
pub fn fit_inverse_gaussian(samples: &[f64]) -> Result<InverseGaussianParams, EstimationError> {
    if samples.len() < 2 {
        return Err(EstimationError::TooFew { needed: 2, got: samples.len() });
    }
    for (index, &value) in samples.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(EstimationError::NonPositive { index, value });
        }
    }
    let n = samples.len() as f64;
    let mu = samples.iter().sum::<f64>() / n;
    let inv_mu = 1.0 / mu;
    let dispersion: f64 = samples.iter().map(|x| 1.0 / x - inv_mu).sum();
    // Jensen: mean(1/x) >= 1/mean(x), equality only for constant samples.
    if !(dispersion > 1e-12 * n * inv_mu) {
        return Err(EstimationError::ZeroDispersion);
    }
    InverseGaussianParams::new(mu, n / dispersion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const REPORTED_FIT: InverseGaussianParams = InverseGaussianParams { mu: 6.1, lambda: 5.8 };

    #[test]
    fn density_values() {
        assert_abs_diff_eq!(REPORTED_FIT.pdf(6.1).unwrap(), 0.063_771_893, epsilon = 1e-8);
        let unit = InverseGaussianParams::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(unit.pdf(1.0).unwrap(), 0.398_942_280_401_43, epsilon = 1e-12);
        assert!(REPORTED_FIT.pdf(0.0).is_err());
        assert!(REPORTED_FIT.cdf(-1.0).is_err());
        assert_abs_diff_eq!(REPORTED_FIT.variance(), 6.1f64.powi(3) / 5.8, epsilon = 1e-12);
    }

    #[test]
    fn normalization_by_quadrature() {
        // Composite Simpson on a substitution x = e^t, t in [-12, 8].
        let (lo, hi, m) = (-12.0f64, 8.0f64, 20_000);
        let h = (hi - lo) / m as f64;
        let f = |t: f64| REPORTED_FIT.pdf(t.exp()).unwrap() * t.exp();
        let mut s = f(lo) + f(hi);
        for i in 1..m {
            s += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert_abs_diff_eq!(s * h / 3.0, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn cdf_shape() {
        let mut prev = 0.0;
        for i in 1..5000 {
            let x = i as f64 * 0.02;
            let c = REPORTED_FIT.cdf(x).unwrap();
            assert!(c >= prev);
            prev = c;
            let h = 1e-5;
            let deriv = (REPORTED_FIT.cdf(x + h).unwrap() - REPORTED_FIT.cdf(x - h).unwrap()) / (2.0 * h);
            if x > 2.0 * h {
                assert_abs_diff_eq!(deriv, REPORTED_FIT.pdf(x).unwrap(), epsilon = 1e-6);
            }
        }
        assert!(REPORTED_FIT.cdf(1e-6).unwrap() < 1e-12);
        assert!(REPORTED_FIT.cdf(1e4).unwrap() > 1.0 - 1e-12);
        // large shape/mean ratio stresses the exponential factor
        let tight = InverseGaussianParams::new(1.0, 2000.0).unwrap();
        assert_abs_diff_eq!(tight.cdf(1.0).unwrap(), 0.5, epsilon = 0.01);
        assert!(tight.cdf(1.2).unwrap() > 0.99);
    }

    #[test]
    fn fit_closed_form() {
        let p = fit_inverse_gaussian(&[1.0, 3.0]).unwrap();
        assert_abs_diff_eq!(p.mu, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.lambda, 6.0, epsilon = 1e-12);
        assert_eq!(fit_inverse_gaussian(&[2.0, 2.0, 2.0]), Err(EstimationError::ZeroDispersion));
        assert!(matches!(fit_inverse_gaussian(&[1.0, 0.0]), Err(EstimationError::NonPositive { index: 1, .. })));
        assert!(matches!(fit_inverse_gaussian(&[1.0]), Err(EstimationError::TooFew { .. })));
    }

    #[test]
    fn log_log_slope_matches_derivative() {
        for p in [REPORTED_FIT, InverseGaussianParams::new(10.0, 1.0).unwrap()] {
            for &x in &[0.5, 2.0, 7.0, 30.0] {
                let h = 1e-5;
                let num = (p.ln_pdf(x * (1.0 + h)).unwrap() - p.ln_pdf(x * (1.0 - h)).unwrap())
                    / ((1.0 + h).ln() - (1.0 - h).ln());
                assert_abs_diff_eq!(num, p.log_log_slope(x), epsilon = 1e-6);
            }
        }
        // correction terms vanish as lambda / mu^2 -> 0 at fixed x
        let mut prev = f64::INFINITY;
        for lambda in [1.0, 0.1, 0.01, 0.001] {
            let p = InverseGaussianParams::new(1000.0, lambda).unwrap();
            let dev = (p.log_log_slope(20.0) + 1.5).abs();
            assert!(dev < prev);
            prev = dev;
        }
        assert!(prev < 1e-4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mean_is_sample_mean(xs in prop::collection::vec(0.01f64..100.0, 2..50)) {
                let Ok(p) = fit_inverse_gaussian(&xs) else { return Ok(()) };
                let mean = xs.iter().sum::<f64>() / xs.len() as f64;
                prop_assert_eq!(p.mu, mean);
                prop_assert!(p.lambda > 0.0);
            }
        }
    }
}
