use serde::{Deserialize, Serialize};

use super::normal;
use crate::error::EstimationError;

/// Two-sided 95% normal quantile used for the Fisher interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

impl CorrelationResult {
    /// Two-sided p-value of `r = 0` on the Fisher z scale.
    pub fn p_value(&self) -> f64 {
        if self.r.abs() >= 1.0 {
            return 0.0;
        }
        normal::two_sided_p(self.r.atanh() * ((self.n - 3) as f64).sqrt())
    }

    pub fn excludes_zero(&self) -> bool {
        self.ci_low > 0.0 || self.ci_high < 0.0
    }
}

/// Sample Pearson correlation with a 95% Fisher z interval.
pub fn pearson_correlation(pairs: &[(f64, f64)]) -> Result<CorrelationResult, EstimationError> {
    let n = pairs.len();
    if n < 3 {
        return Err(EstimationError::TooFew { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(EstimationError::Constant("first variable"));
    }
    if syy == 0.0 {
        return Err(EstimationError::Constant("second variable"));
    }
    let mut r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    // exactly collinear data can land a few ulps short of ±1
    if 1.0 - r.abs() < 4.0 * f64::EPSILON {
        r = r.signum();
    }
    let (ci_low, ci_high) = if r.abs() == 1.0 {
        (r, r)
    } else {
        let z = r.atanh();
        let half = Z_95 / (nf - 3.0).sqrt();
        ((z - half).tanh(), (z + half).tanh())
    };
    Ok(CorrelationResult { r, ci_low: ci_low.min(r), ci_high: ci_high.max(r), n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_cases() {
        let c = pearson_correlation(&[(1.0, 2.0), (2.0, 4.0), (3.0, 6.0)]).unwrap();
        assert!((c.r - 1.0).abs() < 1e-15);
        assert_eq!((c.ci_low, c.ci_high), (c.r, c.r));
        let c = pearson_correlation(&[(1.0, 6.0), (2.0, 4.0), (3.0, 5.0)]).unwrap();
        assert!((c.r + 0.5).abs() < 1e-12);
        // n = 3 leaves no degrees of freedom for the interval
        assert_eq!((c.ci_low, c.ci_high), (-1.0, 1.0));
    }

    #[test]
    fn fisher_interval() {
        // r = 0.5 over n = 103: z = atanh(0.5), half-width 1.96/10
        let pairs: Vec<(f64, f64)> = {
            // Construct x, y with exact correlation 0.5 via y = 0.5 x + sqrt(0.75) e,
            // where e is orthogonal to x and has equal variance.
            let n = 103;
            let x: Vec<f64> = (0..n).map(|i| i as f64 - 51.0).collect();
            let mut e: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let me = e.iter().sum::<f64>() / n as f64;
            e.iter_mut().for_each(|v| *v -= me);
            let proj = e.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|b| b * b).sum::<f64>();
            e.iter_mut().zip(&x).for_each(|(v, b)| *v -= proj * b);
            let sx = x.iter().map(|b| b * b).sum::<f64>().sqrt();
            let se = e.iter().map(|b| b * b).sum::<f64>().sqrt();
            x.iter().zip(&e).map(|(&a, &b)| (a, 0.5 * a / sx + 0.75f64.sqrt() * b / se)).collect()
        };
        let c = pearson_correlation(&pairs).unwrap();
        assert!((c.r - 0.5).abs() < 1e-12);
        assert!((c.ci_low - (0.5f64.atanh() - 0.196).tanh()).abs() < 1e-12);
        assert!((c.ci_high - (0.5f64.atanh() + 0.196).tanh()).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(pearson_correlation(&[(1.0, 2.0), (2.0, 3.0)]), Err(EstimationError::TooFew { .. })));
        assert!(matches!(pearson_correlation(&[(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]), Err(EstimationError::Constant(_))));
        assert!(matches!(pearson_correlation(&[(1.0, 2.0), (2.0, 2.0), (3.0, 2.0)]), Err(EstimationError::Constant(_))));
    }

    fn sample() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 5..40)
    }

    proptest! {
        #[test]
        fn affine_invariance(pairs in sample(), a in 0.1f64..10.0, b in -20.0f64..20.0, c in 0.1f64..10.0) {
            let Ok(base) = pearson_correlation(&pairs) else { return Ok(()) };
            let moved: Vec<_> = pairs.iter().map(|&(x, y)| (a * x + b, c * y - b)).collect();
            let m = pearson_correlation(&moved).unwrap();
            prop_assert!((m.r - base.r).abs() < 1e-9);
            let flipped: Vec<_> = pairs.iter().map(|&(x, y)| (-a * x, y)).collect();
            let f = pearson_correlation(&flipped).unwrap();
            prop_assert!((f.r + base.r).abs() < 1e-9);
        }

        #[test]
        fn interval_brackets_r(pairs in sample()) {
            let Ok(c) = pearson_correlation(&pairs) else { return Ok(()) };
            prop_assert!(c.ci_low <= c.r && c.r <= c.ci_high);
            prop_assert!((-1.0..=1.0).contains(&c.r));
        }
    }
}
