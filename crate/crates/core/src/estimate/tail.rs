//! Log-log tail slope of integer-valued frequency data.

use std::collections::BTreeMap;

use crate::error::EstimationError;

/// Least-squares slope of `ln y` on `ln x`. Points with non-positive
/// coordinates are skipped.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64, EstimationError> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return Err(EstimationError::TooFew { needed: 2, got: logs.len() });
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(EstimationError::Constant("log value"));
    }
    Ok(sxy / sxx)
}

/// Counts of each value after rounding to the nearest integer.
pub fn integer_frequencies(samples: &[f64]) -> BTreeMap<i64, u64> {
    let mut freq = BTreeMap::new();
    for &s in samples {
        if s.is_finite() {
            *freq.entry(s.round() as i64).or_insert(0) += 1;
        }
    }
    freq
}

/// Log-log slope of integer-binned frequencies with values in `[lo, hi]`.
pub fn tail_slope(samples: &[f64], tail_range: (f64, f64)) -> Result<f64, EstimationError> {
    let (lo, hi) = tail_range;
    let freq = integer_frequencies(samples);
    let points: Vec<(f64, f64)> = freq
        .iter()
        .map(|(&k, &c)| (k as f64, c as f64))
        .filter(|&(k, _)| k >= lo && k <= hi && k > 0.0)
        .collect();
    if points.len() < 5 {
        return Err(EstimationError::InsufficientTail { distinct: points.len(), lo, hi });
    }
    log_log_slope(&points)
}
