//! Standard normal helpers on top of `libm::erfc`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `ln Φ(-b)` for `b >= 0`, using the Mills-ratio expansion once `erfc`
/// would underflow.
pub fn ln_upper_tail(b: f64) -> f64 {
    if b < 30.0 {
        (0.5 * libm::erfc(b * FRAC_1_SQRT_2)).ln()
    } else {
        let b2 = b * b;
        -0.5 * b2 - 0.5 * (2.0 * PI).ln() - b.ln() + (1.0 - 1.0 / b2 + 3.0 / (b2 * b2)).ln()
    }
}

/// Two-sided p-value of a standard normal test statistic.
pub fn two_sided_p(z: f64) -> f64 {
    libm::erfc(z.abs() * FRAC_1_SQRT_2)
}
