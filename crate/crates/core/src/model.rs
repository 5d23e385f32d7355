//! Closed-form pieces of the myopic speed/quantity tradeoff.
//!
//! At every visit the asker compares the marginal benefit of one more answer,
//! `u(n+1) - u(n) = alpha_u - beta1 * n`, against the expected cost of waiting
//! for it, `alpha_c + beta2 * l + beta3 * w`. Perturbing both sides with
//! independent type 1 extreme value noise turns that comparison into the
//! logit close probability `Λ(alpha + beta1 n + beta2 l + beta3 w)` with
//! `alpha = alpha_c - alpha_u`.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Logistic function `1 / (1 + e^{-z})`.
pub fn logistic(z: f64) -> Result<f64, ModelError> {
    if !z.is_finite() {
        return Err(ModelError::NonFinite { what: "logistic argument", value: z });
    }
    Ok(logistic_unchecked(z))
}

/// Numerically stable logistic for finite input; used on hot paths where the
/// argument is already known to be finite.
#[inline]
pub(crate) fn logistic_unchecked(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Coefficients of the per-visit close model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogitCoefficients {
    pub alpha: f64,
    /// Per answer received.
    pub beta1: f64,
    /// Per hour of the last inter-arrival time.
    pub beta2: f64,
    /// Per hour waited since the last answer.
    pub beta3: f64,
}

impl LogitCoefficients {
    /// Estimates reported for the hourly-visit fit on the full corpus.
    pub const REFERENCE: LogitCoefficients = LogitCoefficients {
        alpha: -4.408,
        beta1: 0.027,
        beta2: 0.028,
        beta3: 0.021,
    };

    pub fn new(alpha: f64, beta1: f64, beta2: f64, beta3: f64) -> Result<Self, ModelError> {
        let c = LogitCoefficients { alpha, beta1, beta2, beta3 };
        for (what, value) in [("alpha", alpha), ("beta1", beta1), ("beta2", beta2), ("beta3", beta3)] {
            if !value.is_finite() {
                return Err(ModelError::NonFinite { what, value });
            }
        }
        Ok(c)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta1, self.beta2, self.beta3]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        LogitCoefficients { alpha: v[0], beta1: v[1], beta2: v[2], beta3: v[3] }
    }

    /// Linear index `alpha + beta1 n + beta2 l + beta3 w`.
    #[inline]
    pub fn index(&self, n: f64, l: f64, w: f64) -> f64 {
        self.alpha + self.beta1 * n + self.beta2 * l + self.beta3 * w
    }

    /// Splits the intercept at a chosen `alpha_u` into a utility/cost pair
    /// with `alpha_c - alpha_u = alpha`.
    pub fn split(&self, alpha_u: f64) -> (UtilitySpec, CostSpec) {
        (
            UtilitySpec { alpha_u, beta1: self.beta1, u0: 0.0 },
            CostSpec { alpha_c: self.alpha + alpha_u, beta2: self.beta2, beta3: self.beta3 },
        )
    }
}

/// Quadratic utility over the number of answers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilitySpec {
    /// Marginal benefit of the first answer.
    pub alpha_u: f64,
    /// Curvature; utility is concave iff positive.
    pub beta1: f64,
    /// Utility of having no answers.
    pub u0: f64,
}

impl UtilitySpec {
    pub fn new(alpha_u: f64, beta1: f64) -> Self {
        UtilitySpec { alpha_u, beta1, u0: 0.0 }
    }

    pub fn with_u0(mut self, u0: f64) -> Self {
        self.u0 = u0;
        self
    }

    pub fn is_concave(&self) -> bool {
        self.beta1 > 0.0
    }
}

/// Linear expected cost of waiting for the next answer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    pub alpha_c: f64,
    pub beta2: f64,
    pub beta3: f64,
}

/// Recombines a utility/cost pair into logit coefficients.
pub fn combine(u: &UtilitySpec, c: &CostSpec) -> LogitCoefficients {
    LogitCoefficients {
        alpha: c.alpha_c - u.alpha_u,
        beta1: u.beta1,
        beta2: c.beta2,
        beta3: c.beta3,
    }
}

fn check_hours(l: f64, w: f64) -> Result<(), ModelError> {
    for (what, value) in [("last inter-arrival", l), ("waiting time", w)] {
        if !value.is_finite() {
            return Err(ModelError::NonFinite { what, value });
        }
        if value < 0.0 {
            return Err(ModelError::NegativeHours { what, value });
        }
    }
    Ok(())
}

/// Probability that the asker closes the question at a visit with `n`
/// answers, last inter-arrival `l` and waiting time `w` (hours).
pub fn close_probability(c: &LogitCoefficients, n: u32, l: f64, w: f64) -> Result<f64, ModelError> {
    if n == 0 {
        return Err(ModelError::NoAnswers);
    }
    check_hours(l, w)?;
    logistic(c.index(n as f64, l, w))
}

pub fn marginal_benefit(u: &UtilitySpec, n: u32) -> f64 {
    u.alpha_u - u.beta1 * n as f64
}

/// `u(n) = (alpha_u + beta1/2) n - (beta1/2) n^2 + u(0)`.
pub fn utility(u: &UtilitySpec, n: u32) -> f64 {
    let n = n as f64;
    let half = 0.5 * u.beta1;
    (u.alpha_u + half) * n - half * n * n + u.u0
}

pub fn expected_wait_cost(c: &CostSpec, l: f64, w: f64) -> Result<f64, ModelError> {
    check_hours(l, w)?;
    Ok(c.alpha_c + c.beta2 * l + c.beta3 * w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Close,
    Wait,
}

/// Myopic rule: close when one more answer is worth less than the expected
/// cost of waiting for it. Ties close.
pub fn myopic_decision(
    u: &UtilitySpec,
    c: &CostSpec,
    n: u32,
    l: f64,
    w: f64,
) -> Result<Decision, ModelError> {
    if n == 0 {
        return Err(ModelError::NoAnswers);
    }
    let cost = expected_wait_cost(c, l, w)?;
    Ok(decide(marginal_benefit(u, n), cost))
}

#[inline]
pub(crate) fn decide(benefit: f64, cost: f64) -> Decision {
    if benefit <= cost {
        Decision::Close
    } else {
        Decision::Wait
    }
}

/// `floor(alpha_u / beta1 + 0.5)`: utility is increasing below this answer
/// count. `None` when `alpha_u <= 0` (no increasing stretch).
pub fn utility_peak(u: &UtilitySpec) -> Result<Option<u64>, ModelError> {
    if !(u.beta1 > 0.0) || !u.beta1.is_finite() {
        return Err(ModelError::NotConcave { beta1: u.beta1 });
    }
    if u.alpha_u <= 0.0 {
        return Ok(None);
    }
    Ok(Some((u.alpha_u / u.beta1 + 0.5).floor() as u64))
}
