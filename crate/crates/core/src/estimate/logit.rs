//! Maximum likelihood for the per-visit logit model by Newton–Raphson.
//!
//! Sums over observations are accumulated in fixed-size chunks and the chunk
//! partials are combined in chunk order, so results are bit-identical whether
//! or not the chunks are processed in parallel.

use serde::{Deserialize, Serialize};

use super::linalg::{cholesky_inverse, Mat4, Vec4};
use super::normal;
use crate::error::EstimationError;
use crate::model::LogitCoefficients;
use crate::visits::VisitObservation;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogitOptions {
    pub max_iterations: usize,
    /// Convergence when the gradient max-norm drops below this.
    pub gradient_tolerance: f64,
    pub max_halvings: usize,
    /// Coefficient norm treated as divergence (separation).
    pub divergence_norm: f64,
    /// Linear predictor magnitude beyond which a fitted probability counts
    /// as saturated at 0 or 1. Newton's gradient vanishes along a separating
    /// direction long before the coefficient norm grows large, so saturation
    /// is the practical symptom.
    pub saturation_logit: f64,
}

impl Default for LogitOptions {
    fn default() -> Self {
        LogitOptions { max_iterations: 100, gradient_tolerance: 1e-8, max_halvings: 30, divergence_norm: 1e3, saturation_logit: 30.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitFit {
    pub coefficients: LogitCoefficients,
    /// Order: alpha, beta1, beta2, beta3.
    pub standard_errors: [f64; 4],
    pub log_likelihood: f64,
    pub n_observations: usize,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_max_norm: f64,
    /// Log-likelihood after each line-search step, starting at the zero
    /// vector. Polishing steps below the rounding floor are not recorded.
    pub trace: Vec<f64>,
}

impl LogitFit {
    pub fn z_scores(&self) -> [f64; 4] {
        let b = self.coefficients.as_array();
        std::array::from_fn(|i| b[i] / self.standard_errors[i])
    }

    pub fn p_values(&self) -> [f64; 4] {
        self.z_scores().map(normal::two_sided_p)
    }
}

/// Stars for the 1%, 0.5% and 0.1% levels.
pub fn significance_stars(p_value: f64) -> &'static str {
    if p_value < 0.001 {
        "***"
    } else if p_value < 0.005 {
        "**"
    } else if p_value < 0.01 {
        "*"
    } else {
        ""
    }
}

/// Design matrix and outcomes for the four-coefficient model.
#[derive(Debug, Clone)]
pub struct LogitProblem {
    rows: Vec<Vec4>,
    outcomes: Vec<bool>,
}

/// `ln(1 + e^x)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

#[derive(Clone, Copy, Default)]
struct Partial {
    ll: f64,
    grad: Vec4,
    info: Mat4,
}

impl Partial {
    fn add(mut self, other: &Partial) -> Partial {
        self.ll += other.ll;
        for i in 0..4 {
            self.grad[i] += other.grad[i];
            for j in 0..4 {
                self.info[i][j] += other.info[i][j];
            }
        }
        self
    }
}

impl LogitProblem {
    pub fn new(observations: &[VisitObservation]) -> Result<Self, EstimationError> {
        let mut rows = Vec::with_capacity(observations.len());
        let mut outcomes = Vec::with_capacity(observations.len());
        for (index, o) in observations.iter().enumerate() {
            let row = [1.0, o.n_answers as f64, o.last_interarrival, o.waiting];
            if row.iter().any(|v| !v.is_finite()) {
                return Err(EstimationError::NonFiniteCovariate { index });
            }
            rows.push(row);
            outcomes.push(o.closed);
        }
        Self::from_parts(rows, outcomes)
    }

    /// Builds a problem from raw rows `[1, n, l, w]` (or any four columns).
    pub fn from_parts(rows: Vec<Vec4>, outcomes: Vec<bool>) -> Result<Self, EstimationError> {
        assert_eq!(rows.len(), outcomes.len(), "rows and outcomes differ in length");
        if rows.is_empty() {
            return Err(EstimationError::Empty);
        }
        let ones = outcomes.iter().filter(|&&y| y).count();
        if ones == 0 || ones == outcomes.len() {
            return Err(EstimationError::SingleOutcome { n: outcomes.len() });
        }
        Ok(LogitProblem { rows, outcomes })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn chunk_partial(&self, start: usize, beta: &Vec4, with_info: bool) -> Partial {
        let end = (start + CHUNK).min(self.rows.len());
        let mut acc = Partial::default();
        for (x, &y) in self.rows[start..end].iter().zip(&self.outcomes[start..end]) {
            let z = x[0] * beta[0] + x[1] * beta[1] + x[2] * beta[2] + x[3] * beta[3];
            acc.ll -= if y { softplus(-z) } else { softplus(z) };
            let p = crate::model::logistic_unchecked(z);
            let resid = if y { 1.0 - p } else { -p };
            for i in 0..4 {
                acc.grad[i] += resid * x[i];
            }
            if with_info {
                let wgt = p * (1.0 - p);
                for i in 0..4 {
                    for j in 0..=i {
                        acc.info[i][j] += wgt * x[i] * x[j];
                    }
                }
            }
        }
        acc
    }

    fn evaluate(&self, beta: &Vec4, with_info: bool) -> Partial {
        let starts: Vec<usize> = (0..self.rows.len()).step_by(CHUNK).collect();
        #[cfg(feature = "parallel")]
        let parts: Vec<Partial> = {
            use rayon::prelude::*;
            starts.par_iter().map(|&s| self.chunk_partial(s, beta, with_info)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let parts: Vec<Partial> = starts.iter().map(|&s| self.chunk_partial(s, beta, with_info)).collect();
        let mut total = parts.iter().fold(Partial::default(), |acc, p| acc.add(p));
        for i in 0..4 {
            for j in (i + 1)..4 {
                total.info[i][j] = total.info[j][i];
            }
        }
        total
    }

    fn saturated(&self, beta: &Vec4, limit: f64) -> Option<usize> {
        self.rows.iter().position(|x| (0..4).map(|i| x[i] * beta[i]).sum::<f64>().abs() > limit)
    }

    pub fn log_likelihood(&self, c: &LogitCoefficients) -> f64 {
        self.evaluate(&c.as_array(), false).ll
    }

    /// Analytic score vector `sum (y - p) x`.
    pub fn gradient(&self, c: &LogitCoefficients) -> Vec4 {
        self.evaluate(&c.as_array(), false).grad
    }

    /// Observed information `sum p (1 - p) x x^T`.
    pub fn information(&self, c: &LogitCoefficients) -> Mat4 {
        self.evaluate(&c.as_array(), true).info
    }

    pub fn fit(&self, opts: &LogitOptions) -> Result<LogitFit, EstimationError> {
        let mut beta: Vec4 = [0.0; 4];
        let mut state = self.evaluate(&beta, true);
        let mut trace = vec![state.ll];
        let mut iterations = 0;
        let mut at_floor = false;
        let max_norm = |g: &Vec4| g.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        while max_norm(&state.grad) >= opts.gradient_tolerance && iterations < opts.max_iterations {
            iterations += 1;
            let inv = cholesky_inverse(&state.info).ok_or_else(|| EstimationError::NonConvergence {
                iterations,
                reason: "information matrix is singular (collinear covariates or separation)".into(),
            })?;
            let step: Vec4 = std::array::from_fn(|i| (0..4).map(|j| inv[i][j] * state.grad[j]).sum());
            // On large samples the summed gradient carries rounding noise near
            // the absolute tolerance; once the predicted gain is at the
            // rounding floor of the log-likelihood, further steps are noise.
            let decrement: f64 = (0..4).map(|i| step[i] * state.grad[i]).sum();
            if decrement <= rounding_floor(state.ll) {
                // The likelihood can no longer arbitrate, but a full Newton
                // step still sharpens the score while it keeps shrinking.
                at_floor = true;
                let cand: Vec4 = std::array::from_fn(|i| beta[i] + step[i]);
                let next = self.evaluate(&cand, true);
                if max_norm(&next.grad) < max_norm(&state.grad) {
                    beta = cand;
                    state = next;
                    continue;
                }
                break;
            }

            let mut scale = 1.0;
            let mut accepted = None;
            for _ in 0..=opts.max_halvings {
                let cand: Vec4 = std::array::from_fn(|i| beta[i] + scale * step[i]);
                let next = self.evaluate(&cand, true);
                if next.ll >= state.ll {
                    accepted = Some((cand, next));
                    break;
                }
                scale *= 0.5;
            }
            let Some((cand, next)) = accepted else {
                // No halving improves the likelihood: we sit at the optimum up
                // to rounding.
                break;
            };
            beta = cand;
            state = next;
            trace.push(state.ll);

            let norm = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
            if norm > opts.divergence_norm {
                return Err(EstimationError::NonConvergence {
                    iterations,
                    reason: format!("coefficient norm {norm:.3e} diverges; outcomes look separable"),
                });
            }
        }

        if let Some(index) = self.saturated(&beta, opts.saturation_logit) {
            return Err(EstimationError::NonConvergence {
                iterations,
                reason: format!("fitted probability of row {index} is 0 or 1; outcomes look separable"),
            });
        }
        let gradient_max_norm = max_norm(&state.grad);
        let inv = cholesky_inverse(&state.info).ok_or_else(|| EstimationError::NonConvergence {
            iterations,
            reason: "information matrix is singular at the optimum".into(),
        })?;
        Ok(LogitFit {
            coefficients: LogitCoefficients::from_array(beta),
            standard_errors: std::array::from_fn(|i| inv[i][i].max(0.0).sqrt()),
            log_likelihood: state.ll,
            n_observations: self.len(),
            iterations,
            converged: at_floor || gradient_max_norm < opts.gradient_tolerance,
            gradient_max_norm,
            trace,
        })
    }
}

/// Smallest log-likelihood gain distinguishable from summation rounding.
fn rounding_floor(ll: f64) -> f64 {
    64.0 * f64::EPSILON * ll.abs().max(1.0)
}

/// Fits the close model to expanded visit rows with default options.
pub fn fit_logit(observations: &[VisitObservation]) -> Result<LogitFit, EstimationError> {
    LogitProblem::new(observations)?.fit(&LogitOptions::default())
}
