//! Browser bindings for the demo page. Each export returns a JSON string so
//! the page needs nothing beyond `JSON.parse`.

use serde::Serialize;
use stopwait_core::estimate::{fit_inverse_gaussian, ks_distance, InverseGaussianParams};
use stopwait_core::rng::{stream, Purpose};
use stopwait_core::threshold::{solve_value_function, GridSpec, StepDistribution};
use stopwait_core::{utility, utility_peak, UtilitySpec};
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Curve {
    alpha_u: f64,
    values: Vec<f64>,
    peak: Option<u64>,
}

#[derive(Serialize)]
struct UtilityCurves {
    n: Vec<u32>,
    curves: Vec<Curve>,
}

#[derive(Serialize)]
struct InvGaussFit {
    x: Vec<f64>,
    true_pdf: Vec<f64>,
    fitted_pdf: Vec<f64>,
    /// Sample histogram as a density on the same bins as `x`.
    density: Vec<f64>,
    mu: f64,
    lambda: f64,
    ks: f64,
}

#[derive(Serialize)]
struct Threshold {
    x: Vec<f64>,
    values: Vec<f64>,
    continuation: Vec<f64>,
    x_star: f64,
    iterations: usize,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, JsError> {
    serde_json::to_string(value).map_err(|e| JsError::new(&e.to_string()))
}

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// `u(n)` for `n = 0..=n_max`, one curve per utility intercept.
#[wasm_bindgen]
pub fn utility_curves(alpha_us: &[f64], beta1: f64, n_max: u32) -> Result<String, JsError> {
    let curves = alpha_us
        .iter()
        .map(|&alpha_u| {
            let spec = UtilitySpec::new(alpha_u, beta1);
            Ok(Curve {
                alpha_u,
                values: (0..=n_max).map(|n| utility(&spec, n)).collect(),
                peak: utility_peak(&spec).map_err(err)?,
            })
        })
        .collect::<Result<_, JsError>>()?;
    to_json(&UtilityCurves { n: (0..=n_max).collect(), curves })
}

/// Draws `samples` values from IG(mu, lambda), refits them, and returns both
/// densities with a histogram over `[0, x_max]`.
#[wasm_bindgen]
pub fn invgauss_fit(mu: f64, lambda: f64, samples: usize, seed: u64, x_max: f64, bins: usize) -> Result<String, JsError> {
    let truth = InverseGaussianParams::new(mu, lambda).map_err(err)?;
    if x_max.is_nan() || x_max <= 0.0 || bins == 0 {
        return Err(JsError::new("x_max must be positive and bins at least 1"));
    }
    let mut rng = stream(seed, Purpose::Sampling, 0);
    let draws: Vec<f64> = (0..samples).map(|_| truth.sample(&mut rng)).collect();
    let fit = fit_inverse_gaussian(&draws).map_err(err)?;
    let ks = ks_distance(&draws, |x| fit.cdf(x).unwrap_or(0.0));

    let width = x_max / bins as f64;
    let mut counts = vec![0usize; bins];
    for &d in &draws {
        let k = (d / width) as usize;
        if k < bins {
            counts[k] += 1;
        }
    }
    let x: Vec<f64> = (0..bins).map(|k| (k as f64 + 0.5) * width).collect();
    let pdf = |p: &InverseGaussianParams| x.iter().map(|&v| p.pdf(v).unwrap_or(0.0)).collect::<Vec<_>>();
    to_json(&InvGaussFit {
        true_pdf: pdf(&truth),
        fitted_pdf: pdf(&fit),
        density: counts.iter().map(|&c| c as f64 / (samples as f64 * width)).collect(),
        x,
        mu: fit.mu,
        lambda: fit.lambda,
        ks,
    })
}

/// Value function and threshold for normal answer-value steps.
#[wasm_bindgen]
pub fn threshold_solve(discount: f64, step_mean: f64, step_sd: f64, lo: f64, hi: f64, points: usize) -> Result<String, JsError> {
    let step = StepDistribution::Normal { mean: step_mean, sd: step_sd };
    let sol = solve_value_function(&step, discount, GridSpec::new(lo, hi, points), 1e-9).map_err(err)?;
    to_json(&Threshold {
        x: sol.grid,
        values: sol.values,
        continuation: sol.continuation,
        x_star: sol.x_star,
        iterations: sol.iterations,
    })
}
