//! First-passage simulation: the discrete answer-value walk and its Brownian
//! limit.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::value::StepDistribution;
use crate::error::ThresholdError;
use crate::estimate::InverseGaussianParams;
use crate::rng::{stream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassageSample {
    /// Answers seen until the walk reached the threshold.
    pub steps: u64,
    pub terminal_value: f64,
    /// True when `max_steps` ran out first.
    pub censored: bool,
}

fn walk(start: f64, threshold: f64, step: &StepDistribution, rng: &mut crate::rng::ChaCha8Rng, max_steps: u64) -> PassageSample {
    let mut x = start;
    for k in 1..=max_steps {
        x += step.sample(rng);
        if x <= threshold {
            return PassageSample { steps: k, terminal_value: x, censored: false };
        }
    }
    PassageSample { steps: max_steps, terminal_value: x, censored: true }
}

fn check_walk(start: f64, threshold: f64, step: &StepDistribution, max_steps: u64) -> Result<(), ThresholdError> {
    step.validate()?;
    if !(start > threshold) {
        return Err(ThresholdError::InvalidInput(format!("start {start} must lie above threshold {threshold}")));
    }
    if max_steps == 0 {
        return Err(ThresholdError::InvalidInput("max_steps must be at least 1".into()));
    }
    Ok(())
}

/// Runs `X_{n+1} = X_n + Z_n` from `start` until `X <= threshold`.
pub fn simulate_first_passage(
    start: f64,
    threshold: f64,
    step: &StepDistribution,
    rng_seed: u64,
    max_steps: u64,
) -> Result<PassageSample, ThresholdError> {
    check_walk(start, threshold, step, max_steps)?;
    Ok(walk(start, threshold, step, &mut stream(rng_seed, Purpose::Walk, 0), max_steps))
}

/// Independent walks, path `i` drawing from its own stream.
pub fn first_passage_ensemble(
    start: f64,
    threshold: f64,
    step: &StepDistribution,
    rng_seed: u64,
    max_steps: u64,
    n_paths: usize,
) -> Result<Vec<PassageSample>, ThresholdError> {
    check_walk(start, threshold, step, max_steps)?;
    let one = |i: usize| walk(start, threshold, step, &mut stream(rng_seed, Purpose::Walk, i as u64), max_steps);
    Ok(map_paths(n_paths, one))
}

fn map_paths<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Drifted Brownian motion started `distance` above an absorbing barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrownianSpec {
    pub distance: f64,
    pub drift: f64,
    pub sigma: f64,
}

impl BrownianSpec {
    /// Parameters whose passage times follow `ig` exactly in continuous time.
    pub fn for_inverse_gaussian(ig: &InverseGaussianParams, sigma: f64) -> Self {
        let distance = sigma * ig.lambda.sqrt();
        BrownianSpec { distance, drift: -distance / ig.mu, sigma }
    }

    /// `IG(distance / |drift|, distance² / σ²)`.
    pub fn passage_distribution(&self) -> Result<InverseGaussianParams, ThresholdError> {
        self.validate()?;
        InverseGaussianParams::new(self.distance / self.drift.abs(), (self.distance / self.sigma).powi(2))
            .map_err(|e| ThresholdError::InvalidInput(e.to_string()))
    }

    fn validate(&self) -> Result<(), ThresholdError> {
        if !(self.distance > 0.0 && self.distance.is_finite()) {
            return Err(ThresholdError::InvalidInput(format!("distance must be positive, got {}", self.distance)));
        }
        if !(self.drift < 0.0 && self.drift.is_finite()) {
            return Err(ThresholdError::InvalidInput(format!(
                "drift must be negative for almost-sure passage, got {}",
                self.drift
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(ThresholdError::InvalidInput(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassageTime {
    pub time: f64,
    pub censored: bool,
}

/// Euler paths with increments `N(drift dt, σ² dt)`; each path stops at the
/// first step at or below the barrier or at `max_time`.
pub fn brownian_passage_ensemble(
    spec: BrownianSpec,
    dt: f64,
    n_paths: usize,
    rng_seed: u64,
    max_time: f64,
) -> Result<Vec<PassageTime>, ThresholdError> {
    spec.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(ThresholdError::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if !(max_time > 0.0) {
        return Err(ThresholdError::InvalidInput(format!("max_time must be positive, got {max_time}")));
    }
    let mean = spec.drift * dt;
    let sd = spec.sigma * dt.sqrt();
    let max_steps = (max_time / dt).ceil() as u64;
    let one = |i: usize| {
        let mut rng = stream(rng_seed, Purpose::Brownian, i as u64);
        let mut x = spec.distance;
        for k in 1..=max_steps {
            let z: f64 = StandardNormal.sample(&mut rng);
            x += mean + sd * z;
            if x <= 0.0 {
                return PassageTime { time: k as f64 * dt, censored: false };
            }
        }
        PassageTime { time: max_steps as f64 * dt, censored: true }
    };
    Ok(map_paths(n_paths, one))
}

pub fn passage_csv(times: &[PassageTime]) -> String {
    let mut out = String::from("path_index,passage_time,censored\n");
    for (i, p) in times.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", p.time, u8::from(p.censored)));
    }
    out
}
