//! Infinite-horizon value of waiting for more answers when answer values
//! follow a random walk, solved by value iteration on a uniform grid.
//!
//! `V(x) = x + max(0, δ E[V(x + Z)])`. Below the grid the asker always stops,
//! so `V(x) = x`; above it the asker always continues and `V` follows the
//! affine asymptote `x / (1 − δ) + δ E[Z] / (1 − δ)²`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::hermite;
use crate::error::{GridSide, ThresholdError};

pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StepDistribution {
    Deterministic(f64),
    Normal { mean: f64, sd: f64 },
    /// `(value, probability)` atoms.
    Discrete(Vec<(f64, f64)>),
}

impl StepDistribution {
    pub fn validate(&self) -> Result<(), ThresholdError> {
        let bad = |m: String| Err(ThresholdError::InvalidInput(m));
        match self {
            StepDistribution::Deterministic(d) if !d.is_finite() => bad(format!("step {d} is not finite")),
            StepDistribution::Normal { mean, sd } if !mean.is_finite() || !(*sd > 0.0 && sd.is_finite()) => {
                bad(format!("normal step needs finite mean and positive sd, got ({mean}, {sd})"))
            }
            StepDistribution::Discrete(atoms) => {
                if atoms.is_empty() {
                    return bad("discrete step has no atoms".into());
                }
                if atoms.iter().any(|(v, p)| !v.is_finite() || !(*p >= 0.0)) {
                    return bad("discrete atoms need finite values and non-negative probabilities".into());
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return bad(format!("discrete probabilities sum to {total}, not 1"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            StepDistribution::Deterministic(d) => *d,
            StepDistribution::Normal { mean, .. } => *mean,
            StepDistribution::Discrete(atoms) => atoms.iter().map(|(v, p)| v * p).sum(),
        }
    }

    /// Offsets and weights used to evaluate `E[f(x + Z)]`: exact atoms for
    /// deterministic and discrete steps, 31-node Gauss–Hermite for normal.
    pub fn quadrature(&self) -> Vec<(f64, f64)> {
        match self {
            StepDistribution::Deterministic(d) => vec![(*d, 1.0)],
            StepDistribution::Normal { mean, sd } => hermite::normal_points(*mean, *sd, hermite::NODES),
            StepDistribution::Discrete(atoms) => atoms.clone(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            StepDistribution::Deterministic(d) => *d,
            StepDistribution::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            StepDistribution::Discrete(atoms) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in atoms {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                atoms.last().expect("validated non-empty").0
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, count: usize) -> Self {
        GridSpec { lo, hi, count }
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.count - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.count).map(|i| self.lo + i as f64 * h).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSolution {
    pub x_star: f64,
    pub delta: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `δ E[V(x + Z)]` at each grid point.
    pub continuation: Vec<f64>,
    pub iterations: usize,
    pub sup_norm_residual: f64,
    /// Sup-norm change of every sweep, in order.
    pub residuals: Vec<f64>,
}

impl ThresholdSolution {
    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Stop iff the last answer's value is at or below the threshold.
    pub fn should_stop(&self, last_value: f64) -> bool {
        last_value <= self.x_star
    }

    /// `x,V,continuation` rows followed by a `#` summary line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,V,continuation\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!("{},{},{}\n", self.grid[i], self.values[i], self.continuation[i]));
        }
        out.push_str(&format!("# x_star={},delta={},iterations={}\n", self.x_star, self.delta, self.iterations));
        out
    }
}

struct Bellman<'a> {
    grid: &'a GridSpec,
    h: f64,
    delta: f64,
    upper_slope: f64,
    upper_intercept: f64,
    points: Vec<(f64, f64)>,
}

impl Bellman<'_> {
    fn value_at(&self, values: &[f64], y: f64) -> f64 {
        if y <= self.grid.lo {
            return y;
        }
        if y >= self.grid.hi {
            return self.upper_slope * y + self.upper_intercept;
        }
        let s = (y - self.grid.lo) / self.h;
        let i = (s.floor() as usize).min(values.len() - 2);
        let frac = s - i as f64;
        values[i] + frac * (values[i + 1] - values[i])
    }

    fn continuation(&self, values: &[f64], x: f64) -> f64 {
        self.delta * self.points.iter().map(|&(z, w)| w * self.value_at(values, x + z)).sum::<f64>()
    }
}

pub fn solve_value_function(
    step: &StepDistribution,
    delta: f64,
    grid: GridSpec,
    tol: f64,
) -> Result<ThresholdSolution, ThresholdError> {
    step.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ThresholdError::InvalidInput(format!("discount must lie in (0, 1), got {delta}")));
    }
    if !(grid.hi > grid.lo) || !grid.lo.is_finite() || !grid.hi.is_finite() || grid.count < 100 {
        return Err(ThresholdError::InvalidInput(format!(
            "grid needs hi > lo and at least 100 points, got {}:{}:{}",
            grid.lo, grid.hi, grid.count
        )));
    }
    if !(tol > 0.0) {
        return Err(ThresholdError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }

    let one_minus = 1.0 - delta;
    let op = Bellman {
        grid: &grid,
        h: grid.spacing(),
        delta,
        upper_slope: 1.0 / one_minus,
        upper_intercept: delta * step.mean() / (one_minus * one_minus),
        points: step.quadrature(),
    };
    let xs = grid.points();
    let mut values = xs.clone();
    let mut next = vec![0.0; xs.len()];
    let mut residuals = Vec::new();
    loop {
        let mut change = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            next[i] = x + op.continuation(&values, x).max(0.0);
            change = change.max((next[i] - values[i]).abs());
        }
        std::mem::swap(&mut values, &mut next);
        residuals.push(change);
        if change < tol {
            break;
        }
        if residuals.len() >= MAX_ITERATIONS {
            return Err(ThresholdError::NoConvergence { iterations: residuals.len(), residual: change });
        }
    }

    let continuation: Vec<f64> = xs.iter().map(|&x| op.continuation(&values, x)).collect();
    let mut sol = ThresholdSolution {
        x_star: f64::NAN,
        delta,
        grid: xs,
        values,
        continuation,
        iterations: residuals.len(),
        sup_norm_residual: *residuals.last().expect("at least one sweep"),
        residuals,
    };
    sol.x_star = find_threshold(&sol)?;
    Ok(sol)
}

/// Root of the continuation value, linearly interpolated between the two
/// grid points that bracket its single sign change.
pub fn find_threshold(sol: &ThresholdSolution) -> Result<f64, ThresholdError> {
    let c = &sol.continuation;
    let positive = |v: f64| v > 0.0;
    let crossings: Vec<usize> = (0..c.len().saturating_sub(1))
        .filter(|&i| positive(c[i]) != positive(c[i + 1]))
        .collect();
    match crossings.as_slice() {
        [] if c.first().is_some_and(|&v| positive(v)) => Err(ThresholdError::OutsideGrid { direction: GridSide::Below }),
        [] => Err(ThresholdError::OutsideGrid { direction: GridSide::Above }),
        &[i] => {
            let (x0, x1) = (sol.grid[i], sol.grid[i + 1]);
            let (c0, c1) = (c[i], c[i + 1]);
            if c0 == 0.0 {
                return Ok(x0);
            }
            Ok(x0 + (x1 - x0) * (-c0) / (c1 - c0))
        }
        many => Err(ThresholdError::MultipleCrossings(many.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_step_threshold() {
        for d in [0.5, 1.0, 2.0] {
            for delta in [0.5, 0.9, 0.99] {
                let grid = GridSpec::new(-5.0, 15.0, 401);
                let sol = solve_value_function(&StepDistribution::Deterministic(-d), delta, grid, 1e-10).unwrap();
                assert!((sol.x_star - d).abs() <= grid.spacing(), "d={d} δ={delta} x*={}", sol.x_star);
            }
        }
    }

    #[test]
    fn residuals_contract() {
        let sol = solve_value_function(&StepDistribution::Normal { mean: -0.4, sd: 1.0 }, 0.8, GridSpec::new(-10.0, 40.0, 501), 1e-10).unwrap();
        for pair in sol.residuals.windows(2) {
            if pair[0] > 1e-12 {
                assert!(pair[1] <= 0.8 * pair[0] * (1.0 + 1e-9) + 1e-14, "{pair:?}");
            }
        }
    }

    #[test]
    fn value_properties() {
        let sol = solve_value_function(&StepDistribution::Normal { mean: -0.4, sd: 1.0 }, 0.95, GridSpec::new(-10.0, 40.0, 1001), 1e-10).unwrap();
        for i in 0..sol.grid.len() {
            assert!(sol.values[i] >= sol.grid[i] - 1e-12);
            if sol.grid[i] < sol.x_star - sol.spacing() {
                assert!((sol.values[i] - sol.grid[i]).abs() < 1e-12);
            }
        }
        for w in sol.values.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for w in sol.continuation.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        assert!(sol.should_stop(sol.x_star - 0.1) && !sol.should_stop(sol.x_star + 0.1));
    }

    #[test]
    fn discrete_matches_deterministic() {
        let det = solve_value_function(&StepDistribution::Deterministic(-1.0), 0.9, GridSpec::new(-5.0, 15.0, 201), 1e-10).unwrap();
        let disc = solve_value_function(&StepDistribution::Discrete(vec![(-1.0, 1.0)]), 0.9, GridSpec::new(-5.0, 15.0, 201), 1e-10).unwrap();
        assert_eq!(det.values, disc.values);
        assert_eq!(det.x_star, disc.x_star);
    }

    #[test]
    fn grid_errors() {
        let up = StepDistribution::Deterministic(-1.0);
        // threshold at 1.0 lies above a grid that ends at 0.5
        let err = solve_value_function(&up, 0.9, GridSpec::new(-10.0, 0.5, 200), 1e-9).unwrap_err();
        assert_eq!(err, ThresholdError::OutsideGrid { direction: GridSide::Above });
        let err = solve_value_function(&up, 0.9, GridSpec::new(2.0, 10.0, 200), 1e-9).unwrap_err();
        assert_eq!(err, ThresholdError::OutsideGrid { direction: GridSide::Below });
        assert!(solve_value_function(&up, 1.0, GridSpec::new(-1.0, 1.0, 200), 1e-9).is_err());
        assert!(solve_value_function(&up, 0.5, GridSpec::new(-1.0, 1.0, 50), 1e-9).is_err());
        assert!(solve_value_function(&StepDistribution::Discrete(vec![(-1.0, 0.5)]), 0.5, GridSpec::new(-1.0, 3.0, 200), 1e-9).is_err());
    }

    #[test]
    fn multiple_crossings_detected() {
        let sol = ThresholdSolution {
            x_star: 0.0,
            delta: 0.5,
            grid: vec![0.0, 1.0, 2.0, 3.0],
            values: vec![0.0; 4],
            continuation: vec![-1.0, 1.0, -1.0, 1.0],
            iterations: 1,
            sup_norm_residual: 0.0,
            residuals: vec![],
        };
        assert_eq!(find_threshold(&sol), Err(ThresholdError::MultipleCrossings(3)));
    }

    #[test]
    fn csv_layout() {
        let sol = solve_value_function(&StepDistribution::Deterministic(-1.0), 0.5, GridSpec::new(-2.0, 4.0, 121), 1e-12).unwrap();
        let csv = sol.to_csv();
        assert!(csv.starts_with("x,V,continuation\n-2,-2,"));
        assert!(csv.trim_end().lines().last().unwrap().starts_with("# x_star=1,delta=0.5,iterations="));
    }
}
