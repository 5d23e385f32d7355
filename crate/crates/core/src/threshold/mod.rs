//! Threshold stopping on a random walk of answer values.

pub mod hermite;
pub mod passage;
pub mod value;

pub use passage::{
    brownian_passage_ensemble, first_passage_ensemble, passage_csv, simulate_first_passage, BrownianSpec,
    PassageSample, PassageTime,
};
pub use value::{find_threshold, solve_value_function, GridSpec, StepDistribution, ThresholdSolution};
