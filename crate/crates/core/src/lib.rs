//! Models of when question askers stop waiting for answers.
//!
//! Two complementary views are implemented:
//!
//! * a myopic speed/quantity tradeoff, where at every visit the asker weighs
//!   the marginal benefit of one more answer against the expected cost of
//!   waiting for it, estimated as a per-visit logit ([`model`], [`visits`],
//!   [`estimate::logit`]);
//! * a threshold policy on a random walk of answer values, whose stopping
//!   time is inverse Gaussian in the Brownian limit ([`threshold`],
//!   [`estimate::invgauss`]).
//!
//! [`sim`] generates synthetic corpora with known parameters so every
//! estimator can be checked by parameter recovery, and [`ingest`] reads and
//! writes the question event logs that flow between the stages.

// Negated comparisons reject NaN along with out-of-range values, and dense
// index loops read closer to the linear algebra they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod estimate;
pub mod ingest;
pub mod model;
pub mod rng;
pub mod sim;
pub mod threshold;
pub mod visits;

pub use error::{Error, Result};
pub use ingest::{filter_eligible, open_duration_histogram, parse_event_log, write_event_log, LogFormat, QuestionRecord};
pub use model::{
    close_probability, expected_wait_cost, logistic, marginal_benefit, myopic_decision, utility, utility_peak,
    CostSpec, Decision, LogitCoefficients, UtilitySpec,
};
pub use visits::{expand_corpus, expand_question, summarize, ExpansionOptions, QuestionSummary, VisitObservation};
