//! Synthetic question corpora with known ground truth.
//!
//! Each question gets an answer-arrival process and an asker agent that walks
//! the visit schedule used by [`crate::visits`] and decides at every visit
//! whether to close. Randomness is drawn per question from
//! [`crate::rng::stream`], so a question's history depends only on the seed
//! and its index.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, LogNormal};

use crate::error::Error;
use crate::ingest::QuestionRecord;
use crate::model::{expected_wait_cost, utility, CostSpec, LogitCoefficients, UtilitySpec};
use crate::rng::{open_unit, stream, Purpose};
use crate::visits::{grid_time, interarrival};

/// Initial open period of a question, in hours.
pub const DEFAULT_HORIZON: f64 = 96.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterArrival {
    Gamma { shape: f64, mean: f64 },
    LogNormal { median: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArrivalProcess {
    /// Exponential gaps at `rate` answers per hour.
    Poisson { rate: f64 },
    Renewal(InterArrival),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Agent {
    /// Closes with the logit probability at each visit.
    Logit(LogitCoefficients),
    /// Compares `u(n) + ε₀` with `u(n+1) − E[c] + ε₁` under fresh Gumbel noise.
    Gumbel { utility: UtilitySpec, cost: CostSpec },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimScenario {
    pub n_questions: usize,
    pub arrival: ArrivalProcess,
    pub horizon: f64,
    pub visit_interval: f64,
    pub agent: Agent,
    pub seed: u64,
    /// Whether the asker also looks at the question the moment an answer
    /// arrives (a visit with zero waiting time). Off by default: the visit
    /// expansion has no zero-wait rows, so closes at arrival instants would
    /// all be unmatched by non-close rows and the logit fit degenerates.
    pub arrival_checks: bool,
}

impl SimScenario {
    pub fn new(n_questions: usize, arrival: ArrivalProcess, agent: Agent, seed: u64) -> Self {
        SimScenario {
            n_questions,
            arrival,
            horizon: DEFAULT_HORIZON,
            visit_interval: 1.0,
            agent,
            seed,
            arrival_checks: false,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Scenario(m));
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.visit_interval > 0.0 && self.visit_interval.is_finite()) {
            return bad(format!("visit interval must be positive, got {}", self.visit_interval));
        }
        match self.arrival {
            ArrivalProcess::Poisson { rate } if !(rate > 0.0 && rate.is_finite()) => {
                return bad(format!("arrival rate must be positive, got {rate}"))
            }
            ArrivalProcess::Renewal(InterArrival::Gamma { shape, mean }) if !(shape > 0.0 && mean > 0.0) => {
                return bad(format!("gamma gaps need positive shape and mean, got ({shape}, {mean})"))
            }
            ArrivalProcess::Renewal(InterArrival::LogNormal { median, sigma }) if !(median > 0.0 && sigma >= 0.0) => {
                return bad(format!("lognormal gaps need positive median, got ({median}, {sigma})"))
            }
            _ => {}
        }
        let finite = match self.agent {
            Agent::Logit(c) => c.as_array().iter().all(|v| v.is_finite()),
            Agent::Gumbel { utility: u, cost: c } => {
                [u.alpha_u, u.beta1, u.u0, c.alpha_c, c.beta2, c.beta3].iter().all(|v| v.is_finite())
            }
        };
        if !finite {
            return bad("agent parameters must be finite".into());
        }
        Ok(())
    }

    /// Flat `key=value` form, readable by [`SimScenario::from_kv`].
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "questions={}", self.n_questions);
        match self.arrival {
            ArrivalProcess::Poisson { rate } => {
                let _ = writeln!(s, "arrival=poisson\nrate={rate}");
            }
            ArrivalProcess::Renewal(InterArrival::Gamma { shape, mean }) => {
                let _ = writeln!(s, "arrival=gamma\nshape={shape}\nmean_gap={mean}");
            }
            ArrivalProcess::Renewal(InterArrival::LogNormal { median, sigma }) => {
                let _ = writeln!(s, "arrival=lognormal\nmedian_gap={median}\nsigma={sigma}");
            }
        }
        let _ = writeln!(s, "horizon={}\nvisit_interval={}", self.horizon, self.visit_interval);
        match self.agent {
            Agent::Logit(c) => {
                let _ = writeln!(s, "agent=logit\nalpha={}\nbeta1={}\nbeta2={}\nbeta3={}", c.alpha, c.beta1, c.beta2, c.beta3);
            }
            Agent::Gumbel { utility: u, cost: c } => {
                let _ = writeln!(
                    s,
                    "agent=gumbel\nalpha_u={}\nbeta1={}\nu0={}\nalpha_c={}\nbeta2={}\nbeta3={}",
                    u.alpha_u, u.beta1, u.u0, c.alpha_c, c.beta2, c.beta3
                );
            }
        }
        let _ = writeln!(s, "arrival_checks={}\nseed={}", self.arrival_checks, self.seed);
        s
    }

    /// Parses a scenario file. Blank lines and `#` comments are ignored;
    /// omitted keys take the reference defaults (Poisson rate 0.5, logit
    /// agent at the reference coefficients, 96 h horizon, hourly visits, no
    /// arrival checks).
    pub fn from_kv(text: &str) -> Result<Self, Error> {
        let mut kv = std::collections::BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Scenario(format!("line {}: expected key=value", i + 1)))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let take = |kv: &mut std::collections::BTreeMap<String, String>, key: &str| kv.remove(key);
        fn num<T: std::str::FromStr>(key: &str, v: Option<String>, default: T) -> Result<T, Error> {
            match v {
                None => Ok(default),
                Some(s) => s.parse().map_err(|_| Error::Scenario(format!("{key}: cannot parse `{s}`"))),
            }
        }
        let r = LogitCoefficients::REFERENCE;
        let n_questions = num("questions", take(&mut kv, "questions"), 1000usize)?;
        let arrival = match take(&mut kv, "arrival").as_deref().unwrap_or("poisson") {
            "poisson" => ArrivalProcess::Poisson { rate: num("rate", take(&mut kv, "rate"), 0.5)? },
            "gamma" => ArrivalProcess::Renewal(InterArrival::Gamma {
                shape: num("shape", take(&mut kv, "shape"), 1.0)?,
                mean: num("mean_gap", take(&mut kv, "mean_gap"), 2.0)?,
            }),
            "lognormal" => ArrivalProcess::Renewal(InterArrival::LogNormal {
                median: num("median_gap", take(&mut kv, "median_gap"), 1.0)?,
                sigma: num("sigma", take(&mut kv, "sigma"), 1.0)?,
            }),
            other => return Err(Error::Scenario(format!("unknown arrival process `{other}`"))),
        };
        let horizon = num("horizon", take(&mut kv, "horizon"), DEFAULT_HORIZON)?;
        let visit_interval = num("visit_interval", take(&mut kv, "visit_interval"), 1.0)?;
        let agent = match take(&mut kv, "agent").as_deref().unwrap_or("logit") {
            "logit" => Agent::Logit(LogitCoefficients {
                alpha: num("alpha", take(&mut kv, "alpha"), r.alpha)?,
                beta1: num("beta1", take(&mut kv, "beta1"), r.beta1)?,
                beta2: num("beta2", take(&mut kv, "beta2"), r.beta2)?,
                beta3: num("beta3", take(&mut kv, "beta3"), r.beta3)?,
            }),
            "gumbel" => {
                let alpha_u = num("alpha_u", take(&mut kv, "alpha_u"), 1.0)?;
                Agent::Gumbel {
                    utility: UtilitySpec {
                        alpha_u,
                        beta1: num("beta1", take(&mut kv, "beta1"), r.beta1)?,
                        u0: num("u0", take(&mut kv, "u0"), 0.0)?,
                    },
                    cost: CostSpec {
                        alpha_c: num("alpha_c", take(&mut kv, "alpha_c"), r.alpha + alpha_u)?,
                        beta2: num("beta2", take(&mut kv, "beta2"), r.beta2)?,
                        beta3: num("beta3", take(&mut kv, "beta3"), r.beta3)?,
                    },
                }
            }
            other => return Err(Error::Scenario(format!("unknown agent `{other}`"))),
        };
        let arrival_checks = num("arrival_checks", take(&mut kv, "arrival_checks"), false)?;
        let seed = num("seed", take(&mut kv, "seed"), 0u64)?;
        if let Some(k) = kv.keys().next() {
            return Err(Error::Scenario(format!("unknown key `{k}`")));
        }
        let s = SimScenario { n_questions, arrival, horizon, visit_interval, agent, seed, arrival_checks };
        s.validate()?;
        Ok(s)
    }
}

fn gap<R: Rng + ?Sized>(process: &ArrivalProcess, rng: &mut R) -> f64 {
    match *process {
        ArrivalProcess::Poisson { rate } => Exp::new(rate).expect("validated rate").sample(rng),
        ArrivalProcess::Renewal(InterArrival::Gamma { shape, mean }) => {
            Gamma::new(shape, mean / shape).expect("validated gamma").sample(rng)
        }
        ArrivalProcess::Renewal(InterArrival::LogNormal { median, sigma }) => {
            LogNormal::new(median.ln(), sigma).expect("validated lognormal").sample(rng)
        }
    }
}

/// Answer times in `[0, horizon)` for question `question_index`; questions
/// are posted at time 0.
pub fn generate_arrivals(scenario: &SimScenario, question_index: usize) -> Vec<f64> {
    let mut rng = stream(scenario.seed, Purpose::Arrivals, question_index as u64);
    let mut out = Vec::new();
    let mut t = 0.0;
    loop {
        t += gap(&scenario.arrival, &mut rng);
        if t >= scenario.horizon {
            return out;
        }
        // zero-length gaps cannot occur for continuous laws but guard the
        // strictly-ascending invariant anyway
        if out.last().is_some_and(|&prev| t <= prev) {
            continue;
        }
        out.push(t);
    }
}

/// Standard type 1 extreme value variate by inversion.
fn gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -(-open_unit(rng).ln()).ln()
}

fn closes_at_visit<R: Rng + ?Sized>(agent: &Agent, n: u32, l: f64, w: f64, rng: &mut R) -> bool {
    match agent {
        Agent::Logit(c) => {
            let p = crate::model::logistic_unchecked(c.index(n as f64, l, w));
            rng.random::<f64>() < p
        }
        Agent::Gumbel { utility: u, cost: c } => {
            let e0 = gumbel(rng);
            let e1 = gumbel(rng);
            let cost = expected_wait_cost(c, l, w).expect("visit covariates are non-negative");
            utility(u, n) + e0 > utility(u, n + 1) - cost + e1
        }
    }
}

/// Close time of question `question_index` given its answers, or `None` if
/// the horizon passes first.
pub fn simulate_asker(answer_times: &[f64], scenario: &SimScenario, question_index: usize) -> Option<f64> {
    let mut rng = stream(scenario.seed, Purpose::Asker, question_index as u64);
    let dt = scenario.visit_interval;
    for k in 1..=answer_times.len() {
        let anchor = answer_times[k - 1];
        let end = answer_times.get(k).copied().unwrap_or(scenario.horizon).min(scenario.horizon);
        let l = interarrival(0.0, answer_times, k);
        if scenario.arrival_checks && closes_at_visit(&scenario.agent, k as u32, l, 0.0, &mut rng) {
            return Some(anchor);
        }
        let mut j = 1u64;
        loop {
            let t = grid_time(anchor, j, dt);
            if t >= end {
                break;
            }
            if closes_at_visit(&scenario.agent, k as u32, l, t - anchor, &mut rng) {
                return Some(t);
            }
            j += 1;
        }
    }
    None
}

pub fn question_id(index: usize) -> String {
    format!("q{index:06}")
}

fn simulate_question(scenario: &SimScenario, index: usize) -> QuestionRecord {
    let mut answers = generate_arrivals(scenario, index);
    let closed_at = simulate_asker(&answers, scenario, index);
    // a closed question stops receiving answers
    if let Some(c) = closed_at {
        answers.retain(|&t| t <= c);
    }
    QuestionRecord {
        question_id: question_id(index),
        posted_at: 0.0,
        answer_times: answers,
        closed_by_asker: closed_at.is_some(),
        closed_at,
    }
}

/// All questions of a scenario in index order. Unclosed questions are kept
/// with `closed_by_asker = false` and fail eligibility downstream.
pub fn generate_dataset(scenario: &SimScenario) -> Result<Vec<QuestionRecord>, Error> {
    scenario.validate()?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..scenario.n_questions).into_par_iter().map(|i| simulate_question(scenario, i)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..scenario.n_questions).map(|i| simulate_question(scenario, i)).collect())
    }
}
