//! Flat `key=value` reports and coefficient tables.

use std::fmt;

use super::correlation::CorrelationResult;
use super::invgauss::InverseGaussianParams;
use super::logit::{significance_stars, LogitFit};

pub const TERMS: [&str; 4] = ["alpha", "beta1", "beta2", "beta3"];

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvReport {
    entries: Vec<(String, String)>,
}

impl KvReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        KvReport { entries }
    }
}

impl fmt::Display for KvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

pub fn logit_report(fit: &LogitFit) -> KvReport {
    let mut r = KvReport::new();
    r.push("model", "logit")
        .push("n_observations", fit.n_observations)
        .push("log_likelihood", fit.log_likelihood)
        .push("iterations", fit.iterations)
        .push("converged", fit.converged)
        .push("gradient_max_norm", fit.gradient_max_norm);
    let est = fit.coefficients.as_array();
    let (z, p) = (fit.z_scores(), fit.p_values());
    for i in 0..4 {
        let t = TERMS[i];
        r.push(t, est[i])
            .push(format!("{t}_se"), fit.standard_errors[i])
            .push(format!("{t}_z"), z[i])
            .push(format!("{t}_p"), p[i])
            .push(format!("{t}_stars"), significance_stars(p[i]));
    }
    r
}

/// `term,estimate,std_error,z,significance` rows with a header.
pub fn logit_table_csv(fit: &LogitFit) -> String {
    let mut out = String::from("term,estimate,std_error,z,significance\n");
    let est = fit.coefficients.as_array();
    let (z, p) = (fit.z_scores(), fit.p_values());
    for i in 0..4 {
        out.push_str(&format!("{},{},{},{},{}\n", TERMS[i], est[i], fit.standard_errors[i], z[i], significance_stars(p[i])));
    }
    out
}

pub fn correlation_report(c: &CorrelationResult) -> KvReport {
    let mut r = KvReport::new();
    let p = c.p_value();
    r.push("model", "pearson")
        .push("n", c.n)
        .push("r", c.r)
        .push("ci_low", c.ci_low)
        .push("ci_high", c.ci_high)
        .push("p", p)
        .push("stars", significance_stars(p));
    r
}

pub fn invgauss_report(p: &InverseGaussianParams, n: usize, ks: f64, tail: Option<(f64, (f64, f64))>) -> KvReport {
    let mut r = KvReport::new();
    r.push("model", "inverse_gaussian")
        .push("n", n)
        .push("mu", p.mu)
        .push("lambda", p.lambda)
        .push("variance", p.variance())
        .push("ks_distance", ks);
    if let Some((slope, (lo, hi))) = tail {
        r.push("tail_lo", lo).push("tail_hi", hi).push("tail_slope", slope);
    }
    r
}
