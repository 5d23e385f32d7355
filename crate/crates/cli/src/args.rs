use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "stopwait", version, about = "Simulate and estimate when askers stop waiting for answers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic question event log.
    Simulate(SimulateArgs),
    /// Expand eligible questions into per-visit observation rows.
    Expand(ExpandArgs),
    /// Fit the per-visit close logit to observation rows.
    FitLogit(FitLogitArgs),
    /// Correlate total answers with the wait after the last answer.
    Correlate(CorrelateArgs),
    /// Fit an inverse Gaussian to answer counts or a numeric column.
    FitInvgauss(FitInvgaussArgs),
    /// Solve the threshold stopping problem by value iteration.
    Threshold(ThresholdArgs),
    /// Simulate Brownian first-passage times.
    Passage(PassageArgs),
    /// Plot-ready data: open-duration histogram or utility curves.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input file; standard input when omitted.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Where to write the run manifest [default: OUTPUT.manifest, else stderr].
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub io: Io,
    /// Event-log format to write.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Scenario file of key=value lines; flags override its entries.
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    #[arg(long, env = "STOPWAIT_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub questions: Option<usize>,
    /// Poisson answer rate per hour.
    #[arg(long, value_name = "PER_HOUR")]
    pub rate: Option<f64>,
    /// Gamma-distributed gaps as SHAPE:MEAN hours.
    #[arg(long, value_name = "SHAPE:MEAN", conflicts_with_all = ["rate", "lognormal_gaps"], value_parser = parse_pair)]
    pub gamma_gaps: Option<(f64, f64)>,
    /// Log-normal gaps as MEDIAN:SIGMA.
    #[arg(long, value_name = "MEDIAN:SIGMA", conflicts_with = "rate", value_parser = parse_pair)]
    pub lognormal_gaps: Option<(f64, f64)>,
    #[arg(long, value_name = "HOURS")]
    pub horizon: Option<f64>,
    /// Hours between asker visits.
    #[arg(long, value_name = "HOURS")]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta3: Option<f64>,
    /// Switch to the Gumbel agent, splitting alpha into utility and cost
    /// intercepts with this utility intercept.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_u: Option<f64>,
    /// Also let the asker decide the instant each answer arrives. Such
    /// zero-wait closes have no counterpart in the visit expansion.
    #[arg(long)]
    pub arrival_checks: bool,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub io: Io,
    /// Event-log format to read.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Hours between visits.
    #[arg(long, value_name = "HOURS", default_value_t = 1.0)]
    pub delta: f64,
    /// Snap each close row to the next visit instead of the exact close time.
    #[arg(long)]
    pub snap_close: bool,
}

#[derive(Debug, Args)]
pub struct FitLogitArgs {
    #[command(flatten)]
    pub io: Io,
    /// Write the coefficient table as CSV instead of key=value lines.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FitInvgaussArgs {
    #[command(flatten)]
    pub io: Io,
    /// Event-log format, used unless --column is given.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Read samples from this column of a CSV file instead of counting
    /// answers per eligible question in an event log.
    #[arg(long, value_name = "NAME")]
    pub column: Option<String>,
    /// Range of integer values for the log-log tail slope.
    #[arg(long, value_name = "LO:HI", value_parser = parse_pair)]
    pub tail: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub io: Io,
    /// Per-answer discount factor in (0, 1).
    #[arg(long, default_value_t = 0.9)]
    pub discount: f64,
    /// Mean of a normal answer-value step.
    #[arg(long, allow_hyphen_values = true, default_value_t = -0.4)]
    pub step_mean: f64,
    #[arg(long, default_value_t = 1.0)]
    pub step_sd: f64,
    /// Deterministic step; overrides the normal step.
    #[arg(long, allow_hyphen_values = true)]
    pub step_det: Option<f64>,
    #[arg(long, value_name = "LO:HI:N", allow_hyphen_values = true, default_value = "-10:200:2101", value_parser = parse_grid)]
    pub grid: (f64, f64, usize),
    /// Sup-norm tolerance for value iteration.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct PassageArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, env = "STOPWAIT_SEED")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    /// Euler time step.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Target inverse Gaussian mean; sets distance and drift with --lambda.
    #[arg(long, default_value_t = 6.1)]
    pub mu: f64,
    #[arg(long, default_value_t = 5.8)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Explicit barrier distance; requires --drift and ignores --mu/--lambda.
    #[arg(long, requires = "drift")]
    pub distance: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "distance")]
    pub drift: Option<f64>,
    /// Paths still above the barrier at this time are censored.
    #[arg(long, default_value_t = 1000.0)]
    pub max_time: f64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Histogram of open durations of eligible questions (reads an event log).
    #[arg(long, conflicts_with = "utility", required_unless_present = "utility")]
    pub histogram: bool,
    /// Histogram bin width in hours.
    #[arg(long, default_value_t = 1.0)]
    pub bin: f64,
    /// Utility curves over n = 0..=50 for alpha_u in {1, 2, 3, 4}.
    #[arg(long)]
    pub utility: bool,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.027)]
    pub beta1: f64,
    /// Plot a single curve at this utility intercept instead.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_u: Option<f64>,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected A:B")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let mut parts = s.split(':');
    let (Some(lo), Some(hi), Some(n), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
        return Err("expected LO:HI:N".into());
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    let n = n.trim().parse::<usize>().map_err(|e| format!("`{n}`: {e}"))?;
    Ok((num(lo)?, num(hi)?, n))
}
