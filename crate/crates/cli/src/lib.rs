//! The `stopwait` command line: every subcommand reads one artifact and
//! writes another, plus a manifest of the effective parameters.

mod args;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use stopwait_core::estimate::report::{correlation_report, invgauss_report, logit_report, logit_table_csv};
use stopwait_core::estimate::{
    fit_inverse_gaussian, fit_logit, ks_distance, pearson_correlation, tail_slope, InverseGaussianParams,
};
use stopwait_core::ingest::{event_log_to_string, open_duration_histogram};
use stopwait_core::sim::{generate_dataset, Agent, ArrivalProcess, InterArrival, SimScenario};
use stopwait_core::threshold::{
    brownian_passage_ensemble, passage_csv, solve_value_function, BrownianSpec, GridSpec, StepDistribution,
};
use stopwait_core::visits::{read_observations, write_observations, CloseRow};
use stopwait_core::{
    expand_corpus, filter_eligible, parse_event_log, summarize, utility, ExpansionOptions, LogFormat, UtilitySpec,
};

pub use args::{Cli, Command, Format};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Manifest key excluded from reproducibility comparisons.
pub const TIMESTAMP_KEY: &str = "created_unix";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] stopwait_core::Error),
    #[error("{context}: {message}")]
    Input { context: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Input { .. } | CliError::Io { .. } => 2,
        }
    }
}

fn data<E: Into<stopwait_core::Error>>(e: E) -> CliError {
    CliError::Data(e.into())
}

/// Runs with the process's standard streams and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`] with explicit streams, for embedding and tests.
pub fn run_with<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut streams = Streams { stdin, stdout, stderr };
    match execute(cli.command, &mut streams) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(streams.stderr, "error: {e}");
            e.exit_code()
        }
    }
}

struct Streams<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Streams<'_> {
    fn read_input(&mut self, path: Option<&Path>) -> Result<Vec<u8>, CliError> {
        match path {
            Some(p) => fs::read(p).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
            None => {
                let mut buf = Vec::new();
                self.stdin
                    .read_to_end(&mut buf)
                    .map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
                Ok(buf)
            }
        }
    }

    fn write_output(&mut self, path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
        match path {
            Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
            None => self
                .stdout
                .write_all(bytes)
                .and_then(|_| self.stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
        }
    }

    fn write_manifest(&mut self, io: &args::Io, manifest: &Manifest) -> Result<(), CliError> {
        let text = manifest.render();
        let target = io.manifest.clone().or_else(|| io.output.as_ref().map(|o| manifest_path_for(o)));
        match target {
            Some(p) => fs::write(&p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
            None => self
                .stderr
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io { path: "<stderr>".into(), source }),
        }
    }
}

/// `out.csv` gets its manifest at `out.csv.manifest`.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    fn new(subcommand: &str, io: &args::Io) -> Self {
        let mut m = Manifest { entries: Vec::new() };
        m.push("tool", "stopwait");
        m.push("version", VERSION);
        m.push("subcommand", subcommand);
        m.push("input", io.input.as_ref().map_or("<stdin>".into(), |p| p.display().to_string()));
        m.push("output", io.output.as_ref().map_or("<stdout>".into(), |p| p.display().to_string()));
        m
    }

    fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k}={v}");
        }
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let _ = writeln!(s, "{TIMESTAMP_KEY}={now}");
        s
    }
}

fn log_format(f: Format) -> LogFormat {
    match f {
        Format::Csv => LogFormat::Csv,
        Format::Jsonl => LogFormat::Jsonl,
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Jsonl => "jsonl",
    }
}

fn execute(command: Command, s: &mut Streams) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => simulate(a, s),
        Command::Expand(a) => expand(a, s),
        Command::FitLogit(a) => fit_logit_cmd(a, s),
        Command::Correlate(a) => correlate(a, s),
        Command::FitInvgauss(a) => fit_invgauss(a, s),
        Command::Threshold(a) => threshold(a, s),
        Command::Passage(a) => passage(a, s),
        Command::Report(a) => report(a, s),
    }
}

fn scenario_from(a: &args::SimulateArgs) -> Result<SimScenario, CliError> {
    let mut sc = match &a.scenario {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
            SimScenario::from_kv(&text).map_err(data)?
        }
        None => SimScenario::from_kv("").map_err(data)?,
    };
    if let Some(n) = a.questions {
        sc.n_questions = n;
    }
    if let Some(rate) = a.rate {
        sc.arrival = ArrivalProcess::Poisson { rate };
    }
    if let Some((shape, mean)) = a.gamma_gaps {
        sc.arrival = ArrivalProcess::Renewal(InterArrival::Gamma { shape, mean });
    }
    if let Some((median, sigma)) = a.lognormal_gaps {
        sc.arrival = ArrivalProcess::Renewal(InterArrival::LogNormal { median, sigma });
    }
    if let Some(h) = a.horizon {
        sc.horizon = h;
    }
    if let Some(d) = a.delta {
        sc.visit_interval = d;
    }
    if let Some(seed) = a.seed {
        sc.seed = seed;
    }
    if a.arrival_checks {
        sc.arrival_checks = true;
    }
    let overrides = [a.alpha, a.beta1, a.beta2, a.beta3];
    match (&mut sc.agent, a.alpha_u) {
        (Agent::Logit(c), None) => {
            let mut v = c.as_array();
            for (slot, o) in v.iter_mut().zip(overrides) {
                if let Some(x) = o {
                    *slot = x;
                }
            }
            *c = stopwait_core::LogitCoefficients::from_array(v);
        }
        (agent, Some(alpha_u)) => {
            // Combined coefficients from the current agent, then flags, then split.
            let base = match *agent {
                Agent::Logit(c) => c,
                Agent::Gumbel { utility, cost } => stopwait_core::model::combine(&utility, &cost),
            };
            let mut v = base.as_array();
            for (slot, o) in v.iter_mut().zip(overrides) {
                if let Some(x) = o {
                    *slot = x;
                }
            }
            let (utility, cost) = stopwait_core::LogitCoefficients::from_array(v).split(alpha_u);
            *agent = Agent::Gumbel { utility, cost };
        }
        (Agent::Gumbel { utility, cost }, None) => {
            if let Some(x) = a.alpha {
                cost.alpha_c = x + utility.alpha_u;
            }
            if let Some(x) = a.beta1 {
                utility.beta1 = x;
            }
            if let Some(x) = a.beta2 {
                cost.beta2 = x;
            }
            if let Some(x) = a.beta3 {
                cost.beta3 = x;
            }
        }
    }
    sc.validate().map_err(data)?;
    Ok(sc)
}

fn simulate(a: args::SimulateArgs, s: &mut Streams) -> Result<(), CliError> {
    let sc = scenario_from(&a)?;
    let corpus = generate_dataset(&sc).map_err(data)?;
    s.write_output(a.io.output.as_deref(), event_log_to_string(&corpus, log_format(a.format)).as_bytes())?;
    let mut m = Manifest::new("simulate", &a.io);
    m.push("format", format_name(a.format));
    for line in sc.to_kv().lines() {
        if let Some((k, v)) = line.split_once('=') {
            m.push(k, v);
        }
    }
    m.push("questions_closed", corpus.iter().filter(|r| r.closed_by_asker).count());
    s.write_manifest(&a.io, &m)
}

fn read_log(s: &mut Streams, io: &args::Io, format: Format) -> Result<Vec<stopwait_core::QuestionRecord>, CliError> {
    let bytes = s.read_input(io.input.as_deref())?;
    parse_event_log(bytes.as_slice(), log_format(format)).map_err(|e| CliError::Input {
        context: io.input.as_ref().map_or("<stdin>".into(), |p| p.display().to_string()),
        message: e.to_string(),
    })
}

fn expand(a: args::ExpandArgs, s: &mut Streams) -> Result<(), CliError> {
    let records = read_log(s, &a.io, a.format)?;
    let eligible = filter_eligible(&records);
    let close_row = if a.snap_close { CloseRow::Snap } else { CloseRow::Exact };
    let opts = ExpansionOptions { visit_interval: a.delta, close_row };
    let rows = expand_corpus(&eligible, opts).map_err(data)?;
    let mut buf = Vec::new();
    write_observations(&mut buf, &rows).expect("writing to memory");
    s.write_output(a.io.output.as_deref(), &buf)?;
    let mut m = Manifest::new("expand", &a.io);
    m.push("format", format_name(a.format));
    m.push("delta", a.delta);
    m.push("close_row", if a.snap_close { "snap" } else { "exact" });
    m.push("questions_read", records.len());
    m.push("questions_eligible", eligible.len());
    m.push("observations", rows.len());
    s.write_manifest(&a.io, &m)
}

fn fit_logit_cmd(a: args::FitLogitArgs, s: &mut Streams) -> Result<(), CliError> {
    let bytes = s.read_input(a.io.input.as_deref())?;
    let obs = read_observations(BufReader::new(bytes.as_slice())).map_err(|e| CliError::Input {
        context: a.io.input.as_ref().map_or("<stdin>".into(), |p| p.display().to_string()),
        message: e.to_string(),
    })?;
    let fit = fit_logit(&obs).map_err(data)?;
    let out = if a.table { logit_table_csv(&fit) } else { logit_report(&fit).to_string() };
    s.write_output(a.io.output.as_deref(), out.as_bytes())?;
    let mut m = Manifest::new("fit-logit", &a.io);
    m.push("output_kind", if a.table { "table" } else { "report" });
    m.push("observations", obs.len());
    m.push("converged", fit.converged);
    s.write_manifest(&a.io, &m)
}

fn correlate(a: args::CorrelateArgs, s: &mut Streams) -> Result<(), CliError> {
    let records = read_log(s, &a.io, a.format)?;
    let pairs = filter_eligible(&records)
        .iter()
        .map(|r| summarize(r).map(|q| (q.total_answers as f64, q.elapsed_time)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(data)?;
    let c = pearson_correlation(&pairs).map_err(data)?;
    s.write_output(a.io.output.as_deref(), correlation_report(&c).to_string().as_bytes())?;
    let mut m = Manifest::new("correlate", &a.io);
    m.push("format", format_name(a.format));
    m.push("pairs", pairs.len());
    s.write_manifest(&a.io, &m)
}

/// Reads one named numeric column of a CSV file.
fn read_column(bytes: &[u8], name: &str) -> Result<Vec<f64>, String> {
    let mut lines = BufReader::new(bytes).lines();
    let header = lines.next().ok_or("empty input")?.map_err(|e| e.to_string())?;
    let index = header
        .split(',')
        .position(|h| h.trim() == name)
        .ok_or_else(|| format!("no column `{name}` in header `{header}`"))?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split(',').nth(index).ok_or_else(|| format!("line {}: missing column", i + 2))?;
        out.push(field.trim().parse().map_err(|e| format!("line {}: `{field}`: {e}", i + 2))?);
    }
    Ok(out)
}

fn fit_invgauss(a: args::FitInvgaussArgs, s: &mut Streams) -> Result<(), CliError> {
    let samples: Vec<f64> = match &a.column {
        Some(name) => {
            let bytes = s.read_input(a.io.input.as_deref())?;
            read_column(&bytes, name).map_err(|message| CliError::Input {
                context: a.io.input.as_ref().map_or("<stdin>".into(), |p| p.display().to_string()),
                message,
            })?
        }
        None => filter_eligible(&read_log(s, &a.io, a.format)?)
            .iter()
            .map(|r| r.answer_times.len() as f64)
            .collect(),
    };
    let fit = fit_inverse_gaussian(&samples).map_err(data)?;
    let ks = ks_distance(&samples, |x| fit.cdf(x).unwrap_or(if x <= 0.0 { 0.0 } else { 1.0 }));
    let tail = match a.tail {
        Some(range) => Some((tail_slope(&samples, range).map_err(data)?, range)),
        None => None,
    };
    s.write_output(a.io.output.as_deref(), invgauss_report(&fit, samples.len(), ks, tail).to_string().as_bytes())?;
    let mut m = Manifest::new("fit-invgauss", &a.io);
    match &a.column {
        Some(c) => m.push("column", c),
        None => m.push("format", format_name(a.format)),
    }
    if let Some((lo, hi)) = a.tail {
        m.push("tail", format!("{lo}:{hi}"));
    }
    s.write_manifest(&a.io, &m)
}

fn threshold(a: args::ThresholdArgs, s: &mut Streams) -> Result<(), CliError> {
    let step = match a.step_det {
        Some(z) => StepDistribution::Deterministic(z),
        None => StepDistribution::Normal { mean: a.step_mean, sd: a.step_sd },
    };
    let (lo, hi, count) = a.grid;
    let sol = solve_value_function(&step, a.discount, GridSpec::new(lo, hi, count), a.tol).map_err(data)?;
    s.write_output(a.io.output.as_deref(), sol.to_csv().as_bytes())?;
    let mut m = Manifest::new("threshold", &a.io);
    m.push("discount", a.discount);
    match step {
        StepDistribution::Deterministic(z) => m.push("step", format!("deterministic:{z}")),
        _ => m.push("step", format!("normal:{}:{}", a.step_mean, a.step_sd)),
    }
    m.push("grid", format!("{lo}:{hi}:{count}"));
    m.push("tol", a.tol);
    m.push("x_star", sol.x_star);
    m.push("iterations", sol.iterations);
    s.write_manifest(&a.io, &m)
}

fn passage(a: args::PassageArgs, s: &mut Streams) -> Result<(), CliError> {
    let spec = match (a.distance, a.drift) {
        (Some(distance), Some(drift)) => BrownianSpec { distance, drift, sigma: a.sigma },
        _ => {
            let ig = InverseGaussianParams::new(a.mu, a.lambda).map_err(data)?;
            BrownianSpec::for_inverse_gaussian(&ig, a.sigma)
        }
    };
    let seed = a.seed.unwrap_or(0);
    let times = brownian_passage_ensemble(spec, a.dt, a.paths, seed, a.max_time).map_err(data)?;
    s.write_output(a.io.output.as_deref(), passage_csv(&times).as_bytes())?;
    let mut m = Manifest::new("passage", &a.io);
    m.push("seed", seed);
    m.push("paths", a.paths);
    m.push("dt", a.dt);
    m.push("distance", spec.distance);
    m.push("drift", spec.drift);
    m.push("sigma", spec.sigma);
    m.push("max_time", a.max_time);
    m.push("censored", times.iter().filter(|t| t.censored).count());
    s.write_manifest(&a.io, &m)
}

fn report(a: args::ReportArgs, s: &mut Streams) -> Result<(), CliError> {
    let mut m = Manifest::new("report", &a.io);
    let out = if a.histogram {
        let records = filter_eligible(&read_log(s, &a.io, a.format)?);
        let h = open_duration_histogram(&records, a.bin).map_err(data)?;
        let mut out = String::from("bin_start,count,fraction\n");
        for (k, (&c, f)) in h.counts.iter().zip(h.fractions()).enumerate() {
            let _ = writeln!(out, "{},{c},{f}", h.bin_start(k));
        }
        let _ = writeln!(out, "# questions={},within_24h={}", h.total(), h.fraction_within(24.0));
        m.push("kind", "histogram");
        m.push("format", format_name(a.format));
        m.push("bin", a.bin);
        out
    } else {
        let intercepts: Vec<f64> = match a.alpha_u {
            Some(x) => vec![x],
            None => vec![1.0, 2.0, 3.0, 4.0],
        };
        let specs: Vec<UtilitySpec> = intercepts.iter().map(|&x| UtilitySpec::new(x, a.beta1)).collect();
        let mut out = String::from("n");
        for x in &intercepts {
            let _ = write!(out, ",alpha_u_{x}");
        }
        out.push('\n');
        for n in 0..=50u32 {
            let _ = write!(out, "{n}");
            for u in &specs {
                let _ = write!(out, ",{}", utility(u, n));
            }
            out.push('\n');
        }
        m.push("kind", "utility");
        m.push("beta1", a.beta1);
        m.push("alpha_u", intercepts.iter().map(f64::to_string).collect::<Vec<_>>().join(" "));
        out
    };
    s.write_output(a.io.output.as_deref(), out.as_bytes())?;
    s.write_manifest(&a.io, &m)
}
