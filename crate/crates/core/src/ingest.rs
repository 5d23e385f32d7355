//! Question event logs: parsing, serialization, eligibility and the
//! open-duration histogram.
//!
//! Two interchangeable on-disk formats are supported.
//!
//! CSV, one event per line with a mandatory header:
//!
//! ```text
//! event,question_id,time_hours
//! posted,q1,0
//! answer,q1,1
//! answer,q1,2.5
//! closed_by_asker,q1,5.2
//! ```
//!
//! `event` is one of `posted`, `answer`, `closed_by_asker`, `closed_other`.
//! Rows of different questions may interleave; per question, answer rows
//! must appear in chronological order.
//!
//! JSONL, one object per question:
//!
//! ```text
//! {"question_id":"q1","posted_at":0.0,"answer_times":[1.0,2.5],"closed_at":5.2,"closed_by_asker":true}
//! ```

use std::collections::HashMap;
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{IngestError, RecordError};

/// Open-duration cutoff for eligibility, in hours (strict).
pub const MAX_OPEN_HOURS: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub question_id: String,
    pub posted_at: f64,
    pub answer_times: Vec<f64>,
    pub closed_at: Option<f64>,
    pub closed_by_asker: bool,
}

impl QuestionRecord {
    pub fn open_duration(&self) -> Option<f64> {
        self.closed_at.map(|c| c - self.posted_at)
    }

    pub fn is_eligible(&self) -> bool {
        self.closed_by_asker
            && matches!(self.open_duration(), Some(d) if d < MAX_OPEN_HOURS)
    }

    /// Every structural invariant this record breaks.
    pub fn violations(&self) -> Vec<RecordError> {
        let id = || self.question_id.clone();
        let mut out = Vec::new();
        for pair in self.answer_times.windows(2) {
            if !(pair[1] > pair[0]) {
                out.push(RecordError::AnswersNotAscending { question_id: id(), previous: pair[0], next: pair[1] });
                break;
            }
        }
        if let Some(&first) = self.answer_times.first() {
            if first < self.posted_at {
                out.push(RecordError::AnswerBeforePosting { question_id: id(), answer: first, posted: self.posted_at });
            }
        }
        match (self.closed_at, self.answer_times.first()) {
            (Some(closed), None) => out.push(RecordError::CloseWithoutAnswers { question_id: id(), closed }),
            (Some(closed), Some(&first)) if closed < first => {
                out.push(RecordError::CloseBeforeFirstAnswer { question_id: id(), closed })
            }
            (None, _) if self.closed_by_asker => out.push(RecordError::MissingCloseTime { question_id: id() }),
            _ => {}
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogFormat {
    Csv,
    Jsonl,
}

impl FromStr for LogFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(LogFormat::Csv),
            "jsonl" => Ok(LogFormat::Jsonl),
            other => Err(format!("unknown log format `{other}` (expected csv or jsonl)")),
        }
    }
}

const CSV_HEADER: [&str; 3] = ["event", "question_id", "time_hours"];

#[derive(Default)]
struct Partial {
    posted: Option<f64>,
    answers: Vec<f64>,
    close: Option<(f64, bool)>,
}

pub fn parse_event_log<R: Read>(reader: R, format: LogFormat) -> Result<Vec<QuestionRecord>, IngestError> {
    let records = match format {
        LogFormat::Csv => parse_csv(reader)?,
        LogFormat::Jsonl => parse_jsonl(std::io::BufReader::new(reader))?,
    };
    let errors: Vec<RecordError> = records.iter().flat_map(|r| r.violations()).collect();
    if errors.is_empty() {
        Ok(records)
    } else {
        Err(IngestError::InvalidRecords(errors))
    }
}

fn parse_time(raw: &str, line: u64) -> Result<f64, IngestError> {
    let t: f64 = raw.trim().parse().map_err(|_| IngestError::Malformed {
        line,
        message: format!("time `{raw}` is not a number"),
    })?;
    if !t.is_finite() {
        return Err(IngestError::Malformed { line, message: format!("time `{raw}` is not finite") });
    }
    Ok(t)
}

fn csv_error(e: csv::Error) -> IngestError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => IngestError::Io(io),
        kind => IngestError::Malformed { line, message: format!("{kind:?}") },
    }
}

fn parse_csv<R: Read>(reader: R) -> Result<Vec<QuestionRecord>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut order: Vec<String> = Vec::new();
    let mut by_id: HashMap<String, Partial> = HashMap::new();
    let mut errors = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut saw_header = false;

    while rdr.read_record(&mut record).map_err(csv_error)? {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if !saw_header {
            let fields: Vec<&str> = record.iter().map(str::trim).collect();
            if fields != CSV_HEADER {
                return Err(IngestError::Malformed {
                    line,
                    message: format!("expected header `{}`", CSV_HEADER.join(",")),
                });
            }
            saw_header = true;
            continue;
        }
        if record.len() != 3 {
            return Err(IngestError::Malformed { line, message: format!("expected 3 fields, found {}", record.len()) });
        }
        let id = &record[1];
        if id.is_empty() {
            return Err(IngestError::Malformed { line, message: "empty question_id".into() });
        }
        let time = parse_time(&record[2], line)?;
        let entry = by_id.entry(id.to_string()).or_insert_with(|| {
            order.push(id.to_string());
            Partial::default()
        });
        match record[0].trim() {
            "posted" => {
                if entry.posted.replace(time).is_some() {
                    errors.push(RecordError::Duplicate { question_id: id.into(), what: "posting event" });
                }
            }
            "answer" => {
                if let Some(&prev) = entry.answers.last() {
                    if !(time > prev) {
                        errors.push(RecordError::AnswersNotAscending { question_id: id.into(), previous: prev, next: time });
                    }
                }
                entry.answers.push(time);
            }
            ev @ ("closed_by_asker" | "closed_other") => {
                if entry.close.replace((time, ev == "closed_by_asker")).is_some() {
                    errors.push(RecordError::Duplicate { question_id: id.into(), what: "close event" });
                }
            }
            other => {
                return Err(IngestError::Malformed { line, message: format!("unknown event `{other}`") });
            }
        }
    }

    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let p = by_id.remove(&id).expect("id recorded in order");
        let Some(posted_at) = p.posted else {
            errors.push(RecordError::MissingPosting { question_id: id });
            continue;
        };
        out.push(QuestionRecord {
            question_id: id,
            posted_at,
            answer_times: p.answers,
            closed_at: p.close.map(|c| c.0),
            closed_by_asker: p.close.is_some_and(|c| c.1),
        });
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(IngestError::InvalidRecords(errors))
    }
}

fn parse_jsonl<R: BufRead>(reader: R) -> Result<Vec<QuestionRecord>, IngestError> {
    let mut out: Vec<QuestionRecord> = Vec::new();
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut errors = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: QuestionRecord = serde_json::from_str(&line)
            .map_err(|e| IngestError::Malformed { line: line_no, message: e.to_string() })?;
        let bad_time = std::iter::once(rec.posted_at)
            .chain(rec.answer_times.iter().copied())
            .chain(rec.closed_at)
            .any(|t| !t.is_finite());
        if bad_time {
            return Err(IngestError::Malformed { line: line_no, message: "non-finite time".into() });
        }
        if seen.insert(rec.question_id.clone(), ()).is_some() {
            errors.push(RecordError::Duplicate { question_id: rec.question_id.clone(), what: "question_id" });
            continue;
        }
        out.push(rec);
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(IngestError::InvalidRecords(errors))
    }
}

pub fn write_event_log<W: Write>(mut w: W, records: &[QuestionRecord], format: LogFormat) -> std::io::Result<()> {
    match format {
        LogFormat::Csv => {
            writeln!(w, "{}", CSV_HEADER.join(","))?;
            for r in records {
                let id = csv_field(&r.question_id);
                writeln!(w, "posted,{id},{}", r.posted_at)?;
                for t in &r.answer_times {
                    writeln!(w, "answer,{id},{t}")?;
                }
                if let Some(c) = r.closed_at {
                    let ev = if r.closed_by_asker { "closed_by_asker" } else { "closed_other" };
                    writeln!(w, "{ev},{id},{c}")?;
                }
            }
        }
        LogFormat::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

pub fn event_log_to_string(records: &[QuestionRecord], format: LogFormat) -> String {
    let mut buf = Vec::new();
    write_event_log(&mut buf, records, format).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}

/// Quotes an id only when CSV requires it.
pub(crate) fn csv_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) || s.trim() != s {
        format!("\"{}\"", s.replace('"', "\"\"")).into()
    } else {
        s.into()
    }
}

/// Keeps asker-closed questions open for less than [`MAX_OPEN_HOURS`].
pub fn filter_eligible(records: &[QuestionRecord]) -> Vec<QuestionRecord> {
    records.iter().filter(|r| r.is_eligible()).cloned().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramReport {
    pub bin_width: f64,
    /// `counts[k]` covers `[k * bin_width, (k + 1) * bin_width)`.
    pub counts: Vec<usize>,
    sorted_durations: Vec<f64>,
}

impl HistogramReport {
    pub fn total(&self) -> usize {
        self.sorted_durations.len()
    }

    pub fn fractions(&self) -> Vec<f64> {
        let n = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Fraction of questions closed within `t` hours of posting.
    pub fn fraction_within(&self, t: f64) -> f64 {
        if self.sorted_durations.is_empty() {
            return 0.0;
        }
        let k = self.sorted_durations.partition_point(|&d| d <= t);
        k as f64 / self.sorted_durations.len() as f64
    }

    pub fn bin_start(&self, k: usize) -> f64 {
        k as f64 * self.bin_width
    }
}

/// Histogram of open durations. Records without a close time are skipped.
pub fn open_duration_histogram(records: &[QuestionRecord], bin_width: f64) -> Result<HistogramReport, crate::error::EstimationError> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(crate::error::EstimationError::InvalidParameter(format!("bin width {bin_width}")));
    }
    let mut durations: Vec<f64> = records.iter().filter_map(|r| r.open_duration()).map(|d| d.max(0.0)).collect();
    durations.sort_by(f64::total_cmp);
    let mut counts = Vec::new();
    for &d in &durations {
        let k = (d / bin_width).floor() as usize;
        if counts.len() <= k {
            counts.resize(k + 1, 0);
        }
        counts[k] += 1;
    }
    Ok(HistogramReport { bin_width, counts, sorted_durations: durations })
}
