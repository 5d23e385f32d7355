//! Person-period expansion: one binary close/wait row per modeled visit.
//!
//! After the k-th answer arrives at `t_k` the asker is assumed to look at the
//! question every `visit_interval` hours, at `t_k + j * visit_interval` for
//! `j = 1, 2, ...`, until the next answer or the close. The close itself is
//! one extra row at the exact closing time (or snapped to the visit grid in
//! [`CloseRow::Snap`] mode).

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ExpandError, IngestError};
use crate::ingest::{csv_field, QuestionRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitObservation {
    pub question_id: String,
    pub visit_time: f64,
    /// Answers received so far.
    pub n_answers: u32,
    /// Last inter-arrival time.
    pub last_interarrival: f64,
    /// Time since the most recent answer.
    pub waiting: f64,
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CloseRow {
    /// Closing row at the recorded close time.
    #[default]
    Exact,
    /// Closing row moved to the first grid visit at or after the close.
    Snap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionOptions {
    pub visit_interval: f64,
    pub close_row: CloseRow,
}

impl ExpansionOptions {
    pub fn hourly() -> Self {
        Self::every(1.0)
    }

    pub fn every(visit_interval: f64) -> Self {
        ExpansionOptions { visit_interval, close_row: CloseRow::Exact }
    }
}

/// Inter-arrival preceding the k-th answer (1-based). The first answer's gap
/// is measured from posting.
#[inline]
pub(crate) fn interarrival(posted_at: f64, answers: &[f64], k: usize) -> f64 {
    if k == 1 {
        answers[0] - posted_at
    } else {
        answers[k - 1] - answers[k - 2]
    }
}

/// The `j`-th grid visit after an answer at `anchor`.
#[inline]
pub(crate) fn grid_time(anchor: f64, j: u64, interval: f64) -> f64 {
    anchor + j as f64 * interval
}

pub fn expand_question(q: &QuestionRecord, opts: ExpansionOptions) -> Result<Vec<VisitObservation>, ExpandError> {
    let dt = opts.visit_interval;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(ExpandError::BadInterval(dt));
    }
    let answers = &q.answer_times;
    let Some(&last) = answers.last() else {
        return Err(ExpandError::NoAnswers { question_id: q.question_id.clone() });
    };
    let Some(closed_at) = q.closed_at else {
        return Err(ExpandError::NotClosed { question_id: q.question_id.clone() });
    };
    if closed_at < last {
        return Err(ExpandError::CloseBeforeLastAnswer {
            question_id: q.question_id.clone(),
            closed: closed_at,
            last_answer: last,
        });
    }

    let row = |t: f64, k: usize, closed: bool| VisitObservation {
        question_id: q.question_id.clone(),
        visit_time: t,
        n_answers: k as u32,
        last_interarrival: interarrival(q.posted_at, answers, k),
        waiting: t - answers[k - 1],
        closed,
    };

    let mut out = Vec::new();
    for k in 1..=answers.len() {
        let anchor = answers[k - 1];
        let end = answers.get(k).copied().unwrap_or(closed_at);
        let mut j = 1u64;
        loop {
            let t = grid_time(anchor, j, dt);
            if t >= end {
                break;
            }
            out.push(row(t, k, false));
            j += 1;
        }
    }

    let k = answers.len();
    let close_time = match opts.close_row {
        CloseRow::Exact => closed_at,
        CloseRow::Snap => {
            let j = ((closed_at - last) / dt).ceil().max(1.0) as u64;
            grid_time(last, j, dt)
        }
    };
    out.push(row(close_time, k, true));
    Ok(out)
}

/// Expands every record in order; fails on the first record that cannot be
/// expanded.
pub fn expand_corpus(records: &[QuestionRecord], opts: ExpansionOptions) -> Result<Vec<VisitObservation>, ExpandError> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let parts: Vec<_> = records.par_iter().map(|q| expand_question(q, opts)).collect::<Result<_, _>>()?;
        Ok(parts.into_iter().flatten().collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut out = Vec::new();
        for q in records {
            out.extend(expand_question(q, opts)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuestionSummary {
    pub total_answers: u32,
    /// Hours from the last answer to the close.
    pub elapsed_time: f64,
}

pub fn summarize(q: &QuestionRecord) -> Result<QuestionSummary, ExpandError> {
    let Some(&last) = q.answer_times.last() else {
        return Err(ExpandError::NoAnswers { question_id: q.question_id.clone() });
    };
    let Some(closed_at) = q.closed_at else {
        return Err(ExpandError::NotClosed { question_id: q.question_id.clone() });
    };
    if closed_at < last {
        return Err(ExpandError::CloseBeforeLastAnswer { question_id: q.question_id.clone(), closed: closed_at, last_answer: last });
    }
    Ok(QuestionSummary { total_answers: q.answer_times.len() as u32, elapsed_time: closed_at - last })
}

pub const OBSERVATION_HEADER: &str = "question_id,visit_time,n,l,w,closed";

pub fn write_observations<W: Write>(mut w: W, obs: &[VisitObservation]) -> std::io::Result<()> {
    writeln!(w, "{OBSERVATION_HEADER}")?;
    for o in obs {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            csv_field(&o.question_id),
            o.visit_time,
            o.n_answers,
            o.last_interarrival,
            o.waiting,
            u8::from(o.closed)
        )?;
    }
    Ok(())
}

pub fn read_observations<R: BufRead>(reader: R) -> Result<Vec<VisitObservation>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut rec = csv::StringRecord::new();
    let mut out = Vec::new();
    let mut first = true;
    let bad = |line: u64, message: String| IngestError::Malformed { line, message };
    while rdr.read_record(&mut rec).map_err(|e| bad(e.position().map_or(0, |p| p.line()), e.to_string()))? {
        let line = rec.position().map_or(0, |p| p.line());
        if first {
            first = false;
            let header: Vec<&str> = rec.iter().map(str::trim).collect();
            if header.join(",") != OBSERVATION_HEADER {
                return Err(bad(line, format!("expected header `{OBSERVATION_HEADER}`")));
            }
            continue;
        }
        if rec.len() != 6 {
            return Err(bad(line, format!("expected 6 fields, found {}", rec.len())));
        }
        let num = |i: usize, name: &str| -> Result<f64, IngestError> {
            let v: f64 = rec[i].trim().parse().map_err(|_| bad(line, format!("{name} `{}` is not a number", &rec[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(line, format!("{name} is not finite")))
            }
        };
        let n: u32 = rec[2].trim().parse().map_err(|_| bad(line, format!("n `{}` is not a count", &rec[2])))?;
        let closed = match rec[5].trim() {
            "0" => false,
            "1" => true,
            other => return Err(bad(line, format!("closed must be 0 or 1, got `{other}`"))),
        };
        out.push(VisitObservation {
            question_id: rec[0].to_string(),
            visit_time: num(1, "visit_time")?,
            n_answers: n,
            last_interarrival: num(3, "l")?,
            waiting: num(4, "w")?,
            closed,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q(answers: &[f64], closed: f64) -> QuestionRecord {
        QuestionRecord {
            question_id: "q".into(),
            posted_at: 0.0,
            answer_times: answers.to_vec(),
            closed_at: Some(closed),
            closed_by_asker: true,
        }
    }

    fn tuple(o: &VisitObservation) -> (f64, u32, f64, f64, bool) {
        (o.visit_time, o.n_answers, o.last_interarrival, o.waiting, o.closed)
    }

    fn assert_rows(got: &[VisitObservation], want: &[(f64, u32, f64, f64, bool)]) {
        assert_eq!(got.len(), want.len(), "{got:?}");
        for (g, w) in got.iter().zip(want) {
            let g = tuple(g);
            assert_abs_diff_eq!(g.0, w.0, epsilon = 1e-12);
            assert_eq!(g.1, w.1);
            assert_abs_diff_eq!(g.2, w.2, epsilon = 1e-12);
            assert_abs_diff_eq!(g.3, w.3, epsilon = 1e-12);
            assert_eq!(g.4, w.4);
        }
    }

    #[test]
    fn hourly_trace() {
        // the grid visit at 2.0 falls before the second answer, so it counts
        let rows = expand_question(&q(&[1.0, 2.5], 5.2), ExpansionOptions::hourly()).unwrap();
        assert_rows(&rows, &[
            (2.0, 1, 1.0, 1.0, false),
            (3.5, 2, 1.5, 1.0, false),
            (4.5, 2, 1.5, 2.0, false),
            (5.2, 2, 1.5, 2.7, true),
        ]);
    }

    #[test]
    fn close_before_first_visit() {
        let rows = expand_question(&q(&[1.0], 1.5), ExpansionOptions::hourly()).unwrap();
        assert_rows(&rows, &[(1.5, 1, 1.0, 0.5, true)]);
    }

    #[test]
    fn two_hour_grid() {
        let rows = expand_question(&q(&[1.0, 2.5], 5.2), ExpansionOptions::every(2.0)).unwrap();
        assert_rows(&rows, &[(4.5, 2, 1.5, 2.0, false), (5.2, 2, 1.5, 2.7, true)]);
    }

    #[test]
    fn visit_on_arrival_belongs_to_new_answer() {
        // grid visit after answer 1 would be at 2.0, which is the second arrival
        let rows = expand_question(&q(&[1.0, 2.0], 2.2), ExpansionOptions::hourly()).unwrap();
        assert_rows(&rows, &[(2.2, 2, 1.0, 0.2, true)]);
    }

    #[test]
    fn early_answers_produce_rows() {
        let rows = expand_question(&q(&[0.5, 3.0], 3.5), ExpansionOptions::hourly()).unwrap();
        assert_rows(&rows, &[
            (1.5, 1, 0.5, 1.0, false),
            (2.5, 1, 0.5, 2.0, false),
            (3.5, 2, 2.5, 0.5, true),
        ]);
    }

    #[test]
    fn snap_mode() {
        let opts = ExpansionOptions { visit_interval: 1.0, close_row: CloseRow::Snap };
        let rows = expand_question(&q(&[1.0, 2.5], 5.2), opts).unwrap();
        assert_rows(&rows, &[
            (2.0, 1, 1.0, 1.0, false),
            (3.5, 2, 1.5, 1.0, false),
            (4.5, 2, 1.5, 2.0, false),
            (5.5, 2, 1.5, 3.0, true),
        ]);
        let rows = expand_question(&q(&[1.0], 1.0), opts).unwrap();
        assert_rows(&rows, &[(2.0, 1, 1.0, 1.0, true)]);
    }

    #[test]
    fn expansion_errors() {
        let mut none = q(&[], 3.0);
        assert!(matches!(expand_question(&none, ExpansionOptions::hourly()), Err(ExpandError::NoAnswers { .. })));
        none.answer_times = vec![4.0];
        assert!(matches!(expand_question(&none, ExpansionOptions::hourly()), Err(ExpandError::CloseBeforeLastAnswer { .. })));
        assert!(matches!(expand_question(&q(&[1.0], 2.0), ExpansionOptions::every(0.0)), Err(ExpandError::BadInterval(_))));
        let mut open = q(&[1.0], 2.0);
        open.closed_at = None;
        assert!(matches!(expand_question(&open, ExpansionOptions::hourly()), Err(ExpandError::NotClosed { .. })));
    }

    #[test]
    fn corpus() {
        let one = q(&[1.0, 2.5], 5.2);
        let rows = expand_corpus(&[one.clone(), one], ExpansionOptions::hourly()).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows.iter().filter(|o| o.closed).count(), 2);
        assert!(expand_corpus(&[], ExpansionOptions::hourly()).unwrap().is_empty());
    }

    #[test]
    fn summaries() {
        let s = summarize(&q(&[1.0, 2.5], 5.2)).unwrap();
        assert_eq!(s.total_answers, 2);
        assert_abs_diff_eq!(s.elapsed_time, 2.7, epsilon = 1e-12);
        assert_eq!(summarize(&q(&[1.0, 2.5], 2.5)).unwrap().elapsed_time, 0.0);
        assert_eq!(summarize(&q(&[1.0], 4.0)).unwrap(), QuestionSummary { total_answers: 1, elapsed_time: 3.0 });
        assert!(summarize(&q(&[], 4.0)).is_err());
    }

    #[test]
    fn observation_csv_round_trip() {
        let rows = expand_question(&q(&[1.0, 2.5], 5.2), ExpansionOptions::hourly()).unwrap();
        let mut buf = Vec::new();
        write_observations(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("question_id,visit_time,n,l,w,closed\nq,2,1,1,1,0\nq,3.5,2,1.5,1,0\n"));
        assert_eq!(read_observations(text.as_bytes()).unwrap(), rows);
        assert!(read_observations("question_id,visit_time,n,l,w,closed\nq,1,1,1,1,2\n".as_bytes()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn question() -> impl Strategy<Value = QuestionRecord> {
            (prop::collection::vec(0.01f64..6.0, 1..8), 0.0f64..10.0).prop_map(|(gaps, tail)| {
                let mut t = 0.0;
                let answers: Vec<f64> = gaps.iter().map(|g| { t += g; t }).collect();
                q(&answers, t + tail)
            })
        }

        proptest! {
            #[test]
            fn schedule_invariants(rec in question(), dt in 0.1f64..3.0) {
                let rows = expand_question(&rec, ExpansionOptions::every(dt)).unwrap();
                prop_assert_eq!(rows.iter().filter(|o| o.closed).count(), 1);
                prop_assert!(rows.last().unwrap().closed);
                for o in &rows {
                    prop_assert!(o.n_answers >= 1 && o.waiting >= 0.0 && o.last_interarrival >= 0.0);
                    let anchor = rec.answer_times[o.n_answers as usize - 1];
                    prop_assert!((o.visit_time - o.waiting - anchor).abs() < 1e-9);
                }
                for pair in rows.windows(2) {
                    let (a, b) = (&pair[0], &pair[1]);
                    prop_assert!(b.visit_time >= a.visit_time);
                    if !b.closed && a.n_answers == b.n_answers {
                        prop_assert!(b.waiting > a.waiting);
                    }
                    if b.n_answers > a.n_answers && !b.closed {
                        prop_assert!(b.waiting <= dt * (1.0 + 1e-12));
                    }
                }
            }

            #[test]
            fn finer_grid_never_fewer_rows(rec in question(), dt in 0.1f64..3.0, factor in 1u32..5) {
                let coarse = expand_question(&rec, ExpansionOptions::every(dt * factor as f64)).unwrap();
                let fine = expand_question(&rec, ExpansionOptions::every(dt)).unwrap();
                prop_assert!(fine.len() >= coarse.len());
            }
        }
    }
}
