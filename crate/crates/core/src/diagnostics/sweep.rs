use std::thread;

use crate::dynamics::{RunOutput, RunStatus};
use crate::error::Result;

use super::velocity_l2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Decay,
    Growth,
    BlowUp,
    Failed,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Decay => "decay",
            Classification::Growth => "growth",
            Classification::BlowUp => "blowup",
            Classification::Failed => "failed",
        }
    }
}

/// What a sweep runner hands back for one parameter value.
#[derive(Debug, Clone)]
pub struct SweepSample {
    pub margin: f64,
    pub margin_max_entry: f64,
    pub output: RunOutput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub margin: f64,
    pub margin_max_entry: f64,
    /// `||u(t_final)||_{L^2} / ||u(0)||_{L^2}`.
    pub decay_ratio: f64,
    /// `-ln(decay_ratio) / t_final`.
    pub decay_rate: f64,
    pub classification: Classification,
    pub blow_up: bool,
    pub final_time: f64,
    /// Early-termination or runner error, if any.
    pub note: Option<String>,
}

fn summarize(value: f64, sample: Result<SweepSample>) -> SweepRow {
    let sample = match sample {
        Ok(s) => s,
        Err(e) => {
            return SweepRow {
                value,
                margin: f64::NAN,
                margin_max_entry: f64::NAN,
                decay_ratio: f64::NAN,
                decay_rate: f64::NAN,
                classification: Classification::Failed,
                blow_up: false,
                final_time: 0.0,
                note: Some(e.to_string()),
            }
        }
    };
    let out = &sample.output;
    let first = out.trajectory.first();
    let last = out.trajectory.last();
    let (ratio, final_time) = match (first, last) {
        (Some(a), Some(b)) => (velocity_l2(b) / velocity_l2(a), b.time - a.time),
        _ => (f64::NAN, 0.0),
    };
    let blow_up = !matches!(out.status, RunStatus::Completed);
    let classification = if blow_up {
        Classification::BlowUp
    } else if ratio < 1.0 {
        Classification::Decay
    } else {
        Classification::Growth
    };
    let decay_rate = if final_time > 0.0 {
        -ratio.ln() / final_time
    } else {
        0.0
    };
    SweepRow {
        value,
        margin: sample.margin,
        margin_max_entry: sample.margin_max_entry,
        decay_ratio: ratio,
        decay_rate,
        classification,
        blow_up,
        final_time,
        note: (!matches!(out.status, RunStatus::Completed)).then(|| out.status.describe()),
    }
}

/// Runs `runner` once per parameter value, on up to `threads` worker threads,
/// and returns one row per value sorted by decreasing margin. Failing runs
/// become [`Classification::Failed`] rows.
pub fn sweep<F>(values: &[f64], threads: usize, runner: F) -> Vec<SweepRow>
where
    F: Fn(f64) -> Result<SweepSample> + Sync,
{
    let threads = threads.max(1).min(values.len().max(1));
    let mut rows: Vec<SweepRow> = if threads == 1 {
        values.iter().map(|&v| summarize(v, runner(v))).collect()
    } else {
        let chunk = values.len().div_ceil(threads);
        let runner = &runner;
        thread::scope(|scope| {
            let handles: Vec<_> = values
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || {
                        part.iter()
                            .map(|&v| summarize(v, runner(v)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        })
    };
    let key = |r: &SweepRow| if r.margin.is_nan() { f64::NEG_INFINITY } else { r.margin };
    rows.sort_by(|a, b| key(b).total_cmp(&key(a)));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn empty_parameter_list_gives_empty_table() {
        let rows = sweep(&[], 4, |_| Err(Error::InvalidParameter("unused".into())));
        assert!(rows.is_empty());
    }

    #[test]
    fn runner_errors_become_failed_rows() {
        let rows = sweep(&[1.0, 2.0], 2, |v| {
            Err(Error::InvalidParameter(format!("bad {v}")))
        });
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.classification == Classification::Failed));
        assert!(rows.iter().all(|r| r.note.is_some()));
    }
}
