//! Metrics computed from event logs and occupancy reports.
//!
//! Saturation of a message is the share of all nodes that have received it
//! at least once, the creator included.

mod summary;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use summary::{discover_runs, load_run, summarize, RunData, SummaryRow};

use crate::engine::{EventKind, EventRecord, OccupancySample};
use crate::{MessageId, NodeId};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("RECEIVED for unknown message {0}")]
    UnknownMessage(MessageId),
    #[error("total node count must be at least 1")]
    NoNodes,
    #[error("empty occupancy report")]
    EmptyReport,
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

/// Parses an event log, checking field arity and that times never decrease.
pub fn parse_event_log_str(text: &str) -> Result<Vec<EventRecord>, AnalysisError> {
    let mut out: Vec<EventRecord> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let rec: EventRecord = line.parse().map_err(|message| AnalysisError::Parse {
            line: idx + 1,
            message,
        })?;
        if out.last().is_some_and(|prev| prev.time > rec.time) {
            return Err(AnalysisError::Parse {
                line: idx + 1,
                message: format!("time {} goes backwards", rec.time),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn parse_event_log(path: &Path) -> Result<Vec<EventRecord>, AnalysisError> {
    let text = fs::read_to_string(path).map_err(|source| AnalysisError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_event_log_str(&text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationSeries {
    pub message: MessageId,
    pub creator: NodeId,
    pub created_at: f64,
    /// `(time, saturation %)`, starting at creation with the creator alone.
    pub points: Vec<(f64, f64)>,
    pub unique_receivers: usize,
    /// RECEIVED records beyond the first per non-creator node, plus any the
    /// creator got back.
    pub redeliveries: usize,
}

impl SaturationSeries {
    pub fn final_pct(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }

    pub fn is_saturated(&self) -> bool {
        self.final_pct() >= 100.0
    }
}

fn pct(unique: usize, total: usize) -> f64 {
    (100.0 * unique as f64 / total as f64).min(100.0)
}

/// One series per created message, in creation order.
pub fn saturation(records: &[EventRecord], total_nodes: usize) -> Result<Vec<SaturationSeries>, AnalysisError> {
    if total_nodes == 0 {
        return Err(AnalysisError::NoNodes);
    }
    struct Acc {
        series: SaturationSeries,
        seen: Vec<NodeId>,
        received: usize,
    }
    let mut index: HashMap<MessageId, usize> = HashMap::new();
    let mut accs: Vec<Acc> = Vec::new();
    for r in records {
        match r.kind {
            EventKind::Create => {
                index.insert(r.message, accs.len());
                accs.push(Acc {
                    series: SaturationSeries {
                        message: r.message,
                        creator: r.from,
                        created_at: r.time,
                        points: vec![(r.time, pct(1, total_nodes))],
                        unique_receivers: 1,
                        redeliveries: 0,
                    },
                    seen: vec![r.from],
                    received: 0,
                });
            }
            EventKind::Received => {
                let &i = index.get(&r.message).ok_or(AnalysisError::UnknownMessage(r.message))?;
                let acc = &mut accs[i];
                acc.received += 1;
                let to = r.to.expect("RECEIVED always names a receiver");
                if !acc.seen.contains(&to) {
                    acc.seen.push(to);
                    acc.series.unique_receivers += 1;
                    acc.series
                        .points
                        .push((r.time, pct(acc.series.unique_receivers, total_nodes)));
                }
            }
            _ => {}
        }
    }
    Ok(accs
        .into_iter()
        .map(|mut a| {
            a.series.redeliveries = a.received - (a.series.unique_receivers - 1);
            a.series
        })
        .collect())
}

/// Seconds from creation until the series first reaches 100%.
pub fn time_to_full_saturation(series: &SaturationSeries) -> Option<f64> {
    series
        .points
        .iter()
        .find(|p| p.1 >= 100.0)
        .map(|p| p.0 - series.created_at)
}

/// Exponential moving average: `s0 = x0`, `si = (1 - alpha) s(i-1) + alpha xi`.
pub fn ema(values: &[f64], alpha: f64) -> Vec<f64> {
    assert!(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
    let mut out = Vec::with_capacity(values.len());
    let mut s = 0.0;
    for (i, &x) in values.iter().enumerate() {
        s = if i == 0 { x } else { (1.0 - alpha) * s + alpha * x };
        out.push(s);
    }
    out
}

pub fn read_occupancy_csv(path: &Path) -> Result<Vec<OccupancySample>, AnalysisError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in rdr.deserialize::<(f64, f64)>() {
        let (time, mean_occupancy_pct) = row?;
        out.push(OccupancySample {
            time,
            mean_occupancy_pct,
        });
    }
    Ok(out)
}

pub fn max_avg_occupancy(samples: &[OccupancySample]) -> Result<f64, AnalysisError> {
    samples
        .iter()
        .map(|s| s.mean_occupancy_pct)
        .reduce(f64::max)
        .ok_or(AnalysisError::EmptyReport)
}

/// First sample time after the occupancy peak at which occupancy has fallen
/// to `fraction` of the peak or below. Returns `(peak time, crossing time)`.
pub fn peak_decline(samples: &[OccupancySample], fraction: f64) -> Option<(f64, f64)> {
    let (peak_idx, peak) = samples
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |best, (i, s)| match best {
            Some((_, v)) if v >= s.mean_occupancy_pct => best,
            _ => Some((i, s.mean_occupancy_pct)),
        })?;
    if peak <= 0.0 {
        return None;
    }
    samples[peak_idx..]
        .iter()
        .find(|s| s.mean_occupancy_pct <= fraction * peak)
        .map(|s| (samples[peak_idx].time, s.time))
}

/// RECEIVED count per `(node, message)` pair, for pairs received more than
/// once.
pub fn repeated_receipts(records: &[EventRecord]) -> Vec<((NodeId, MessageId), usize)> {
    let mut counts: HashMap<(NodeId, MessageId), usize> = HashMap::new();
    for r in records.iter().filter(|r| r.kind == EventKind::Received) {
        *counts.entry((r.to.expect("receiver"), r.message)).or_default() += 1;
    }
    let mut out: Vec<_> = counts.into_iter().filter(|&(_, c)| c > 1).collect();
    out.sort();
    out
}
