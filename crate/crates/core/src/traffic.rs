//! Message creation schedules.

use rand::Rng;
use thiserror::Error;

use crate::routing::{DEFAULT_MESSAGE_SIZE, DEFAULT_TTL};
use crate::{MessageId, NodeId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrafficError {
    #[error("unknown traffic preset '{0}'")]
    UnknownPreset(String),
    #[error("invalid traffic pattern: {0}")]
    InvalidPattern(String),
    #[error("no message sources")]
    NoSources,
    #[error("need at least two nodes")]
    TooFewNodes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficKind {
    /// A single message from the first source at t = 0.
    One,
    /// Every source creates at t = 0 and then after each drawn gap.
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficPattern {
    pub kind: TrafficKind,
    pub interval_min: f64,
    pub interval_max: f64,
    /// Creations happen strictly before this time.
    pub window: f64,
    pub size: u64,
    pub ttl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreationEvent {
    pub time: f64,
    pub source: NodeId,
    pub destination: NodeId,
    pub message: MessageId,
}

impl TrafficPattern {
    fn periodic(interval: f64) -> Self {
        Self {
            kind: TrafficKind::Periodic,
            interval_min: interval,
            interval_max: interval,
            window: 3600.0,
            size: DEFAULT_MESSAGE_SIZE,
            ttl: DEFAULT_TTL,
        }
    }

    pub fn validate(&self) -> Result<(), TrafficError> {
        let bad = |m: String| Err(TrafficError::InvalidPattern(m));
        if self.size == 0 {
            return bad("message size must be positive".into());
        }
        if self.ttl.is_nan() || self.ttl <= 0.0 {
            return bad(format!("ttl {} must be positive", self.ttl));
        }
        if !(self.window >= 0.0 && self.window.is_finite()) {
            return bad(format!("window {} must be a finite non-negative time", self.window));
        }
        if self.kind == TrafficKind::Periodic
            && !(self.interval_min > 0.0 && self.interval_min <= self.interval_max && self.interval_max.is_finite())
        {
            return bad(format!(
                "need 0 < interval_min <= interval_max, got {} and {}",
                self.interval_min, self.interval_max
            ));
        }
        Ok(())
    }
}

/// Named workloads: `one`, `moderate` (every 300 s) and `high` (every 30 s).
pub fn preset(name: &str) -> Result<TrafficPattern, TrafficError> {
    match name {
        "one" => Ok(TrafficPattern {
            kind: TrafficKind::One,
            ..TrafficPattern::periodic(300.0)
        }),
        "moderate" => Ok(TrafficPattern::periodic(300.0)),
        "high" => Ok(TrafficPattern::periodic(30.0)),
        other => Err(TrafficError::UnknownPreset(other.to_string())),
    }
}

fn pick_destination<R: Rng + ?Sized>(source: NodeId, all: &[NodeId], rng: &mut R) -> NodeId {
    let own = all.iter().position(|&n| n == source);
    let pool = all.len() - usize::from(own.is_some());
    let mut k = rng.gen_range(0..pool);
    if own.is_some_and(|o| k >= o) {
        k += 1;
    }
    all[k]
}

/// Creation events sorted by time, ties broken by source id. Message ids
/// start at 1 and follow that order.
pub fn schedule<R: Rng + ?Sized>(
    pattern: &TrafficPattern,
    sources: &[NodeId],
    all: &[NodeId],
    rng: &mut R,
) -> Result<Vec<CreationEvent>, TrafficError> {
    pattern.validate()?;
    let first = *sources.first().ok_or(TrafficError::NoSources)?;
    if all.len() < 2 {
        return Err(TrafficError::TooFewNodes);
    }
    let mut events = Vec::new();
    match pattern.kind {
        TrafficKind::One => {
            if pattern.window > 0.0 {
                events.push((0.0, first, pick_destination(first, all, rng)));
            }
        }
        TrafficKind::Periodic => {
            for &src in sources {
                let mut t = 0.0;
                while t < pattern.window {
                    events.push((t, src, pick_destination(src, all, rng)));
                    t += rng.gen_range(pattern.interval_min..=pattern.interval_max);
                }
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(events
        .into_iter()
        .enumerate()
        .map(|(k, (time, source, destination))| CreationEvent {
            time,
            source,
            destination,
            message: MessageId(k as u32 + 1),
        })
        .collect())
}
