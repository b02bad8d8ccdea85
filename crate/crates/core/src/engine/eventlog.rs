use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::{MessageId, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Create,
    SendStart,
    Received,
    Aborted,
    DropBuffer,
    DropTtl,
    DropCustody,
    RejectTooLarge,
}

impl EventKind {
    pub const ALL: [EventKind; 8] = [
        EventKind::Create,
        EventKind::SendStart,
        EventKind::Received,
        EventKind::Aborted,
        EventKind::DropBuffer,
        EventKind::DropTtl,
        EventKind::DropCustody,
        EventKind::RejectTooLarge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Create => "CREATE",
            EventKind::SendStart => "SEND_START",
            EventKind::Received => "RECEIVED",
            EventKind::Aborted => "ABORTED",
            EventKind::DropBuffer => "DROP_BUFFER",
            EventKind::DropTtl => "DROP_TTL",
            EventKind::DropCustody => "DROP_CUSTODY",
            EventKind::RejectTooLarge => "REJECT_TOO_LARGE",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown event kind '{s}'"))
    }
}

/// One log line: `time kind message from to`. `from` is the sender for
/// transfer events and the acting node otherwise; `to` is `-` when there is
/// no counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub kind: EventKind,
    pub message: MessageId,
    pub from: NodeId,
    pub to: Option<NodeId>,
}

/// Rounds a time to the 4 decimals the log keeps.
pub fn log_time(t: f64) -> f64 {
    (t * 1e4).round() / 1e4
}

impl fmt::Display for EventRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} {} {} {} ", self.time, self.kind, self.message, self.from)?;
        match self.to {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("-"),
        }
    }
}

impl FromStr for EventRecord {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() != 5 {
            return Err(format!("expected 5 fields, found {}", fields.len()));
        }
        let time: f64 = fields[0]
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite() && *t >= 0.0)
            .ok_or_else(|| format!("invalid time '{}'", fields[0]))?;
        Ok(EventRecord {
            time,
            kind: fields[1].parse()?,
            message: fields[2].parse()?,
            from: fields[3].parse()?,
            to: match fields[4] {
                "-" => None,
                n => Some(n.parse()?),
            },
        })
    }
}

pub fn write_records<W: Write>(records: &[EventRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{r}")?;
    }
    out.flush()
}

/// Writes one record per line with a trailing newline.
pub fn write_event_log(records: &[EventRecord], path: &Path) -> std::io::Result<()> {
    let file = File::create(path)?;
    write_records(records, BufWriter::new(file))
}
