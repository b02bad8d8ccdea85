//! Radio contacts between nodes and the transfers that run over them.

use thiserror::Error;

use crate::map::GeoPoint;
use crate::{MessageId, NodeId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("invalid link parameters: {0}")]
    InvalidParams(String),
}

/// Radio range in meters and bandwidth in bytes per second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub range: f64,
    pub bandwidth: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            range: 10.0,
            bandwidth: 1_400_000.0,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<(), LinkError> {
        if !(self.range > 0.0 && self.range.is_finite()) {
            return Err(LinkError::InvalidParams(format!("range {} must be positive", self.range)));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(LinkError::InvalidParams(format!(
                "bandwidth {} must be positive",
                self.bandwidth
            )));
        }
        Ok(())
    }

    /// Whole bytes a node may move during one tick of `dt` seconds.
    pub fn bytes_per_tick(&self, dt: f64) -> u64 {
        (self.bandwidth * dt).round() as u64
    }
}

/// Unordered node pair stored as `(low, high)`.
pub type Pair = (NodeId, NodeId);

pub fn pair(a: NodeId, b: NodeId) -> Pair {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

const EMPTY: u32 = u32::MAX;
const MAX_CELLS: usize = 1 << 22;

/// Uniform-grid neighbor search over a fixed area. Cells are at least
/// `range` wide, so in-range pairs always sit in the same or adjacent cells.
/// Positions outside the area are clamped to border cells.
#[derive(Debug, Clone)]
pub struct ContactDetector {
    origin: GeoPoint,
    cell: f64,
    cols: usize,
    rows: usize,
    range_sq: f64,
    head: Vec<u32>,
    next: Vec<u32>,
    cell_of: Vec<usize>,
    touched: Vec<usize>,
}

impl ContactDetector {
    pub fn new(min: GeoPoint, max: GeoPoint, range: f64) -> Self {
        let width = (max.x - min.x).max(0.0);
        let height = (max.y - min.y).max(0.0);
        let mut cell = range;
        let (mut cols, mut rows);
        loop {
            cols = (width / cell).floor() as usize + 1;
            rows = (height / cell).floor() as usize + 1;
            if cols.saturating_mul(rows) <= MAX_CELLS {
                break;
            }
            cell *= 2.0;
        }
        Self {
            origin: min,
            cell,
            cols,
            rows,
            range_sq: range * range,
            head: vec![EMPTY; cols * rows],
            next: Vec::new(),
            cell_of: Vec::new(),
            touched: Vec::new(),
        }
    }

    fn cell_coords(&self, p: GeoPoint) -> (usize, usize) {
        let cx = ((p.x - self.origin.x) / self.cell).floor();
        let cy = ((p.y - self.origin.y) / self.cell).floor();
        let clamp = |v: f64, n: usize| -> usize {
            if v.is_nan() || v < 0.0 {
                0
            } else {
                (v as usize).min(n - 1)
            }
        };
        (clamp(cx, self.cols), clamp(cy, self.rows))
    }

    /// All in-range pairs (distance <= range), sorted by `(low, high)`.
    pub fn detect(&mut self, positions: &[GeoPoint], out: &mut Vec<Pair>) {
        out.clear();
        for &c in &self.touched {
            self.head[c] = EMPTY;
        }
        self.touched.clear();
        self.next.clear();
        self.next.resize(positions.len(), EMPTY);
        self.cell_of.clear();
        // insert in reverse so each cell list ends up in ascending index order
        self.cell_of.resize(positions.len(), 0);
        for i in (0..positions.len()).rev() {
            let (cx, cy) = self.cell_coords(positions[i]);
            let c = cy * self.cols + cx;
            self.cell_of[i] = c;
            if self.head[c] == EMPTY {
                self.touched.push(c);
            }
            self.next[i] = self.head[c];
            self.head[c] = i as u32;
        }
        for (i, &p) in positions.iter().enumerate() {
            let c = self.cell_of[i];
            let (cx, cy) = (c % self.cols, c / self.cols);
            for ny in cy.saturating_sub(1)..=(cy + 1).min(self.rows - 1) {
                for nx in cx.saturating_sub(1)..=(cx + 1).min(self.cols - 1) {
                    let mut j = self.head[ny * self.cols + nx];
                    while j != EMPTY {
                        let ju = j as usize;
                        if ju > i && p.distance_sq(positions[ju]) <= self.range_sq {
                            out.push((NodeId(i as u32), NodeId(j)));
                        }
                        j = self.next[ju];
                    }
                }
            }
        }
        out.sort_unstable();
    }
}

/// One-shot neighbor detection; bounds are taken from the positions.
pub fn detect(positions: &[GeoPoint], range: f64) -> Vec<Pair> {
    let mut out = Vec::new();
    if positions.is_empty() {
        return out;
    }
    let mut min = GeoPoint::new(f64::INFINITY, f64::INFINITY);
    let mut max = GeoPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in positions {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    ContactDetector::new(min, max, range).detect(positions, &mut out);
    out
}

/// Pairs that came up and went down between two sorted contact sets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContactDiff {
    pub up: Vec<Pair>,
    pub down: Vec<Pair>,
}

pub fn contact_diff(previous: &[Pair], current: &[Pair]) -> ContactDiff {
    let mut diff = ContactDiff::default();
    let (mut i, mut j) = (0, 0);
    while i < previous.len() || j < current.len() {
        match (previous.get(i), current.get(j)) {
            (Some(p), Some(c)) if p == c => {
                i += 1;
                j += 1;
            }
            (Some(p), Some(c)) if p < c => {
                diff.down.push(*p);
                i += 1;
            }
            (Some(_), Some(c)) => {
                diff.up.push(*c);
                j += 1;
            }
            (Some(p), None) => {
                diff.down.push(*p);
                i += 1;
            }
            (None, Some(c)) => {
                diff.up.push(*c);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    diff
}

/// A message payload moving from one node to another.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferJob {
    pub message: MessageId,
    pub sender: NodeId,
    pub receiver: NodeId,
    pub bytes_remaining: u64,
    pub started_at: f64,
}

/// Bytes each node may still move in the current tick.
#[derive(Debug, Clone)]
pub struct TickBudget {
    left: Vec<u64>,
    limit_receiver: bool,
}

impl TickBudget {
    pub fn new(nodes: usize, per_tick: u64, limit_receiver: bool) -> Self {
        Self {
            left: vec![per_tick; nodes],
            limit_receiver,
        }
    }

    pub fn left(&self, node: NodeId) -> u64 {
        self.left[node.index()]
    }

    /// Moves as many bytes of `job` as both endpoints can afford.
    /// Returns `true` once the job has no bytes left.
    pub fn spend(&mut self, job: &mut TransferJob) -> bool {
        let s = job.sender.index();
        let r = job.receiver.index();
        let mut amount = job.bytes_remaining.min(self.left[s]);
        if self.limit_receiver {
            amount = amount.min(self.left[r]);
            self.left[r] -= amount;
        }
        self.left[s] -= amount;
        job.bytes_remaining -= amount;
        job.bytes_remaining == 0
    }
}

/// Outcome of advancing a set of jobs by one tick.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransferProgress {
    pub completed: Vec<TransferJob>,
    pub aborted: Vec<TransferJob>,
    pub ongoing: Vec<TransferJob>,
}

/// Advances jobs in sender index order. A job whose pair is no longer in
/// `contacts` (sorted) is aborted.
pub fn progress_transfers(
    mut jobs: Vec<TransferJob>,
    budget: &mut TickBudget,
    contacts: &[Pair],
) -> TransferProgress {
    jobs.sort_by_key(|j| (j.sender, j.receiver));
    let mut out = TransferProgress::default();
    for mut job in jobs {
        if contacts.binary_search(&pair(job.sender, job.receiver)).is_err() {
            out.aborted.push(job);
        } else if budget.spend(&mut job) {
            out.completed.push(job);
        } else {
            out.ongoing.push(job);
        }
    }
    out
}

/// Active jobs plus per-node occupancy, enforcing one transfer per node.
/// With `exclusive_receiver` off only senders are limited to one job.
#[derive(Debug, Clone)]
pub struct TransferTable {
    jobs: Vec<TransferJob>,
    sending: Vec<bool>,
    receiving: Vec<u32>,
    exclusive_receiver: bool,
}

impl TransferTable {
    pub fn new(nodes: usize, exclusive_receiver: bool) -> Self {
        Self {
            jobs: Vec::new(),
            sending: vec![false; nodes],
            receiving: vec![0; nodes],
            exclusive_receiver,
        }
    }

    pub fn exclusive_receiver(&self) -> bool {
        self.exclusive_receiver
    }

    pub fn jobs(&self) -> &[TransferJob] {
        &self.jobs
    }

    pub fn is_sending(&self, node: NodeId) -> bool {
        self.sending[node.index()]
    }

    /// Whether `node` may start sending now.
    pub fn sender_free(&self, node: NodeId) -> bool {
        let i = node.index();
        !self.sending[i] && (!self.exclusive_receiver || self.receiving[i] == 0)
    }

    /// Whether `node` may accept an incoming transfer now.
    pub fn receiver_free(&self, node: NodeId) -> bool {
        let i = node.index();
        !self.exclusive_receiver || (!self.sending[i] && self.receiving[i] == 0)
    }

    /// Message `node` is currently sending, if any.
    pub fn outgoing(&self, node: NodeId) -> Option<MessageId> {
        if !self.sending[node.index()] {
            return None;
        }
        self.jobs.iter().find(|j| j.sender == node).map(|j| j.message)
    }

    pub fn insert(&mut self, job: TransferJob) {
        debug_assert!(self.sender_free(job.sender) && self.receiver_free(job.receiver));
        self.sending[job.sender.index()] = true;
        self.receiving[job.receiver.index()] += 1;
        self.jobs.push(job);
    }

    fn release(&mut self, job: &TransferJob) {
        self.sending[job.sender.index()] = false;
        self.receiving[job.receiver.index()] -= 1;
    }

    /// Removes and returns every job matching `pred`, in table order.
    pub fn remove_where(&mut self, mut pred: impl FnMut(&TransferJob) -> bool) -> Vec<TransferJob> {
        let mut removed = Vec::new();
        let mut kept = Vec::with_capacity(self.jobs.len());
        for job in std::mem::take(&mut self.jobs) {
            if pred(&job) {
                removed.push(job);
            } else {
                kept.push(job);
            }
        }
        self.jobs = kept;
        for job in &removed {
            self.release(job);
        }
        removed
    }

    /// Runs one tick of progress over all active jobs, releasing nodes whose
    /// jobs complete or abort.
    pub fn progress(&mut self, budget: &mut TickBudget, contacts: &[Pair]) -> TransferProgress {
        let jobs = std::mem::take(&mut self.jobs);
        let progress = progress_transfers(jobs, budget, contacts);
        for job in progress.completed.iter().chain(&progress.aborted) {
            self.release(job);
        }
        self.jobs = progress.ongoing.clone();
        progress
    }

    /// Starts `job` and immediately spends this tick's budget on it.
    /// Returns the job if it completed within the tick.
    pub fn start(&mut self, mut job: TransferJob, budget: &mut TickBudget) -> Option<TransferJob> {
        if budget.spend(&mut job) {
            Some(job)
        } else {
            self.insert(job);
            None
        }
    }
}
