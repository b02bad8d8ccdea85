use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::config::{ConfigError, MapSource, ScenarioConfig};
use super::eventlog::{log_time, write_records, EventKind, EventRecord};
use crate::contacts::{contact_diff, pair, ContactDetector, Pair, TickBudget, TransferJob, TransferTable};
use crate::map::{build_graph, generate_grid, parse_wkt, restrict, GeoPoint, MapError, RoadGraph};
use crate::mobility::{advance, init_state, MobilityError, MovementGraph, MovementState};
use crate::routing::{DropReason, Message, Receipt, RouterKind, RouterState, TIME_EPS};
use crate::traffic::{schedule, CreationEvent, TrafficError};
use crate::{MessageId, NodeId};

/// Random stream used for the traffic schedule; node `i` uses stream `i + 1`.
pub const TRAFFIC_STREAM: u64 = 0;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("map: {0}")]
    Map(#[from] MapError),
    #[error("mobility: {0}")]
    Mobility(#[from] MobilityError),
    #[error("traffic: {0}")]
    Traffic(#[from] TrafficError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EngineError + '_ {
    move |source| EngineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupancySample {
    pub time: f64,
    pub mean_occupancy_pct: f64,
}

/// Loads or generates the road graph a scenario runs on.
pub fn build_map(source: &MapSource) -> Result<RoadGraph, EngineError> {
    match source {
        MapSource::Grid { rows, cols, spacing } => Ok(generate_grid(*rows, *cols, *spacing)?),
        MapSource::Wkt { files, snap } => {
            let mut lines = Vec::new();
            for f in files {
                let text = fs::read_to_string(f).map_err(io_err(f))?;
                let parsed = parse_wkt(&text).map_err(|e| EngineError::Invalid(format!("{}: {e}", f.display())))?;
                for w in &parsed.warnings {
                    log::warn!("{}:{}: {:?}", f.display(), w.line, w.kind);
                }
                lines.extend(parsed.polylines);
            }
            Ok(build_graph(&lines, *snap)?)
        }
    }
}

fn node_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A single deterministic run, advanced one tick at a time.
pub struct Simulation {
    config: ScenarioConfig,
    dt: f64,
    graphs: Vec<MovementGraph>,
    group_of: Vec<usize>,
    states: Vec<MovementState>,
    rngs: Vec<ChaCha8Rng>,
    positions: Vec<GeoPoint>,
    detector: ContactDetector,
    contacts: Vec<Pair>,
    scratch: Vec<Pair>,
    neighbors: Vec<Vec<NodeId>>,
    routers: Vec<RouterState>,
    messages: Vec<Message>,
    schedule: Vec<CreationEvent>,
    next_creation: usize,
    transfers: TransferTable,
    per_tick: u64,
    sample_every: u64,
    total_steps: u64,
    step: u64,
    records: Vec<EventRecord>,
    occupancy: Vec<OccupancySample>,
    /// `(sender, peer) -> (sender version, peer version)` for pairs known to
    /// have nothing to exchange.
    idle_pairs: HashMap<(u32, u32), (u64, u64)>,
    /// `(sender, receiver)` pairs whose transfer was refused this tick.
    refused: Vec<(NodeId, NodeId)>,
}

impl Simulation {
    pub fn new(config: &ScenarioConfig) -> Result<Self, EngineError> {
        Self::build(config, None)
    }

    /// Runs with an explicit creation schedule instead of the configured
    /// traffic. Events must be sorted by time with ids 1, 2, 3, ...
    pub fn with_schedule(config: &ScenarioConfig, events: Vec<CreationEvent>) -> Result<Self, EngineError> {
        Self::build(config, Some(events))
    }

    fn build(config: &ScenarioConfig, events: Option<Vec<CreationEvent>>) -> Result<Self, EngineError> {
        config.validate()?;
        let n = config.node_count();
        let full = build_map(&config.map)?;
        let mut graphs = Vec::new();
        let mut group_of = Vec::with_capacity(n);
        for (gi, g) in config.groups.iter().enumerate() {
            let graph = match &g.region {
                Some(r) => restrict(&full, r)?,
                None => full.clone(),
            };
            graphs.push(MovementGraph::new(graph)?);
            group_of.extend(std::iter::repeat_n(gi, g.count));
        }
        let mut rngs: Vec<ChaCha8Rng> = (0..n).map(|i| node_rng(config.seed, i as u64 + 1)).collect();
        let states: Vec<MovementState> = (0..n)
            .map(|i| {
                let g = group_of[i];
                init_state(&graphs[g], &config.groups[g].mobility, &mut rngs[i])
            })
            .collect();
        let positions = states.iter().map(|s| s.position()).collect();

        let ids: Vec<NodeId> = (0..n as u32).map(NodeId).collect();
        let sources = &ids[..config.groups[0].count];
        let schedule = match events {
            Some(ev) => {
                for (k, e) in ev.iter().enumerate() {
                    if e.message.0 as usize != k + 1 {
                        return Err(EngineError::Invalid(format!("schedule entry {k} has id {}", e.message)));
                    }
                    if k > 0 && ev[k - 1].time > e.time {
                        return Err(EngineError::Invalid("schedule is not sorted by time".into()));
                    }
                    if e.source.index() >= n || e.destination.index() >= n || e.source == e.destination {
                        return Err(EngineError::Invalid(format!("schedule entry {} has bad endpoints", e.message)));
                    }
                }
                ev
            }
            None => schedule(&config.traffic, sources, &ids, &mut node_rng(config.seed, TRAFFIC_STREAM))?,
        };
        if config.traffic.size > config.buffer && !schedule.is_empty() {
            log::warn!(
                "message size {} exceeds buffer capacity {}; every creation will be rejected",
                config.traffic.size,
                config.buffer
            );
        }

        let (min, max) = full.bounds();
        let total_steps = (config.end_time / config.tick).round() as u64;
        let sample_every = ((config.report_interval / config.tick).round() as u64).max(1);
        Ok(Self {
            dt: config.tick,
            graphs,
            group_of,
            states,
            rngs,
            positions,
            detector: ContactDetector::new(min, max, config.link.range),
            contacts: Vec::new(),
            scratch: Vec::new(),
            neighbors: vec![Vec::new(); n],
            routers: (0..n)
                .map(|_| RouterState::new(config.router, config.buffer, config.wave))
                .collect(),
            messages: Vec::with_capacity(schedule.len()),
            schedule,
            next_creation: 0,
            transfers: TransferTable::new(n, config.exclusive_receiver),
            per_tick: config.link.bytes_per_tick(config.tick),
            sample_every,
            total_steps,
            step: 0,
            records: Vec::new(),
            occupancy: Vec::new(),
            idle_pairs: HashMap::new(),
            refused: Vec::new(),
            config: config.clone(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn node_count(&self) -> usize {
        self.routers.len()
    }

    pub fn is_finished(&self) -> bool {
        self.step > self.total_steps
    }

    /// Time of the next tick to run.
    pub fn next_time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn routers(&self) -> &[RouterState] {
        &self.routers
    }

    pub fn positions(&self) -> &[GeoPoint] {
        &self.positions
    }

    pub fn contacts(&self) -> &[Pair] {
        &self.contacts
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn occupancy(&self) -> &[OccupancySample] {
        &self.occupancy
    }

    pub fn schedule(&self) -> &[CreationEvent] {
        &self.schedule
    }

    pub fn transfers(&self) -> &TransferTable {
        &self.transfers
    }

    fn record(&mut self, time: f64, kind: EventKind, message: MessageId, from: NodeId, to: Option<NodeId>) {
        self.records.push(EventRecord {
            time,
            kind,
            message,
            from,
            to,
        });
    }

    /// Runs one tick. Tick 0 only places nodes, finds initial contacts and
    /// creates t = 0 messages; every later tick runs mobility, contacts,
    /// expiry, creation and transfers in that order.
    pub fn step(&mut self) {
        assert!(!self.is_finished(), "simulation already finished");
        let k = self.step;
        let now = k as f64 * self.dt;
        let stamp = log_time(now);
        if k > 0 {
            self.move_nodes();
        }
        self.update_contacts(stamp);
        if k > 0 {
            self.expire(now, stamp);
        }
        self.inject(now, stamp);
        if k > 0 {
            self.run_transfers(now, stamp);
        }
        if k.is_multiple_of(self.sample_every) {
            self.sample(stamp);
        }
        self.step += 1;
    }

    pub fn run_to_end(&mut self) {
        while !self.is_finished() {
            self.step();
        }
    }

    pub fn finish(mut self) -> RunOutput {
        self.run_to_end();
        RunOutput {
            config: self.config,
            records: self.records,
            occupancy: self.occupancy,
            messages_created: self.messages.len(),
            steps: self.total_steps,
        }
    }

    fn move_nodes(&mut self) {
        for i in 0..self.states.len() {
            let g = self.group_of[i];
            advance(
                &mut self.states[i],
                self.dt,
                &self.graphs[g],
                &self.config.groups[g].mobility,
                &mut self.rngs[i],
            );
            self.positions[i] = self.states[i].position();
        }
    }

    fn update_contacts(&mut self, stamp: f64) {
        self.detector.detect(&self.positions, &mut self.scratch);
        if self.scratch == self.contacts {
            return;
        }
        let diff = contact_diff(&self.contacts, &self.scratch);
        std::mem::swap(&mut self.contacts, &mut self.scratch);
        if !diff.down.is_empty() {
            let aborted = self
                .transfers
                .remove_where(|j| diff.down.binary_search(&pair(j.sender, j.receiver)).is_ok());
            for j in aborted {
                self.record(stamp, EventKind::Aborted, j.message, j.sender, Some(j.receiver));
            }
            for &(a, b) in &diff.down {
                self.idle_pairs.remove(&(a.0, b.0));
                self.idle_pairs.remove(&(b.0, a.0));
            }
        }
        for list in &mut self.neighbors {
            list.clear();
        }
        for &(a, b) in &self.contacts {
            self.neighbors[a.index()].push(b);
            self.neighbors[b.index()].push(a);
        }
    }

    fn expire(&mut self, now: f64, stamp: f64) {
        for i in 0..self.routers.len() {
            let drops = self.routers[i].tick_expiry(now);
            let node = NodeId(i as u32);
            for d in drops {
                let kind = match d.reason {
                    DropReason::Ttl => EventKind::DropTtl,
                    DropReason::Custody => EventKind::DropCustody,
                    DropReason::Buffer => EventKind::DropBuffer,
                };
                self.record(stamp, kind, d.message, node, None);
                if self.transfers.outgoing(node) == Some(d.message) {
                    for j in self.transfers.remove_where(|j| j.sender == node) {
                        self.record(stamp, EventKind::Aborted, j.message, j.sender, Some(j.receiver));
                    }
                }
            }
        }
    }

    fn inject(&mut self, now: f64, stamp: f64) {
        while let Some(ev) = self.schedule.get(self.next_creation).copied() {
            if ev.time > now + TIME_EPS {
                break;
            }
            self.next_creation += 1;
            let msg = Message {
                id: ev.message,
                source: ev.source,
                destination: ev.destination,
                size: self.config.traffic.size,
                created_at: stamp,
                ttl: self.config.traffic.ttl,
            };
            self.messages.push(msg);
            self.record(stamp, EventKind::Create, msg.id, msg.source, None);
            let pinned = self.transfers.outgoing(msg.source);
            let receipt = self.routers[msg.source.index()].create_local(&msg, now, pinned);
            self.log_receipt(stamp, receipt, msg.id, msg.source, None);
        }
    }

    /// Logs the outcome of a receipt at `node`; `sender` is `None` for a
    /// creation.
    fn log_receipt(&mut self, stamp: f64, receipt: Receipt, id: MessageId, node: NodeId, sender: Option<NodeId>) {
        let (from, to) = match sender {
            Some(s) => (s, Some(node)),
            None => (node, None),
        };
        match receipt {
            Receipt::Accepted { evicted } => {
                if sender.is_some() {
                    self.record(stamp, EventKind::Received, id, from, to);
                }
                for e in evicted {
                    self.record(stamp, EventKind::DropBuffer, e, node, None);
                }
            }
            Receipt::RejectedTooLarge { first: true } => self.record(stamp, EventKind::RejectTooLarge, id, from, to),
            Receipt::RejectedTooLarge { first: false } => {}
            Receipt::RejectedNoSpace | Receipt::Duplicate => self.record(stamp, EventKind::Aborted, id, from, to),
        }
    }

    /// Hands a finished transfer to the receiver. Returns whether it was
    /// accepted.
    fn complete(&mut self, job: TransferJob, now: f64, stamp: f64) -> bool {
        let msg = self.messages[job.message.index() - 1];
        let r = job.receiver.index();
        let pinned = self.transfers.outgoing(job.receiver);
        let receipt = self.routers[r].on_receive(&msg, now, pinned);
        let accepted = matches!(receipt, Receipt::Accepted { .. });
        if accepted {
            self.routers[job.sender.index()].on_sent(msg.id);
        }
        self.log_receipt(stamp, receipt, msg.id, job.receiver, Some(job.sender));
        accepted
    }

    fn run_transfers(&mut self, now: f64, stamp: f64) {
        let mut budget = TickBudget::new(self.routers.len(), self.per_tick, self.config.exclusive_receiver);
        let progress = self.transfers.progress(&mut budget, &self.contacts);
        for j in progress.aborted {
            self.record(stamp, EventKind::Aborted, j.message, j.sender, Some(j.receiver));
        }
        self.refused.clear();
        for j in progress.completed {
            self.complete(j, now, stamp);
        }
        for i in 0..self.routers.len() {
            self.start_transfers(i, &mut budget, now, stamp);
        }
    }

    fn start_transfers(&mut self, i: usize, budget: &mut TickBudget, now: f64, stamp: f64) {
        let me = NodeId(i as u32);
        loop {
            if self.neighbors[i].is_empty()
                || self.routers[i].buffer().is_empty()
                || budget.left(me) == 0
                || !self.transfers.sender_free(me)
            {
                return;
            }
            let Some((id, peer)) = self.find_offer(i, budget, now) else {
                return;
            };
            self.record(stamp, EventKind::SendStart, id, me, Some(peer));
            let job = TransferJob {
                message: id,
                sender: me,
                receiver: peer,
                bytes_remaining: self.messages[id.index() - 1].size,
                started_at: now,
            };
            match self.transfers.start(job, budget) {
                Some(done) => {
                    if !self.complete(done, now, stamp) {
                        self.refused.push((me, peer));
                    }
                }
                None => return,
            }
        }
    }

    fn find_offer(&mut self, i: usize, budget: &TickBudget, now: f64) -> Option<(MessageId, NodeId)> {
        let exclusive = self.config.exclusive_receiver;
        let me = NodeId(i as u32);
        let refused = &self.refused;
        let available = |p: NodeId, t: &TransferTable| {
            t.receiver_free(p) && (!exclusive || budget.left(p) > 0) && !refused.contains(&(me, p))
        };
        let sender = &self.routers[i];
        if exclusive && matches!(sender.kind(), RouterKind::Epidemic | RouterKind::Wave) {
            let vi = sender.version();
            let mut best: Option<(usize, NodeId)> = None;
            for &p in &self.neighbors[i] {
                if !available(p, &self.transfers) {
                    continue;
                }
                let peer = &self.routers[p.index()];
                let key = (me.0, p.0);
                let vp = peer.version();
                if self.idle_pairs.get(&key) == Some(&(vi, vp)) {
                    continue;
                }
                let limit = best.map_or(usize::MAX, |b| b.0);
                match sender.first_wanted(peer, now, limit) {
                    Some(pos) => best = Some((pos, p)),
                    None if limit == usize::MAX => {
                        self.idle_pairs.insert(key, (vi, vp));
                    }
                    None => {}
                }
            }
            return best.map(|(pos, p)| (sender.buffer().ids().nth(pos).expect("position in buffer"), p));
        }
        let peers: Vec<(NodeId, &RouterState)> = self.neighbors[i]
            .iter()
            .filter(|&&p| available(p, &self.transfers))
            .map(|&p| (p, &self.routers[p.index()]))
            .collect();
        let jobs = self.transfers.jobs();
        sender
            .select_transfers(me, &peers, now)
            .into_iter()
            .find(|&(m, p)| !jobs.iter().any(|j| j.receiver == p && j.message == m))
    }

    fn sample(&mut self, stamp: f64) {
        let n = self.routers.len() as f64;
        let sum: f64 = self
            .routers
            .iter()
            .map(|r| r.buffer().occupied() as f64 / r.buffer().capacity() as f64)
            .sum();
        self.occupancy.push(OccupancySample {
            time: stamp,
            mean_occupancy_pct: 100.0 * sum / n,
        });
    }
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub records: Vec<EventRecord>,
    pub occupancy: Vec<OccupancySample>,
    pub messages_created: usize,
    pub steps: u64,
}

impl RunOutput {
    pub fn count(&self, kind: EventKind) -> usize {
        self.records.iter().filter(|r| r.kind == kind).count()
    }

    pub fn max_avg_occupancy(&self) -> f64 {
        self.occupancy
            .iter()
            .map(|s| s.mean_occupancy_pct)
            .fold(0.0, f64::max)
    }

    pub fn event_log(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_records(&self.records, &mut out).expect("writing to memory");
        out
    }

    pub fn manifest(&self) -> Vec<(String, String)> {
        let c = &self.config;
        let mut m = vec![
            ("config_hash".to_string(), c.hash()),
            ("seed".into(), c.seed.to_string()),
            ("run_index".into(), c.run_index.to_string()),
            ("router".into(), c.router.to_string()),
            ("nodes".into(), c.node_count().to_string()),
            ("buffer".into(), c.buffer.to_string()),
            ("end_time".into(), c.end_time.to_string()),
            ("tick".into(), c.tick.to_string()),
            ("steps".into(), self.steps.to_string()),
            ("messages_created".into(), self.messages_created.to_string()),
            ("records".into(), self.records.len().to_string()),
        ];
        for kind in EventKind::ALL {
            m.push((format!("count.{}", kind.as_str().to_ascii_lowercase()), self.count(kind).to_string()));
        }
        m.push(("max_avg_occupancy_pct".into(), format!("{:.6}", self.max_avg_occupancy())));
        for (k, v) in &c.swept {
            m.push((format!("param.{k}"), v.clone()));
        }
        m
    }

    pub fn occupancy_csv(&self) -> String {
        let mut s = String::from("time,mean_occupancy_pct\n");
        for o in &self.occupancy {
            let _ = writeln!(s, "{:.4},{:.6}", o.time, o.mean_occupancy_pct);
        }
        s
    }

    /// Writes `events.log`, `occupancy.csv` and `manifest.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), EngineError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let log = dir.join("events.log");
        let file = fs::File::create(&log).map_err(io_err(&log))?;
        write_records(&self.records, BufWriter::new(file)).map_err(io_err(&log))?;
        let occ = dir.join("occupancy.csv");
        fs::write(&occ, self.occupancy_csv()).map_err(io_err(&occ))?;
        let man = dir.join("manifest.txt");
        let mut f = BufWriter::new(fs::File::create(&man).map_err(io_err(&man))?);
        for (k, v) in self.manifest() {
            writeln!(f, "{k} = {v}").map_err(io_err(&man))?;
        }
        f.flush().map_err(io_err(&man))?;
        Ok(())
    }
}

/// Runs a scenario to completion.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput, EngineError> {
    Ok(Simulation::new(config)?.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::MobilityParams;
    use crate::traffic::preset;

    fn still() -> MobilityParams {
        MobilityParams {
            wait_min: 1e7,
            wait_max: 1e7,
            ..MobilityParams::default()
        }
    }

    fn static_cfg(router: RouterKind, nodes: usize, buffer: u64) -> ScenarioConfig {
        let map = MapSource::Grid {
            rows: 2,
            cols: 2,
            spacing: 5.0,
        };
        let mut c = ScenarioConfig::new(map, router, buffer, preset("one").unwrap());
        c.end_time = 20.0;
        c.groups[0].count = 1;
        c.groups[1].count = nodes - 1;
        for g in &mut c.groups {
            g.mobility = still();
        }
        c
    }

    fn event(k: u32, time: f64, src: u32, dst: u32) -> CreationEvent {
        CreationEvent {
            time,
            source: NodeId(src),
            destination: NodeId(dst),
            message: MessageId(k),
        }
    }

    fn received(out: &RunOutput, m: u32, to: u32) -> usize {
        out.records
            .iter()
            .filter(|r| r.kind == EventKind::Received && r.message == MessageId(m) && r.to == Some(NodeId(to)))
            .count()
    }

    #[test]
    fn three_static_nodes_share_within_a_tick() {
        let cfg = static_cfg(RouterKind::Epidemic, 3, 500_000);
        let mut sim = Simulation::with_schedule(&cfg, vec![event(1, 0.0, 0, 2)]).unwrap();
        sim.step();
        assert_eq!(sim.contacts().len(), 3);
        sim.step();
        assert!(sim.routers().iter().all(|r| r.buffer().contains(MessageId(1))));
        let out = sim.finish();
        assert_eq!(out.count(EventKind::Received), 2);
        assert!(out.records.iter().all(|r| r.time <= 0.1 + 1e-9 || r.kind == EventKind::DropTtl));
    }

    #[test]
    fn epidemic_takes_back_an_evicted_message() {
        let evs = vec![event(1, 0.0, 0, 1), event(2, 1.0, 1, 0)];
        let cfg = static_cfg(RouterKind::Epidemic, 2, 2064);
        let mut sim = Simulation::with_schedule(&cfg, evs.clone()).unwrap();
        sim.run_to_end();
        let out = sim.finish();
        assert_eq!(received(&out, 1, 1), 2);
        assert!(out.count(EventKind::DropBuffer) >= 2);

        let cfg = static_cfg(RouterKind::Wave, 2, 2064);
        let mut sim = Simulation::with_schedule(&cfg, evs).unwrap();
        sim.run_to_end();
        let out = sim.finish();
        assert_eq!(received(&out, 1, 1), 1);
        assert_eq!(received(&out, 2, 0), 1);
    }

    #[test]
    fn bad_schedules_are_rejected() {
        let cfg = static_cfg(RouterKind::Epidemic, 2, 2064);
        assert!(Simulation::with_schedule(&cfg, vec![event(2, 0.0, 0, 1)]).is_err());
        assert!(Simulation::with_schedule(&cfg, vec![event(1, 0.0, 0, 0)]).is_err());
        assert!(Simulation::with_schedule(&cfg, vec![event(1, 1.0, 0, 1), event(2, 0.0, 1, 0)]).is_err());
    }

    #[test]
    fn same_seed_same_log() {
        let map = MapSource::Grid {
            rows: 5,
            cols: 5,
            spacing: 20.0,
        };
        let mut cfg = ScenarioConfig::new(map, RouterKind::Epidemic, 20_000, preset("high").unwrap());
        cfg.groups[1].count = 15;
        cfg.end_time = 3600.0;
        cfg.seed = 3;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.event_log(), b.event_log());
        assert!(a.count(EventKind::DropBuffer) > 0);
        cfg.seed = 4;
        assert_ne!(run(&cfg).unwrap().event_log(), a.event_log());
    }

    #[test]
    fn occupancy_is_sampled_on_the_interval() {
        let cfg = static_cfg(RouterKind::Epidemic, 3, 500_000);
        let out = run(&cfg).unwrap();
        let times: Vec<f64> = out.occupancy.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.0, 10.0, 20.0]);
        assert!((out.occupancy[2].mean_occupancy_pct - 0.4128).abs() < 1e-9);
    }
}
