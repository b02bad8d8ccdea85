//! Store-carry-forward routers over drop-oldest buffers.
//!
//! Summary-vector exchange is modeled as a direct query of the peer's
//! [`RouterState::wants`] predicate, so it costs no bytes and no time.

mod buffer;
mod message;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use buffer::{Buffer, Entry, IdSet, NoRoom};
pub use message::{Message, DEFAULT_MESSAGE_SIZE, DEFAULT_TTL};

use crate::{MessageId, NodeId};

/// Slack used when comparing simulation times against deadlines, so that
/// `k * dt` rounding never delays a boundary-inclusive expiry by a tick.
pub const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("unknown router '{0}'")]
    UnknownRouter(String),
    #[error("invalid wave parameters: {0}")]
    InvalidWave(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RouterKind {
    Epidemic,
    Wave,
    FirstContact,
    DirectDelivery,
}

impl RouterKind {
    pub fn name(self) -> &'static str {
        match self {
            RouterKind::Epidemic => "epidemic",
            RouterKind::Wave => "wave",
            RouterKind::FirstContact => "firstcontact",
            RouterKind::DirectDelivery => "directdelivery",
        }
    }
}

impl fmt::Display for RouterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RouterKind {
    type Err = RoutingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "epidemic" => Ok(RouterKind::Epidemic),
            "wave" => Ok(RouterKind::Wave),
            "firstcontact" => Ok(RouterKind::FirstContact),
            "directdelivery" => Ok(RouterKind::DirectDelivery),
            other => Err(RoutingError::UnknownRouter(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    pub immunity: f64,
    pub custody_fraction: f64,
}

impl Default for WaveParams {
    fn default() -> Self {
        Self {
            immunity: 9000.0,
            custody_fraction: 0.5,
        }
    }
}

impl WaveParams {
    pub fn validate(&self) -> Result<(), RoutingError> {
        if !(self.immunity > 0.0 && self.immunity.is_finite()) {
            return Err(RoutingError::InvalidWave(format!("immunity {} must be positive", self.immunity)));
        }
        if !(self.custody_fraction > 0.0 && self.custody_fraction <= 1.0) {
            return Err(RoutingError::InvalidWave(format!(
                "custody fraction {} must be in (0, 1]",
                self.custody_fraction
            )));
        }
        Ok(())
    }

    pub fn custody_time(&self) -> f64 {
        self.custody_fraction * self.immunity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    Buffer,
    Ttl,
    Custody,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dropped {
    pub message: MessageId,
    pub reason: DropReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Receipt {
    /// Stored; `evicted` lists buffer drops made to fit it, oldest first.
    Accepted { evicted: Vec<MessageId> },
    /// Already buffered; nothing changed.
    Duplicate,
    /// Bigger than the whole buffer. `first` is set the first time this
    /// node sees the message.
    RejectedTooLarge { first: bool },
    /// Only in-flight payloads could have been evicted.
    RejectedNoSpace,
}

/// Wave's tracking list: receipt times in insertion order.
#[derive(Debug, Clone)]
struct Tracking {
    params: WaveParams,
    order: VecDeque<(MessageId, f64)>,
    since: Vec<f64>,
}

impl Tracking {
    fn receipt_time(&self, id: MessageId) -> Option<f64> {
        self.since.get(id.index()).copied().filter(|t| !t.is_nan())
    }

    fn contains(&self, id: MessageId, now: f64) -> bool {
        self.receipt_time(id)
            .is_some_and(|t| now + TIME_EPS < t + self.params.immunity)
    }

    fn add(&mut self, id: MessageId, now: f64) {
        if self.receipt_time(id).is_some() {
            return;
        }
        if self.since.len() <= id.index() {
            self.since.resize(id.index() + 1, f64::NAN);
        }
        self.since[id.index()] = now;
        self.order.push_back((id, now));
    }

    fn purge(&mut self, now: f64) -> bool {
        let mut changed = false;
        while let Some(&(id, t)) = self.order.front() {
            if now + TIME_EPS < t + self.params.immunity {
                break;
            }
            self.order.pop_front();
            if self.since[id.index()] == t {
                self.since[id.index()] = f64::NAN;
            }
            changed = true;
        }
        changed
    }

    fn next_deadline(&self) -> f64 {
        self.order
            .front()
            .map_or(f64::INFINITY, |&(_, t)| t + self.params.immunity)
    }
}

/// Per-node router: a buffer plus whatever bookkeeping the router needs.
#[derive(Debug, Clone)]
pub struct RouterState {
    kind: RouterKind,
    buffer: Buffer,
    tracking: Option<Tracking>,
    /// First Contact: every message this node ever held.
    seen: IdSet,
    too_large: IdSet,
    version: u64,
    next_deadline: f64,
}

impl RouterState {
    pub fn new(kind: RouterKind, capacity: u64, wave: WaveParams) -> Self {
        let tracking = (kind == RouterKind::Wave).then(|| Tracking {
            params: wave,
            order: VecDeque::new(),
            since: Vec::new(),
        });
        Self {
            kind,
            buffer: Buffer::new(capacity),
            tracking,
            seen: IdSet::default(),
            too_large: IdSet::default(),
            version: 0,
            next_deadline: f64::INFINITY,
        }
    }

    pub fn kind(&self) -> RouterKind {
        self.kind
    }

    pub fn buffer(&self) -> &Buffer {
        &self.buffer
    }

    /// Changes whenever the buffer or anything affecting [`Self::wants`]
    /// changes.
    pub fn version(&self) -> u64 {
        self.version
    }

    /// Whether `id` is on the tracking list at `now`. Always false for
    /// routers other than Wave.
    pub fn is_tracked(&self, id: MessageId, now: f64) -> bool {
        self.tracking.as_ref().is_some_and(|t| t.contains(id, now))
    }

    pub fn wants(&self, id: MessageId, now: f64) -> bool {
        if self.buffer.contains(id) || self.too_large.contains(id) {
            return false;
        }
        match self.kind {
            RouterKind::Wave => !self.is_tracked(id, now),
            RouterKind::FirstContact => !self.seen.contains(id),
            RouterKind::Epidemic | RouterKind::DirectDelivery => true,
        }
    }

    /// Stores an incoming copy, evicting oldest entries as needed. `pinned`
    /// is the payload this node is currently sending, which is never evicted.
    pub fn on_receive(&mut self, msg: &Message, now: f64, pinned: Option<MessageId>) -> Receipt {
        if self.buffer.contains(msg.id) {
            return Receipt::Duplicate;
        }
        if self.too_large.contains(msg.id) {
            return Receipt::RejectedTooLarge { first: false };
        }
        let evicted = match self.buffer.make_room(msg.size, pinned) {
            Ok(evicted) => evicted,
            Err(NoRoom::TooLarge) => {
                self.too_large.insert(msg.id);
                self.version += 1;
                return Receipt::RejectedTooLarge { first: true };
            }
            Err(NoRoom::Pinned) => return Receipt::RejectedNoSpace,
        };
        let custody_until = self
            .tracking
            .as_ref()
            .map(|t| now + t.params.custody_time());
        self.buffer.push(Entry {
            message: *msg,
            received_at: now,
            custody_until,
        });
        self.next_deadline = self
            .next_deadline
            .min(msg.expires_at())
            .min(custody_until.unwrap_or(f64::INFINITY));
        if let Some(t) = &mut self.tracking {
            t.add(msg.id, now);
            self.next_deadline = self.next_deadline.min(t.next_deadline());
        }
        if self.kind == RouterKind::FirstContact {
            self.seen.insert(msg.id);
        }
        self.version += 1;
        Receipt::Accepted { evicted }
    }

    /// A creator receives its own message.
    pub fn create_local(&mut self, msg: &Message, now: f64, pinned: Option<MessageId>) -> Receipt {
        self.on_receive(msg, now, pinned)
    }

    /// Drops expired messages and purges stale tracking entries.
    pub fn tick_expiry(&mut self, now: f64) -> Vec<Dropped> {
        if now + TIME_EPS < self.next_deadline {
            return Vec::new();
        }
        let t = now + TIME_EPS;
        let removed = self.buffer.remove_where(|e| {
            t >= e.message.expires_at() || e.custody_until.is_some_and(|c| t >= c)
        });
        let mut changed = !removed.is_empty();
        let dropped = removed
            .into_iter()
            .map(|e| Dropped {
                message: e.message.id,
                reason: if t >= e.message.expires_at() {
                    DropReason::Ttl
                } else {
                    DropReason::Custody
                },
            })
            .collect();
        let mut next = f64::INFINITY;
        for e in self.buffer.entries() {
            next = next.min(e.message.expires_at());
            if let Some(c) = e.custody_until {
                next = next.min(c);
            }
        }
        if let Some(tr) = &mut self.tracking {
            changed |= tr.purge(now);
            next = next.min(tr.next_deadline());
        }
        self.next_deadline = next;
        if changed {
            self.version += 1;
        }
        dropped
    }

    /// Called on the sender after a transfer completed. First Contact hands
    /// its copy over; the other routers keep theirs.
    pub fn on_sent(&mut self, id: MessageId) {
        if self.kind == RouterKind::FirstContact && self.buffer.remove(id).is_some() {
            self.version += 1;
        }
    }

    /// Every `(message, receiver)` offer this node would make, in buffer
    /// receipt order then neighbor order. `neighbors` must be sorted by id.
    pub fn select_transfers(
        &self,
        me: NodeId,
        neighbors: &[(NodeId, &RouterState)],
        now: f64,
    ) -> Vec<(MessageId, NodeId)> {
        let mut out = Vec::new();
        for e in self.buffer.entries() {
            let m = &e.message;
            match self.kind {
                RouterKind::Epidemic | RouterKind::Wave => {
                    for (peer, state) in neighbors {
                        if state.wants(m.id, now) {
                            out.push((m.id, *peer));
                        }
                    }
                }
                RouterKind::DirectDelivery => {
                    for (peer, state) in neighbors {
                        if *peer == m.destination && state.wants(m.id, now) {
                            out.push((m.id, *peer));
                        }
                    }
                }
                RouterKind::FirstContact => {
                    if m.destination == me {
                        continue;
                    }
                    if let Some((peer, _)) = neighbors.iter().find(|(_, s)| s.wants(m.id, now)) {
                        out.push((m.id, *peer));
                    }
                }
            }
        }
        out
    }

    /// Buffer position of the first message `peer` wants, looking only at
    /// positions below `limit`.
    pub fn first_wanted(&self, peer: &RouterState, now: f64, limit: usize) -> Option<usize> {
        (0..self.buffer.len().min(limit)).find(|&pos| peer.wants(self.buffer.entry_at(pos).message.id, now))
    }

    /// The first element of [`Self::select_transfers`], computed without
    /// building the whole list.
    pub fn first_offer(
        &self,
        me: NodeId,
        neighbors: &[(NodeId, &RouterState)],
        now: f64,
    ) -> Option<(MessageId, NodeId)> {
        match self.kind {
            RouterKind::Epidemic | RouterKind::Wave => {
                let mut best: Option<(usize, NodeId)> = None;
                for (peer, state) in neighbors {
                    let limit = best.map_or(usize::MAX, |b| b.0);
                    if let Some(pos) = self.first_wanted(state, now, limit) {
                        best = Some((pos, *peer));
                    }
                }
                best.map(|(pos, peer)| (self.buffer.entry_at(pos).message.id, peer))
            }
            _ => self.select_transfers(me, neighbors, now).into_iter().next(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn msg(id: u32, created_at: f64) -> Message {
        Message::new(MessageId(id), NodeId(0), NodeId(1), created_at)
    }

    fn state(kind: RouterKind, capacity: u64) -> RouterState {
        RouterState::new(kind, capacity, WaveParams::default())
    }

    fn ids(s: &RouterState) -> Vec<u32> {
        s.buffer().ids().map(|m| m.0).collect()
    }

    #[test]
    fn router_names() {
        assert_eq!("wave".parse::<RouterKind>(), Ok(RouterKind::Wave));
        let err = "wav".parse::<RouterKind>().unwrap_err();
        assert_eq!(err.to_string(), "unknown router 'wav'");
        for k in [RouterKind::Epidemic, RouterKind::Wave, RouterKind::FirstContact, RouterKind::DirectDelivery] {
            assert_eq!(k.name().parse::<RouterKind>(), Ok(k));
        }
    }

    #[test]
    fn epidemic_wants_unbuffered_and_evicted() {
        let mut s = state(RouterKind::Epidemic, 2064);
        s.on_receive(&msg(1, 0.0), 0.0, None);
        assert!(!s.wants(MessageId(1), 1.0));
        let r = s.on_receive(&msg(2, 0.0), 1.0, None);
        assert_eq!(r, Receipt::Accepted { evicted: vec![MessageId(1)] });
        assert!(s.wants(MessageId(1), 2.0));
    }

    #[test]
    fn wave_refuses_within_immunity() {
        let mut s = state(RouterKind::Wave, 2064);
        s.create_local(&msg(1, 0.0), 0.0, None);
        s.on_receive(&msg(2, 0.0), 1.0, None);
        assert!(!s.buffer().contains(MessageId(1)));
        assert!(!s.wants(MessageId(1), 2.0));
        assert!(s.wants(MessageId(3), 2.0));
    }

    #[test]
    fn wave_tracking_expires() {
        let wave = WaveParams { immunity: 100.0, custody_fraction: 0.5 };
        let mut s = RouterState::new(RouterKind::Wave, 10 * 2064, wave);
        s.on_receive(&msg(1, 0.0), 0.0, None);
        assert_eq!(s.tick_expiry(49.9), vec![]);
        assert_eq!(
            s.tick_expiry(50.0),
            vec![Dropped { message: MessageId(1), reason: DropReason::Custody }]
        );
        assert!(!s.wants(MessageId(1), 99.9));
        let v = s.version();
        s.tick_expiry(100.0);
        assert!(s.version() > v);
        assert!(s.wants(MessageId(1), 100.0));
    }

    #[test]
    fn ttl_boundary_inclusive() {
        let mut s = state(RouterKind::Epidemic, 10_000);
        s.on_receive(&msg(1, 0.0), 0.0, None);
        assert!(s.tick_expiry(3599.9).is_empty());
        // 36000 ticks of 0.1 s do not land exactly on 3600
        let now = 36000.0 * 0.1;
        assert_eq!(s.tick_expiry(now), vec![Dropped { message: MessageId(1), reason: DropReason::Ttl }]);
        assert!(s.buffer().is_empty());
    }

    #[test]
    fn default_wave_custody_outlives_ttl() {
        let mut s = state(RouterKind::Wave, 10_000);
        s.on_receive(&msg(1, 0.0), 0.0, None);
        let e = s.buffer().get(MessageId(1)).unwrap();
        assert_eq!(e.custody_until, Some(4500.0));
        assert_eq!(s.tick_expiry(3600.0)[0].reason, DropReason::Ttl);
    }

    #[test]
    fn epidemic_never_drops_for_custody() {
        let mut s = state(RouterKind::Epidemic, 10_000);
        s.on_receive(&msg(1, 0.0).with_ttl(1e9), 0.0, None);
        assert!(s.tick_expiry(1e6).is_empty());
        assert_eq!(s.buffer().get(MessageId(1)).unwrap().custody_until, None);
    }

    #[test]
    fn drop_oldest_on_receive() {
        let mut s = state(RouterKind::Epidemic, 3 * 2064);
        for id in 1..=3 {
            s.on_receive(&msg(id, 0.0), id as f64, None);
        }
        let r = s.on_receive(&msg(4, 0.0), 4.0, None);
        assert_eq!(r, Receipt::Accepted { evicted: vec![MessageId(1)] });
        assert_eq!(ids(&s), vec![2, 3, 4]);
    }

    #[test]
    fn too_large_rejected_once() {
        let mut s = state(RouterKind::Epidemic, 500_000);
        let big = msg(1, 0.0).with_size(600_000);
        assert_eq!(s.on_receive(&big, 0.0, None), Receipt::RejectedTooLarge { first: true });
        assert_eq!(s.on_receive(&big, 1.0, None), Receipt::RejectedTooLarge { first: false });
        assert!(!s.wants(MessageId(1), 1.0));
        let mut e = state(RouterKind::Epidemic, 500_000);
        assert_eq!(e.on_receive(&msg(2, 0.0), 0.0, None), Receipt::Accepted { evicted: vec![] });
        assert_eq!(e.buffer().occupied(), 2064);
    }

    #[test]
    fn pinned_payload_blocks_receipt() {
        let mut s = state(RouterKind::Epidemic, 2064);
        s.on_receive(&msg(1, 0.0), 0.0, None);
        assert_eq!(s.on_receive(&msg(2, 0.0), 1.0, Some(MessageId(1))), Receipt::RejectedNoSpace);
        assert_eq!(ids(&s), vec![1]);
    }

    #[test]
    fn epidemic_exchange_is_mutual() {
        let mut a = state(RouterKind::Epidemic, 10_000);
        let mut b = state(RouterKind::Epidemic, 10_000);
        a.on_receive(&msg(1, 0.0), 0.0, None);
        b.on_receive(&msg(2, 0.0), 0.0, None);
        let offers_a = a.select_transfers(NodeId(0), &[(NodeId(1), &b)], 1.0);
        let offers_b = b.select_transfers(NodeId(1), &[(NodeId(0), &a)], 1.0);
        assert_eq!(offers_a, vec![(MessageId(1), NodeId(1))]);
        assert_eq!(offers_b, vec![(MessageId(2), NodeId(0))]);
        b.on_receive(&msg(1, 0.0), 1.0, None);
        a.on_receive(&msg(2, 0.0), 1.0, None);
        assert_eq!(ids(&a), vec![1, 2]);
        assert_eq!(ids(&b), vec![2, 1]);
        assert!(a.select_transfers(NodeId(0), &[(NodeId(1), &b)], 2.0).is_empty());
    }

    #[test]
    fn direct_delivery_waits_for_destination() {
        let mut a = state(RouterKind::DirectDelivery, 10_000);
        let b = state(RouterKind::DirectDelivery, 10_000);
        let c = state(RouterKind::DirectDelivery, 10_000);
        a.on_receive(&Message::new(MessageId(1), NodeId(0), NodeId(2), 0.0), 0.0, None);
        assert!(a.select_transfers(NodeId(0), &[(NodeId(1), &b)], 1.0).is_empty());
        assert_eq!(
            a.select_transfers(NodeId(0), &[(NodeId(1), &b), (NodeId(2), &c)], 1.0),
            vec![(MessageId(1), NodeId(2))]
        );
    }

    #[test]
    fn wave_offer_skips_tracked_peer() {
        let mut a = state(RouterKind::Wave, 10_000);
        let mut b = state(RouterKind::Wave, 2064);
        a.on_receive(&msg(1, 0.0), 0.0, None);
        b.on_receive(&msg(1, 0.0), 0.0, None);
        b.on_receive(&msg(2, 0.0), 1.0, None);
        assert!(!b.buffer().contains(MessageId(1)));
        assert!(a.select_transfers(NodeId(0), &[(NodeId(1), &b)], 2.0).is_empty());
    }

    #[test]
    fn first_contact_hands_over() {
        let mut a = state(RouterKind::FirstContact, 10_000);
        let b = state(RouterKind::FirstContact, 10_000);
        let c = state(RouterKind::FirstContact, 10_000);
        let m = Message::new(MessageId(1), NodeId(0), NodeId(9), 0.0);
        a.create_local(&m, 0.0, None);
        let offers = a.select_transfers(NodeId(0), &[(NodeId(1), &b), (NodeId(2), &c)], 1.0);
        assert_eq!(offers, vec![(MessageId(1), NodeId(1))]);
        a.on_sent(MessageId(1));
        assert!(a.buffer().is_empty());
        // a held it before, so it is never handed back
        assert!(!a.wants(MessageId(1), 2.0));
    }

    #[test]
    fn version_tracks_changes() {
        let mut s = state(RouterKind::Epidemic, 10_000);
        let v0 = s.version();
        s.on_receive(&msg(1, 0.0), 0.0, None);
        let v1 = s.version();
        assert!(v1 > v0);
        assert_eq!(s.on_receive(&msg(1, 0.0), 0.0, None), Receipt::Duplicate);
        assert!(s.tick_expiry(10.0).is_empty());
        assert_eq!(s.version(), v1);
    }

    fn arb_state(kind: RouterKind) -> impl Strategy<Value = RouterState> {
        (proptest::collection::vec(1u32..20, 0..12), 1u64..8).prop_map(move |(msgs, cap)| {
            let mut s = RouterState::new(kind, cap * 2064, WaveParams::default());
            for (t, id) in msgs.into_iter().enumerate() {
                let m = Message::new(MessageId(id), NodeId(0), NodeId(1), 0.0).with_ttl(1e9);
                s.on_receive(&m, t as f64, None);
            }
            s
        })
    }

    fn arb_kind() -> impl Strategy<Value = RouterKind> {
        prop_oneof![
            Just(RouterKind::Epidemic),
            Just(RouterKind::Wave),
            Just(RouterKind::FirstContact),
            Just(RouterKind::DirectDelivery),
        ]
    }

    proptest! {
        #[test]
        fn first_offer_matches_full_selection(
            (me, peers) in arb_kind().prop_flat_map(|k| (arb_state(k), proptest::collection::vec(arb_state(k), 0..5)))
        ) {
            let neighbors: Vec<(NodeId, &RouterState)> =
                peers.iter().enumerate().map(|(i, s)| (NodeId(i as u32 + 1), s)).collect();
            let full = me.select_transfers(NodeId(0), &neighbors, 100.0);
            prop_assert_eq!(me.first_offer(NodeId(0), &neighbors, 100.0), full.first().copied());
        }

        #[test]
        fn buffer_never_overflows(ops in proptest::collection::vec((1u32..30, 1u64..5000), 0..60), cap in 1u64..20_000) {
            let mut s = RouterState::new(RouterKind::Epidemic, cap, WaveParams::default());
            for (t, (id, size)) in ops.into_iter().enumerate() {
                let m = Message::new(MessageId(id), NodeId(0), NodeId(1), 0.0).with_size(size);
                let before: Vec<MessageId> = s.buffer().ids().collect();
                if let Receipt::Accepted { evicted } = s.on_receive(&m, t as f64, None) {
                    // evictions come off the front in receipt order
                    prop_assert_eq!(&before[..evicted.len()], &evicted[..]);
                }
                prop_assert!(s.buffer().occupied() <= s.buffer().capacity());
                let sum: u64 = s.buffer().entries().map(|e| e.message.size).sum();
                prop_assert_eq!(sum, s.buffer().occupied());
            }
        }
    }
}
