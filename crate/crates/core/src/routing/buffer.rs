use std::collections::VecDeque;

use super::Message;
use crate::MessageId;

/// Growable set of message ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdSet {
    words: Vec<u64>,
}

impl IdSet {
    pub fn contains(&self, id: MessageId) -> bool {
        let i = id.index();
        self.words.get(i / 64).is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    pub fn insert(&mut self, id: MessageId) {
        let i = id.index();
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, id: MessageId) {
        let i = id.index();
        if let Some(w) = self.words.get_mut(i / 64) {
            *w &= !(1 << (i % 64));
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub message: Message,
    pub received_at: f64,
    /// Custody deadline; only Wave sets one.
    pub custody_until: Option<f64>,
}

/// Byte-bounded message store kept in receipt order, oldest first.
#[derive(Debug, Clone)]
pub struct Buffer {
    capacity: u64,
    occupied: u64,
    entries: VecDeque<Entry>,
    present: IdSet,
}

/// Why room could not be made for an incoming message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoRoom {
    TooLarge,
    /// Only in-flight payloads stand in the way.
    Pinned,
}

impl Buffer {
    pub fn new(capacity: u64) -> Self {
        Self {
            capacity,
            occupied: 0,
            entries: VecDeque::new(),
            present: IdSet::default(),
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn occupied(&self) -> u64 {
        self.occupied
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: MessageId) -> bool {
        self.present.contains(id)
    }

    pub fn entries(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = MessageId> + '_ {
        self.entries.iter().map(|e| e.message.id)
    }

    pub fn get(&self, id: MessageId) -> Option<&Entry> {
        if !self.contains(id) {
            return None;
        }
        self.entries.iter().find(|e| e.message.id == id)
    }

    pub(crate) fn entry_at(&self, pos: usize) -> &Entry {
        &self.entries[pos]
    }

    /// Evicts oldest entries, skipping `pinned`, until `size` bytes are free.
    /// Nothing is evicted when it cannot succeed.
    pub fn make_room(&mut self, size: u64, pinned: Option<MessageId>) -> Result<Vec<MessageId>, NoRoom> {
        if size > self.capacity {
            return Err(NoRoom::TooLarge);
        }
        let free = self.capacity - self.occupied;
        if free >= size {
            return Ok(Vec::new());
        }
        let pinned_bytes: u64 = pinned
            .and_then(|id| self.get(id))
            .map_or(0, |e| e.message.size);
        if self.capacity - pinned_bytes < size {
            return Err(NoRoom::Pinned);
        }
        let mut evicted = Vec::new();
        let mut pos = 0;
        while self.capacity - self.occupied < size {
            if Some(self.entries[pos].message.id) == pinned {
                pos += 1;
                continue;
            }
            let e = self.entries.remove(pos).expect("enough evictable bytes");
            self.occupied -= e.message.size;
            self.present.remove(e.message.id);
            evicted.push(e.message.id);
        }
        Ok(evicted)
    }

    /// Appends an entry; the caller must have made room.
    pub fn push(&mut self, entry: Entry) {
        debug_assert!(!self.contains(entry.message.id));
        debug_assert!(self.occupied + entry.message.size <= self.capacity);
        self.occupied += entry.message.size;
        self.present.insert(entry.message.id);
        self.entries.push_back(entry);
    }

    pub fn remove(&mut self, id: MessageId) -> Option<Entry> {
        if !self.contains(id) {
            return None;
        }
        let pos = self.entries.iter().position(|e| e.message.id == id)?;
        let e = self.entries.remove(pos)?;
        self.occupied -= e.message.size;
        self.present.remove(id);
        Some(e)
    }

    /// Removes every entry matching `pred`, oldest first.
    pub fn remove_where(&mut self, mut pred: impl FnMut(&Entry) -> bool) -> Vec<Entry> {
        let mut removed = Vec::new();
        let mut kept = VecDeque::with_capacity(self.entries.len());
        for e in self.entries.drain(..) {
            if pred(&e) {
                removed.push(e);
            } else {
                kept.push_back(e);
            }
        }
        self.entries = kept;
        for e in &removed {
            self.occupied -= e.message.size;
            self.present.remove(e.message.id);
        }
        removed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::NodeId;

    fn entry(id: u32, size: u64) -> Entry {
        Entry {
            message: Message::new(MessageId(id), NodeId(0), NodeId(1), 0.0).with_size(size),
            received_at: 0.0,
            custody_until: None,
        }
    }

    #[test]
    fn idset_grows() {
        let mut s = IdSet::default();
        assert!(!s.contains(MessageId(500)));
        s.insert(MessageId(500));
        s.insert(MessageId(3));
        assert!(s.contains(MessageId(500)) && s.contains(MessageId(3)));
        s.remove(MessageId(500));
        assert!(!s.contains(MessageId(500)));
        s.remove(MessageId(100_000));
    }

    #[test]
    fn drop_oldest() {
        let mut b = Buffer::new(3 * 2064);
        for id in 1..=3 {
            assert_eq!(b.make_room(2064, None), Ok(vec![]));
            b.push(entry(id, 2064));
        }
        assert_eq!(b.make_room(2064, None), Ok(vec![MessageId(1)]));
        b.push(entry(4, 2064));
        assert_eq!(b.ids().collect::<Vec<_>>(), vec![MessageId(2), MessageId(3), MessageId(4)]);
        assert_eq!(b.occupied(), 3 * 2064);
    }

    #[test]
    fn pinned_entries_survive_eviction() {
        let mut b = Buffer::new(300);
        b.push(entry(1, 100));
        b.push(entry(2, 100));
        b.push(entry(3, 100));
        assert_eq!(b.make_room(150, Some(MessageId(1))), Ok(vec![MessageId(2), MessageId(3)]));
        assert!(b.contains(MessageId(1)));

        let mut b = Buffer::new(100);
        b.push(entry(1, 100));
        assert_eq!(b.make_room(100, Some(MessageId(1))), Err(NoRoom::Pinned));
        assert_eq!(b.make_room(101, None), Err(NoRoom::TooLarge));
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn remove_keeps_accounting() {
        let mut b = Buffer::new(1000);
        b.push(entry(1, 100));
        b.push(entry(2, 200));
        assert_eq!(b.remove(MessageId(1)).map(|e| e.message.size), Some(100));
        assert!(b.remove(MessageId(1)).is_none());
        assert_eq!(b.occupied(), 200);
        let gone = b.remove_where(|e| e.message.id == MessageId(2));
        assert_eq!(gone.len(), 1);
        assert!(b.is_empty() && b.occupied() == 0);
    }
}
