use crate::{MessageId, NodeId};

pub const DEFAULT_MESSAGE_SIZE: u64 = 2064;
pub const DEFAULT_TTL: f64 = 3600.0;

/// A message as created by its source. Every copy shares these fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub id: MessageId,
    pub source: NodeId,
    pub destination: NodeId,
    pub size: u64,
    pub created_at: f64,
    pub ttl: f64,
}

impl Message {
    pub fn new(id: MessageId, source: NodeId, destination: NodeId, created_at: f64) -> Self {
        Self {
            id,
            source,
            destination,
            size: DEFAULT_MESSAGE_SIZE,
            created_at,
            ttl: DEFAULT_TTL,
        }
    }

    pub fn with_size(mut self, size: u64) -> Self {
        self.size = size;
        self
    }

    pub fn with_ttl(mut self, ttl: f64) -> Self {
        self.ttl = ttl;
        self
    }

    pub fn expires_at(&self) -> f64 {
        self.created_at + self.ttl
    }

    pub fn is_valid(&self) -> bool {
        self.size > 0 && self.ttl > 0.0 && self.source != self.destination
    }
}
