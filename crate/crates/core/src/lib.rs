//! dtnsim - a deterministic simulator and analysis toolkit for delay-tolerant
//! mobile ad hoc networks.
//!
//! Nodes walk shortest paths over a road graph at pedestrian speeds, exchange
//! messages over a short-range radio when they come into contact, and store
//! what they carry in bounded drop-oldest buffers. Four routers are provided:
//! Epidemic, Wave (Epidemic plus a tracking list that refuses re-receipt),
//! First Contact and Direct Delivery.
//!
//! The main metric is *saturation*: the share of all nodes that have received
//! a given message at least once, and how long a message takes to reach every
//! node.
//!
//! # Layout
//!
//! - [`map`]: WKT ingestion, road graph construction, shortest paths, regions.
//! - [`mobility`]: shortest-path map-based movement.
//! - [`contacts`]: neighbor detection and bandwidth-limited transfers.
//! - [`routing`]: buffers, messages and the four routers.
//! - [`traffic`]: message creation schedules.
//! - [`engine`]: configuration, the fixed-timestep loop, event logs, batches.
//! - [`analysis`]: saturation series, EMA, occupancy and summary tables.
//!
//! # Tick order
//!
//! Every tick runs mobility, contact detection, expiry, message creation and
//! transfers in that order; all records of a tick carry the tick end time.

pub mod analysis;
pub mod contacts;
pub mod engine;
pub mod map;
pub mod mobility;
pub mod routing;
pub mod traffic;

mod ids;

pub use ids::{MessageId, NodeId};

pub use analysis::{ema, saturation, time_to_full_saturation, SaturationSeries};
pub use engine::{
    load_config, run, run_batch, EventKind, EventRecord, RunOutput, ScenarioConfig, Simulation,
};
pub use map::{build_graph, generate_grid, parse_wkt, shortest_path, GeoPoint, Region, RoadGraph};
pub use routing::{Message, RouterKind};
