//! Shortest-path map-based movement.
//!
//! A node waits at a vertex, then picks a random reachable vertex of its
//! movement graph, walks the shortest path there at a speed drawn once per
//! leg, and waits again on arrival.

use rand::Rng;
use thiserror::Error;

use crate::map::{shortest_path, GeoPoint, RoadGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobilityError {
    #[error("invalid mobility parameters: {0}")]
    InvalidParams(String),
    #[error("movement graph has no vertices")]
    EmptyGraph,
}

/// Pedestrian movement parameters; speeds in m/s, waits in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    pub speed_min: f64,
    pub speed_max: f64,
    pub wait_min: f64,
    pub wait_max: f64,
}

impl Default for MobilityParams {
    fn default() -> Self {
        Self {
            speed_min: 1.31,
            speed_max: 1.72,
            wait_min: 0.0,
            wait_max: 120.0,
        }
    }
}

impl MobilityParams {
    pub fn validate(&self) -> Result<(), MobilityError> {
        let all_finite = [self.speed_min, self.speed_max, self.wait_min, self.wait_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(MobilityError::InvalidParams("values must be finite".into()));
        }
        if !(0.0 < self.speed_min && self.speed_min <= self.speed_max) {
            return Err(MobilityError::InvalidParams(format!(
                "need 0 < speed_min <= speed_max, got {} and {}",
                self.speed_min, self.speed_max
            )));
        }
        if !(0.0 <= self.wait_min && self.wait_min <= self.wait_max) {
            return Err(MobilityError::InvalidParams(format!(
                "need 0 <= wait_min <= wait_max, got {} and {}",
                self.wait_min, self.wait_max
            )));
        }
        Ok(())
    }

    fn draw_wait<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.gen_range(self.wait_min..=self.wait_max)
    }

    fn draw_speed<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.gen_range(self.speed_min..=self.speed_max)
    }
}

/// A road graph prepared for destination sampling: vertices grouped by
/// connected component.
#[derive(Debug, Clone)]
pub struct MovementGraph {
    graph: RoadGraph,
    members: Vec<Vec<usize>>,
    /// Position of each vertex inside its component's member list.
    slot: Vec<usize>,
}

impl MovementGraph {
    pub fn new(graph: RoadGraph) -> Result<Self, MobilityError> {
        if graph.vertex_count() == 0 {
            return Err(MobilityError::EmptyGraph);
        }
        let mut members = vec![Vec::new(); graph.component_count()];
        let slot = (0..graph.vertex_count())
            .map(|v| {
                let c = graph.component_of(v);
                members[c].push(v);
                members[c].len() - 1
            })
            .collect();
        Ok(Self { graph, members, slot })
    }

    pub fn graph(&self) -> &RoadGraph {
        &self.graph
    }

    /// Uniform draw among vertices reachable from `from`, excluding `from`.
    pub fn random_destination<R: Rng + ?Sized>(&self, from: usize, rng: &mut R) -> Option<usize> {
        let group = &self.members[self.graph.component_of(from)];
        if group.len() < 2 {
            return None;
        }
        let mut k = rng.gen_range(0..group.len() - 1);
        if k >= self.slot[from] {
            k += 1;
        }
        Some(group[k])
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Phase {
    Waiting {
        remaining: f64,
    },
    Moving {
        path: Vec<usize>,
        /// Index into `path` of the vertex the current edge starts at.
        leg: usize,
        /// Distance already covered along the current edge.
        offset: f64,
        speed: f64,
    },
}

/// Position and plan of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct MovementState {
    position: GeoPoint,
    /// Vertex the node last reached.
    vertex: usize,
    phase: Phase,
    last_speed: f64,
}

impl MovementState {
    pub fn position(&self) -> GeoPoint {
        self.position
    }

    pub fn is_waiting(&self) -> bool {
        matches!(self.phase, Phase::Waiting { .. })
    }

    /// Remaining wait, or `None` while moving.
    pub fn remaining_wait(&self) -> Option<f64> {
        match self.phase {
            Phase::Waiting { remaining } => Some(remaining),
            Phase::Moving { .. } => None,
        }
    }

    /// Speed of the current leg, or of the most recent one while waiting.
    pub fn leg_speed(&self) -> f64 {
        match self.phase {
            Phase::Moving { speed, .. } => speed,
            Phase::Waiting { .. } => self.last_speed,
        }
    }

    /// Vertex the node currently stands on or last left.
    pub fn vertex(&self) -> usize {
        self.vertex
    }

    /// Remaining vertices to visit, current edge end first. Empty while waiting.
    pub fn remaining_path(&self) -> &[usize] {
        match &self.phase {
            Phase::Moving { path, leg, .. } => &path[leg + 1..],
            Phase::Waiting { .. } => &[],
        }
    }

    /// Final vertex of the current leg.
    pub fn destination(&self) -> Option<usize> {
        match &self.phase {
            Phase::Moving { path, .. } => path.last().copied(),
            Phase::Waiting { .. } => None,
        }
    }
}

/// Places `n` nodes on uniformly random vertices, each initially waiting.
pub fn init_positions<R: Rng + ?Sized>(
    graph: &MovementGraph,
    params: &MobilityParams,
    n: usize,
    rng: &mut R,
) -> Vec<MovementState> {
    (0..n).map(|_| init_state(graph, params, rng)).collect()
}

pub fn init_state<R: Rng + ?Sized>(
    graph: &MovementGraph,
    params: &MobilityParams,
    rng: &mut R,
) -> MovementState {
    let v = rng.gen_range(0..graph.graph.vertex_count());
    MovementState {
        position: graph.graph.vertex(v),
        vertex: v,
        phase: Phase::Waiting {
            remaining: params.draw_wait(rng),
        },
        last_speed: params.speed_min,
    }
}

/// Starts a new leg from the node's current vertex. Returns `false` (and
/// schedules a fresh wait) when no other vertex is reachable.
pub fn choose_destination<R: Rng + ?Sized>(
    state: &mut MovementState,
    graph: &MovementGraph,
    params: &MobilityParams,
    rng: &mut R,
) -> bool {
    let Some(dst) = graph.random_destination(state.vertex, rng) else {
        log::warn!("no reachable destination from vertex {}; waiting again", state.vertex);
        state.phase = Phase::Waiting {
            remaining: params.draw_wait(rng),
        };
        return false;
    };
    let path = shortest_path(&graph.graph, state.vertex, dst)
        .expect("destination drawn from the same component");
    let speed = params.draw_speed(rng);
    state.last_speed = speed;
    state.phase = Phase::Moving {
        path: path.vertices,
        leg: 0,
        offset: 0.0,
        speed,
    };
    true
}

/// Advances one node by `dt` seconds. Time left over after an arrival is
/// spent waiting, so no distance is lost or invented.
pub fn advance<R: Rng + ?Sized>(
    state: &mut MovementState,
    dt: f64,
    graph: &MovementGraph,
    params: &MobilityParams,
    rng: &mut R,
) {
    let mut time_left = dt;
    // Bounded so zero waits on an isolated vertex cannot spin forever.
    let mut guard = 0;
    while time_left > 0.0 && guard < 1024 {
        guard += 1;
        match &mut state.phase {
            Phase::Waiting { remaining } => {
                if *remaining > time_left {
                    *remaining -= time_left;
                    return;
                }
                time_left -= *remaining;
                if !choose_destination(state, graph, params, rng) && time_left > 0.0 {
                    if let Phase::Waiting { remaining } = &mut state.phase {
                        if *remaining == 0.0 {
                            return;
                        }
                    }
                }
            }
            Phase::Moving { path, leg, offset, speed } => {
                let mut budget = *speed * time_left;
                loop {
                    let from = path[*leg];
                    let to = path[*leg + 1];
                    let edge = graph
                        .graph
                        .edge_length(from, to)
                        .expect("path follows graph edges");
                    let left_on_edge = edge - *offset;
                    if budget < left_on_edge {
                        *offset += budget;
                        state.position = graph.graph.vertex(from).lerp(graph.graph.vertex(to), *offset / edge);
                        return;
                    }
                    budget -= left_on_edge;
                    *leg += 1;
                    *offset = 0.0;
                    state.vertex = to;
                    state.position = graph.graph.vertex(to);
                    if *leg + 1 == path.len() {
                        time_left = budget / *speed;
                        state.phase = Phase::Waiting {
                            remaining: params.draw_wait(rng),
                        };
                        break;
                    }
                }
            }
        }
    }
}
