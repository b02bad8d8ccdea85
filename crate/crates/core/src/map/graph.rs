use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::{GeoPoint, MapError, Polyline, Region};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// Undirected geometric graph. Vertex identity is positional: points closer
/// than the snap tolerance used at construction share a vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadGraph {
    vertices: Vec<GeoPoint>,
    edges: Vec<Edge>,
    /// Per-vertex `(neighbor, edge length)` sorted by neighbor index.
    adjacency: Vec<Vec<(usize, f64)>>,
    component: Vec<usize>,
    component_count: usize,
}

/// A shortest path: vertex sequence from source to destination.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub length: f64,
}

impl RoadGraph {
    /// Assembles a graph from vertices and edges. Edge lengths are recomputed
    /// from vertex coordinates; self-loops are dropped.
    fn from_parts(vertices: Vec<GeoPoint>, raw_edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges = Vec::new();
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (a, b) in raw_edges {
            if a == b {
                continue;
            }
            let length = vertices[a].distance(vertices[b]);
            edges.push(Edge { a, b, length });
            adjacency[a].push((b, length));
            adjacency[b].push((a, length));
        }
        for adj in &mut adjacency {
            adj.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
        }
        let (component, component_count) = label_components(&adjacency);
        Self {
            vertices,
            edges,
            adjacency,
            component,
            component_count,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[GeoPoint] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> GeoPoint {
        self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Connected-component label of `v`; labels are assigned in order of the
    /// lowest vertex index of each component.
    pub fn component_of(&self, v: usize) -> usize {
        self.component[v]
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Axis-aligned bounds `(min, max)` of all vertices.
    pub fn bounds(&self) -> (GeoPoint, GeoPoint) {
        let mut min = GeoPoint::new(f64::INFINITY, f64::INFINITY);
        let mut max = GeoPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        (min, max)
    }

    /// Length of the shortest edge joining `a` and `b`, if adjacent.
    pub fn edge_length(&self, a: usize, b: usize) -> Option<f64> {
        let adj = &self.adjacency[a];
        let start = adj.partition_point(|&(n, _)| n < b);
        adj.get(start).filter(|&&(n, _)| n == b).map(|&(_, l)| l)
    }

    /// Serializes every edge as a two-point LINESTRING.
    pub fn to_wkt(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let pl = Polyline::new([self.vertices[e.a], self.vertices[e.b]])
                .expect("edges join distinct vertices");
            out.push_str(&pl.to_wkt());
            out.push('\n');
        }
        out
    }
}

fn label_components(adjacency: &[Vec<(usize, f64)>]) -> (Vec<usize>, usize) {
    let n = adjacency.len();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &(w, _) in &adjacency[v] {
                if label[w] == usize::MAX {
                    label[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Vertex lookup used while snapping points together.
struct Snapper {
    tolerance: f64,
    exact: HashMap<(u64, u64), usize>,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl Snapper {
    fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            exact: HashMap::new(),
            cells: HashMap::new(),
        }
    }

    fn key(p: GeoPoint) -> (u64, u64) {
        // +0.0 folds -0.0 into 0.0
        ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits())
    }

    fn cell(&self, p: GeoPoint) -> (i64, i64) {
        (
            (p.x / self.tolerance).floor() as i64,
            (p.y / self.tolerance).floor() as i64,
        )
    }

    fn find_or_insert(&mut self, p: GeoPoint, vertices: &mut Vec<GeoPoint>) -> usize {
        if self.tolerance == 0.0 {
            return *self.exact.entry(Self::key(p)).or_insert_with(|| {
                vertices.push(p);
                vertices.len() - 1
            });
        }
        let (cx, cy) = self.cell(p);
        let tol_sq = self.tolerance * self.tolerance;
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = self.cells.get(&(cx + dx, cy + dy)) {
                    for &v in list {
                        let d = vertices[v].distance_sq(p);
                        if d <= tol_sq && best.is_none_or(|(bd, bv)| d < bd || (d == bd && v < bv)) {
                            best = Some((d, v));
                        }
                    }
                }
            }
        }
        if let Some((_, v)) = best {
            return v;
        }
        vertices.push(p);
        let v = vertices.len() - 1;
        self.cells.entry((cx, cy)).or_default().push(v);
        v
    }
}

/// Builds a road graph: every polyline segment becomes an edge, and points
/// within `snap_tolerance` of an existing vertex reuse it (nearest wins,
/// ties to the lower index). Segments collapsed by snapping are dropped.
pub fn build_graph(polylines: &[Polyline], snap_tolerance: f64) -> Result<RoadGraph, MapError> {
    if !(snap_tolerance >= 0.0 && snap_tolerance.is_finite()) {
        return Err(MapError::InvalidSnapTolerance(snap_tolerance));
    }
    let mut snapper = Snapper::new(snap_tolerance);
    let mut vertices = Vec::new();
    let mut raw_edges = Vec::new();
    for pl in polylines {
        let ids: Vec<usize> = pl
            .points()
            .iter()
            .map(|&p| snapper.find_or_insert(p, &mut vertices))
            .collect();
        raw_edges.extend(ids.windows(2).map(|w| (w[0], w[1])));
    }
    let graph = RoadGraph::from_parts(vertices, raw_edges);
    if graph.edge_count() == 0 {
        return Err(MapError::NoGeometry);
    }
    Ok(graph)
}

/// A `rows` x `cols` lattice with `spacing` meters between neighbors.
/// Vertex `r * cols + c` sits at `(c * spacing, r * spacing)`.
pub fn generate_grid(rows: usize, cols: usize, spacing: f64) -> Result<RoadGraph, MapError> {
    if rows < 2 || cols < 2 {
        return Err(MapError::InvalidGrid(format!(
            "need at least 2x2 vertices, got {rows}x{cols}"
        )));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(MapError::InvalidGrid(format!("spacing {spacing} must be positive")));
    }
    let vertices = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| GeoPoint::new(c as f64 * spacing, r as f64 * spacing)))
        .collect();
    let horizontal = (0..rows).flat_map(|r| (0..cols - 1).map(move |c| (r * cols + c, r * cols + c + 1)));
    let vertical = (0..rows - 1).flat_map(|r| (0..cols).map(move |c| (r * cols + c, (r + 1) * cols + c)));
    Ok(RoadGraph::from_parts(vertices, horizontal.chain(vertical)))
}

/// Subgraph induced by the vertices inside `region` (boundary inclusive).
/// Vertex order is preserved.
pub fn restrict(graph: &RoadGraph, region: &Region) -> Result<RoadGraph, MapError> {
    let mut remap = vec![usize::MAX; graph.vertex_count()];
    let mut vertices = Vec::new();
    for (i, &p) in graph.vertices.iter().enumerate() {
        if region.contains(p) {
            remap[i] = vertices.len();
            vertices.push(p);
        }
    }
    if vertices.is_empty() {
        return Err(MapError::EmptyRegion);
    }
    let edges = graph
        .edges
        .iter()
        .filter(|e| remap[e.a] != usize::MAX && remap[e.b] != usize::MAX)
        .map(|e| (remap[e.a], remap[e.b]));
    Ok(RoadGraph::from_parts(vertices, edges))
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source`, settling vertices until `target` is settled or
/// the frontier exceeds `radius`.
fn dijkstra(graph: &RoadGraph, source: usize, target: Option<usize>, radius: f64) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.vertex_count()];
    let mut done = vec![false; graph.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry { dist: 0.0, vertex: source });
    while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
        if done[v] {
            continue;
        }
        if d > radius {
            break;
        }
        done[v] = true;
        if Some(v) == target {
            break;
        }
        for &(w, len) in graph.neighbors(v) {
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(HeapEntry { dist: nd, vertex: w });
            }
        }
    }
    for (d, settled) in dist.iter_mut().zip(&done) {
        if !settled {
            *d = f64::INFINITY;
        }
    }
    dist
}

/// Minimal-length path from `src` to `dst`, or `None` if unreachable or
/// either index is out of range. Among equal-length paths the one with the
/// lexicographically smallest vertex sequence is returned.
pub fn shortest_path(graph: &RoadGraph, src: usize, dst: usize) -> Option<Path> {
    let n = graph.vertex_count();
    if src >= n || dst >= n {
        return None;
    }
    if src == dst {
        return Some(Path {
            vertices: vec![src],
            length: 0.0,
        });
    }
    if graph.component_of(src) != graph.component_of(dst) {
        return None;
    }
    let from_src = dijkstra(graph, src, Some(dst), f64::INFINITY);
    let total = from_src[dst];
    if !total.is_finite() {
        return None;
    }
    let eps = 1e-9 * total.max(1.0);
    let to_dst = dijkstra(graph, dst, None, total + eps);

    // Walk forward from src, always taking the smallest-index neighbor that
    // still lies on some shortest path.
    let mut vertices = vec![src];
    let mut at = src;
    let mut travelled = 0.0;
    while at != dst {
        let next = graph
            .neighbors(at)
            .iter()
            .find(|&&(w, len)| {
                (travelled + len + to_dst[w] - total).abs() <= eps
                    && (travelled + len - from_src[w]).abs() <= eps
            })
            .copied();
        let (w, len) = next?;
        travelled += len;
        vertices.push(w);
        at = w;
    }
    Some(Path {
        vertices,
        length: total,
    })
}
