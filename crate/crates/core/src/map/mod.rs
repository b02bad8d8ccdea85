//! Road maps: WKT ingestion, the geometric road graph, shortest paths and
//! movement regions.
//!
//! Coordinates are planar meters. WKT input is assumed to be projected
//! already; no reprojection happens here.

mod graph;
mod region;
mod wkt;

use std::fmt;

use thiserror::Error;

pub use graph::{build_graph, generate_grid, restrict, shortest_path, Edge, Path, RoadGraph};
pub use region::Region;
pub use wkt::{parse_wkt, ParsedWkt, WktWarning, WktWarningKind};

/// Default distance under which two map points are merged into one vertex.
pub const DEFAULT_SNAP_TOLERANCE: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no usable map geometry")]
    NoGeometry,
    #[error("region contains no map vertices")]
    EmptyRegion,
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid snap tolerance {0}")]
    InvalidSnapTolerance(f64),
}

/// A planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeoPoint {
    pub x: f64,
    pub y: f64,
}

impl GeoPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: GeoPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(self, other: GeoPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Point at fraction `t` of the way from `self` to `other`.
    pub fn lerp(self, other: GeoPoint, t: f64) -> GeoPoint {
        GeoPoint::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.x, self.y)
    }
}

/// An ordered run of at least two points with no consecutive duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<GeoPoint>,
}

impl Polyline {
    /// Builds a polyline, collapsing consecutive duplicate points.
    /// Returns `None` if fewer than two distinct points remain.
    pub fn new(points: impl IntoIterator<Item = GeoPoint>) -> Option<Self> {
        let mut out: Vec<GeoPoint> = Vec::new();
        for p in points {
            if !p.is_finite() {
                return None;
            }
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        (out.len() >= 2).then_some(Self { points: out })
    }

    pub fn points(&self) -> &[GeoPoint] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].distance(w[1]))
            .sum()
    }

    /// `LINESTRING (x y, ...)` with shortest round-trip float formatting.
    pub fn to_wkt(&self) -> String {
        let coords: Vec<String> = self.points.iter().map(ToString::to_string).collect();
        format!("LINESTRING ({})", coords.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyline_collapses_duplicates() {
        let pl = Polyline::new([
            GeoPoint::new(0.0, 0.0),
            GeoPoint::new(0.0, 0.0),
            GeoPoint::new(3.0, 4.0),
        ])
        .unwrap();
        assert_eq!(pl.points().len(), 2);
        assert_eq!(pl.length(), 5.0);
        assert!(Polyline::new([GeoPoint::new(1.0, 1.0), GeoPoint::new(1.0, 1.0)]).is_none());
        assert!(Polyline::new([GeoPoint::new(f64::NAN, 1.0), GeoPoint::new(1.0, 1.0)]).is_none());
    }

    #[test]
    fn wkt_serialization() {
        let pl = Polyline::new([GeoPoint::new(0.0, 0.5), GeoPoint::new(-1.25, 3.0)]).unwrap();
        assert_eq!(pl.to_wkt(), "LINESTRING (0 0.5, -1.25 3)");
    }
}
