use super::wkt::parse_polygon;
use super::{GeoPoint, MapError};

/// Area a group of nodes is confined to. Boundary points count as inside.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    BBox { min: GeoPoint, max: GeoPoint },
    /// Closed simple polygon; the ring is stored without the repeated
    /// closing point.
    Polygon(Vec<GeoPoint>),
}

const BOUNDARY_EPS: f64 = 1e-9;

impl Region {
    pub fn bbox(min: GeoPoint, max: GeoPoint) -> Result<Self, MapError> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(MapError::InvalidRegion("non-finite bounding box".into()));
        }
        if min.x > max.x || min.y > max.y {
            return Err(MapError::InvalidRegion(format!(
                "bounding box min ({min}) exceeds max ({max})"
            )));
        }
        Ok(Region::BBox { min, max })
    }

    pub fn polygon(ring: Vec<GeoPoint>) -> Result<Self, MapError> {
        let mut ring = ring;
        if ring.len() >= 2 && ring.first() == ring.last() {
            ring.pop();
        }
        ring.dedup();
        if ring.len() < 3 {
            return Err(MapError::InvalidRegion(
                "polygon needs at least 3 distinct vertices".into(),
            ));
        }
        if ring.iter().any(|p| !p.is_finite()) {
            return Err(MapError::InvalidRegion("non-finite polygon vertex".into()));
        }
        let n = ring.len();
        for i in 0..n {
            for j in i + 1..n {
                // skip adjacent edges, which share an endpoint
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a1, a2) = (ring[i], ring[(i + 1) % n]);
                let (b1, b2) = (ring[j], ring[(j + 1) % n]);
                if segments_intersect(a1, a2, b1, b2) {
                    return Err(MapError::InvalidRegion("polygon self-intersects".into()));
                }
            }
        }
        Ok(Region::Polygon(ring))
    }

    /// Parses a region file: either `BBOX minx miny maxx maxy` or a single
    /// WKT POLYGON. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let mut found = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if found.is_some() {
                return Err(MapError::Parse {
                    line: idx + 1,
                    message: "region file must contain exactly one region".into(),
                });
            }
            found = Some(Self::parse_line(line, idx + 1)?);
        }
        found.ok_or_else(|| MapError::InvalidRegion("region file is empty".into()))
    }

    pub(crate) fn parse_line(line: &str, line_no: usize) -> Result<Self, MapError> {
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or_default();
        if head.eq_ignore_ascii_case("BBOX") {
            let nums: Result<Vec<f64>, _> = words.map(str::parse::<f64>).collect();
            let nums = nums.map_err(|e| MapError::Parse {
                line: line_no,
                message: format!("invalid BBOX number: {e}"),
            })?;
            if nums.len() != 4 {
                return Err(MapError::Parse {
                    line: line_no,
                    message: format!("BBOX needs 4 numbers, found {}", nums.len()),
                });
            }
            Region::bbox(GeoPoint::new(nums[0], nums[1]), GeoPoint::new(nums[2], nums[3]))
        } else {
            Region::polygon(parse_polygon(line, line_no)?)
        }
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        match self {
            Region::BBox { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
            Region::Polygon(ring) => {
                let n = ring.len();
                let mut inside = false;
                for i in 0..n {
                    let a = ring[i];
                    let b = ring[(i + 1) % n];
                    if point_segment_distance(p, a, b) <= BOUNDARY_EPS {
                        return true;
                    }
                    if (a.y > p.y) != (b.y > p.y) {
                        let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                        if p.x < x_cross {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }
}

fn cross(o: GeoPoint, a: GeoPoint, b: GeoPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a1: GeoPoint, a2: GeoPoint, b1: GeoPoint, b2: GeoPoint) -> bool {
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a1, b1, b2))
        || (d2 == 0.0 && on_segment(a2, b1, b2))
        || (d3 == 0.0 && on_segment(b1, a1, a2))
        || (d4 == 0.0 && on_segment(b2, a1, a2))
}

fn point_segment_distance(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> f64 {
    let len_sq = a.distance_sq(b);
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / len_sq).clamp(0.0, 1.0);
    p.distance(a.lerp(b, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> GeoPoint {
        GeoPoint::new(x, y)
    }

    #[test]
    fn bbox_boundary_is_inside() {
        let r = Region::bbox(pt(0.0, 0.0), pt(2.0, 1.0)).unwrap();
        assert!(r.contains(pt(0.0, 0.0)));
        assert!(r.contains(pt(2.0, 1.0)));
        assert!(r.contains(pt(1.0, 0.5)));
        assert!(!r.contains(pt(2.0001, 0.5)));
        assert!(Region::bbox(pt(1.0, 0.0), pt(0.0, 1.0)).is_err());
    }

    #[test]
    fn polygon_containment() {
        // L-shaped region
        let r = Region::polygon(vec![
            pt(0.0, 0.0),
            pt(4.0, 0.0),
            pt(4.0, 1.0),
            pt(1.0, 1.0),
            pt(1.0, 4.0),
            pt(0.0, 4.0),
            pt(0.0, 0.0),
        ])
        .unwrap();
        assert!(r.contains(pt(0.5, 3.0)));
        assert!(r.contains(pt(3.0, 0.5)));
        assert!(!r.contains(pt(3.0, 3.0)));
        // on edges and vertices
        assert!(r.contains(pt(1.0, 2.0)));
        assert!(r.contains(pt(4.0, 1.0)));
        assert!(r.contains(pt(2.0, 0.0)));
    }

    #[test]
    fn self_intersecting_polygon_rejected() {
        let bowtie = vec![pt(0.0, 0.0), pt(2.0, 2.0), pt(2.0, 0.0), pt(0.0, 2.0)];
        assert!(Region::polygon(bowtie).is_err());
        assert!(Region::polygon(vec![pt(0.0, 0.0), pt(1.0, 0.0)]).is_err());
    }

    #[test]
    fn parse_region_files() {
        let r = Region::parse("# park\nBBOX 10 20 30 40\n").unwrap();
        assert_eq!(r, Region::BBox { min: pt(10.0, 20.0), max: pt(30.0, 40.0) });
        let r = Region::parse("POLYGON ((0 0, 3 0, 3 3, 0 3, 0 0))").unwrap();
        assert!(r.contains(pt(1.5, 1.5)));
        assert!(Region::parse("BBOX 1 2 3").is_err());
        assert!(Region::parse("").is_err());
        assert!(Region::parse("BBOX 0 0 1 1\nBBOX 0 0 2 2").is_err());
    }
}
