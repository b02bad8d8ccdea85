use super::{GeoPoint, MapError, Polyline};

/// Result of parsing a WKT document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedWkt {
    pub polylines: Vec<Polyline>,
    pub warnings: Vec<WktWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WktWarning {
    pub line: usize,
    pub kind: WktWarningKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WktWarningKind {
    /// A well-formed geometry that is not a line (POINT, POLYGON, ...).
    SkippedGeometry(String),
    /// A line with fewer than two distinct points.
    DegeneratePolyline,
}

/// Parses one geometry per line. Blank lines and lines starting with `#` are
/// ignored. LINESTRING yields one polyline, MULTILINESTRING one per member;
/// everything else is skipped with a warning.
pub fn parse_wkt(text: &str) -> Result<ParsedWkt, MapError> {
    let mut out = ParsedWkt::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut p = Parser::new(line, line_no)?;
        let geom = p.geometry()?;
        p.expect_end()?;
        match geom {
            Geometry::Lines(lines) => {
                for pts in lines {
                    match Polyline::new(pts) {
                        Some(pl) => out.polylines.push(pl),
                        None => out.warnings.push(WktWarning {
                            line: line_no,
                            kind: WktWarningKind::DegeneratePolyline,
                        }),
                    }
                }
            }
            Geometry::Polygon(_) | Geometry::Other(_) => {
                let name = match geom {
                    Geometry::Polygon(_) => "POLYGON".to_string(),
                    Geometry::Other(n) => n,
                    Geometry::Lines(_) => unreachable!(),
                };
                out.warnings.push(WktWarning {
                    line: line_no,
                    kind: WktWarningKind::SkippedGeometry(name),
                });
            }
        }
    }
    Ok(out)
}

/// Parses a single `POLYGON ((...))` and returns its outer ring.
pub(crate) fn parse_polygon(text: &str, line_no: usize) -> Result<Vec<GeoPoint>, MapError> {
    let mut p = Parser::new(text.trim(), line_no)?;
    let geom = p.geometry()?;
    p.expect_end()?;
    match geom {
        Geometry::Polygon(mut rings) => {
            if rings.len() != 1 {
                return Err(MapError::InvalidRegion(
                    "polygon holes are not supported".into(),
                ));
            }
            Ok(rings.remove(0))
        }
        _ => Err(MapError::InvalidRegion("expected a POLYGON".into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Number(f64),
    Open,
    Close,
    Comma,
}

enum Geometry {
    Lines(Vec<Vec<GeoPoint>>),
    Polygon(Vec<Vec<GeoPoint>>),
    Other(String),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
}

fn tokenize(s: &str, line: usize) -> Result<Vec<Token>, MapError> {
    let mut tokens = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' => i += 1,
            b'(' => {
                tokens.push(Token::Open);
                i += 1;
            }
            b')' => {
                tokens.push(Token::Close);
                i += 1;
            }
            b',' => {
                tokens.push(Token::Comma);
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                tokens.push(Token::Word(s[start..i].to_ascii_uppercase()));
            }
            c if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => {
                let start = i;
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i];
                    let exp_sign = (d == b'-' || d == b'+')
                        && matches!(bytes[i - 1], b'e' | b'E');
                    if d.is_ascii_digit() || d == b'.' || d == b'e' || d == b'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let lit = &s[start..i];
                let v: f64 = lit.parse().map_err(|_| MapError::Parse {
                    line,
                    message: format!("invalid number '{lit}'"),
                })?;
                if !v.is_finite() {
                    return Err(MapError::Parse {
                        line,
                        message: format!("non-finite coordinate '{lit}'"),
                    });
                }
                tokens.push(Token::Number(v));
            }
            _ => {
                let ch = s[i..].chars().next().unwrap_or('?');
                return Err(MapError::Parse {
                    line,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        }
    }
    Ok(tokens)
}

impl Parser {
    fn new(s: &str, line: usize) -> Result<Self, MapError> {
        Ok(Self {
            tokens: tokenize(s, line)?,
            pos: 0,
            line,
        })
    }

    fn err(&self, message: impl Into<String>) -> MapError {
        MapError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn describe(t: Option<&Token>) -> String {
        match t {
            None => "end of line".into(),
            Some(Token::Word(w)) => format!("'{w}'"),
            Some(Token::Number(n)) => format!("number {n}"),
            Some(Token::Open) => "'('".into(),
            Some(Token::Close) => "')'".into(),
            Some(Token::Comma) => "','".into(),
        }
    }

    fn expect(&mut self, want: Token) -> Result<(), MapError> {
        let got = self.next();
        if got.as_ref() == Some(&want) {
            Ok(())
        } else {
            Err(self.err(format!(
                "expected {} but found {}",
                Self::describe(Some(&want)),
                Self::describe(got.as_ref())
            )))
        }
    }

    fn expect_end(&self) -> Result<(), MapError> {
        match self.peek() {
            None => Ok(()),
            t => Err(self.err(format!("trailing input at {}", Self::describe(t)))),
        }
    }

    fn is_empty_kw(&mut self) -> bool {
        if matches!(self.peek(), Some(Token::Word(w)) if w == "EMPTY") {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn geometry(&mut self) -> Result<Geometry, MapError> {
        let name = match self.next() {
            Some(Token::Word(w)) => w,
            t => {
                return Err(self.err(format!(
                    "expected geometry keyword but found {}",
                    Self::describe(t.as_ref())
                )))
            }
        };
        // dimension qualifier
        if matches!(self.peek(), Some(Token::Word(w)) if w == "Z" || w == "M" || w == "ZM") {
            self.pos += 1;
        }
        match name.as_str() {
            "LINESTRING" => {
                if self.is_empty_kw() {
                    return Ok(Geometry::Lines(vec![Vec::new()]));
                }
                Ok(Geometry::Lines(vec![self.coord_list()?]))
            }
            "MULTILINESTRING" => {
                if self.is_empty_kw() {
                    return Ok(Geometry::Lines(Vec::new()));
                }
                Ok(Geometry::Lines(self.ring_list()?))
            }
            "POLYGON" => {
                if self.is_empty_kw() {
                    return Ok(Geometry::Polygon(Vec::new()));
                }
                Ok(Geometry::Polygon(self.ring_list()?))
            }
            "POINT" | "MULTIPOINT" | "MULTIPOLYGON" | "GEOMETRYCOLLECTION" | "TRIANGLE"
            | "TIN" | "POLYHEDRALSURFACE" => {
                self.skip_balanced()?;
                Ok(Geometry::Other(name))
            }
            other => Err(self.err(format!("unknown geometry type '{other}'"))),
        }
    }

    fn coord(&mut self) -> Result<GeoPoint, MapError> {
        let mut vals = Vec::with_capacity(4);
        while let Some(Token::Number(v)) = self.peek() {
            vals.push(*v);
            self.pos += 1;
        }
        if !(2..=4).contains(&vals.len()) {
            return Err(self.err(format!(
                "coordinate needs 2 to 4 numbers, found {}",
                vals.len()
            )));
        }
        Ok(GeoPoint::new(vals[0], vals[1]))
    }

    fn coord_list(&mut self) -> Result<Vec<GeoPoint>, MapError> {
        self.expect(Token::Open)?;
        let mut pts = vec![self.coord()?];
        loop {
            match self.next() {
                Some(Token::Comma) => pts.push(self.coord()?),
                Some(Token::Close) => return Ok(pts),
                t => {
                    return Err(self.err(format!(
                        "expected ',' or ')' but found {}",
                        Self::describe(t.as_ref())
                    )))
                }
            }
        }
    }

    fn ring_list(&mut self) -> Result<Vec<Vec<GeoPoint>>, MapError> {
        self.expect(Token::Open)?;
        let mut rings = Vec::new();
        loop {
            if self.is_empty_kw() {
                rings.push(Vec::new());
            } else {
                rings.push(self.coord_list()?);
            }
            match self.next() {
                Some(Token::Comma) => continue,
                Some(Token::Close) => return Ok(rings),
                t => {
                    return Err(self.err(format!(
                        "expected ',' or ')' but found {}",
                        Self::describe(t.as_ref())
                    )))
                }
            }
        }
    }

    fn skip_balanced(&mut self) -> Result<(), MapError> {
        if self.is_empty_kw() {
            return Ok(());
        }
        self.expect(Token::Open)?;
        let mut depth = 1usize;
        while depth > 0 {
            match self.next() {
                Some(Token::Open) => depth += 1,
                Some(Token::Close) => depth -= 1,
                Some(_) => {}
                None => return Err(self.err("unbalanced parentheses")),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_linestring() {
        let p = parse_wkt("LINESTRING (0 0, 1 0)").unwrap();
        assert_eq!(p.polylines.len(), 1);
        assert_eq!(p.polylines[0].length(), 1.0);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn multilinestring_members() {
        let p = parse_wkt("MULTILINESTRING ((0 0, 0 1), (2 2, 3 2, 3 3))").unwrap();
        let lengths: Vec<f64> = p.polylines.iter().map(|l| l.length()).collect();
        assert_eq!(lengths, vec![1.0, 2.0]);
    }

    #[test]
    fn single_point_line_is_warning() {
        let p = parse_wkt("LINESTRING (0 0)").unwrap();
        assert!(p.polylines.is_empty());
        assert_eq!(
            p.warnings,
            vec![WktWarning {
                line: 1,
                kind: WktWarningKind::DegeneratePolyline
            }]
        );
    }

    #[test]
    fn comments_blank_lines_and_other_geometries() {
        let text = "# map export\n\nPOINT (1 2)\nlinestring z (0 0 5, 0 2 5)\nPOLYGON ((0 0, 1 0, 1 1, 0 0))\n";
        let p = parse_wkt(text).unwrap();
        assert_eq!(p.polylines.len(), 1);
        assert_eq!(p.polylines[0].length(), 2.0);
        assert_eq!(p.warnings.len(), 2);
        assert_eq!(p.warnings[0].line, 3);
        assert_eq!(
            p.warnings[1].kind,
            WktWarningKind::SkippedGeometry("POLYGON".into())
        );
    }

    #[test]
    fn malformed_input_names_line() {
        let err = parse_wkt("LINESTRING (0 0, 1 0)\nLINESTRING (0 0, 1)\n").unwrap_err();
        assert!(matches!(err, MapError::Parse { line: 2, .. }), "{err:?}");
        let err = parse_wkt("\n\nLINESTRING (0 0, 1 1").unwrap_err();
        assert!(matches!(err, MapError::Parse { line: 3, .. }));
        let err = parse_wkt("CIRCLE (0 0)").unwrap_err();
        assert!(err.to_string().contains("unknown geometry"));
        let err = parse_wkt("LINESTRING (0 0, 1 1) extra").unwrap_err();
        assert!(err.to_string().contains("trailing"));
    }

    #[test]
    fn scientific_notation() {
        let p = parse_wkt("LINESTRING (1e2 -2.5E-1, 1.5e+2 -0.25)").unwrap();
        let pts = p.polylines[0].points();
        assert_eq!(pts[0], GeoPoint::new(100.0, -0.25));
        assert_eq!(pts[1], GeoPoint::new(150.0, -0.25));
    }

    #[test]
    fn polygon_outer_ring() {
        let ring = parse_polygon("POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0))", 1).unwrap();
        assert_eq!(ring.len(), 5);
        let err = parse_polygon("POLYGON ((0 0, 4 0, 4 4, 0 0), (1 1, 2 1, 2 2, 1 1))", 1);
        assert!(err.is_err());
    }
}
