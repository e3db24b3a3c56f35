//! Line-oriented `.psc` geometry files.
//!
//! ```text
//! # comment
//! v x y z
//! e i j curveId
//! t i j k patchId
//! ```
//! Indices are 0-based into the `v` records.

use std::fmt::Write as _;
use std::path::Path;

use super::{ComplexError, PiecewiseComplex, Segment, Triangle};
use crate::geometry::Point3;

fn parse_err(line: usize, msg: impl Into<String>) -> ComplexError {
    ComplexError::Parse { line, msg: msg.into() }
}

fn fields<T: std::str::FromStr, const N: usize>(
    parts: &[&str],
    line: usize,
    what: &str,
) -> Result<[T; N], ComplexError> {
    if parts.len() != N {
        return Err(parse_err(line, format!("{what} record expects {N} fields, found {}", parts.len())));
    }
    let mut out = Vec::with_capacity(N);
    for p in parts {
        out.push(
            p.parse::<T>()
                .map_err(|_| parse_err(line, format!("cannot parse '{p}' in {what} record")))?,
        );
    }
    out.try_into().map_err(|_| parse_err(line, "field count"))
}

pub fn parse_complex(text: &str) -> Result<PiecewiseComplex, ComplexError> {
    let mut vertices = Vec::new();
    let mut segments = Vec::new();
    let mut triangles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut it = body.split_whitespace();
        let tag = it.next().unwrap_or_default();
        let rest: Vec<&str> = it.collect();
        match tag {
            "v" => {
                let [x, y, z] = fields::<f64, 3>(&rest, line, "vertex")?;
                let p = Point3::new(x, y, z);
                if !p.is_finite() {
                    return Err(parse_err(line, "non-finite vertex coordinate"));
                }
                vertices.push(p);
            }
            "e" => {
                let [a, b] = fields::<usize, 2>(&rest[..rest.len().min(2)], line, "edge")?;
                if rest.len() != 3 {
                    return Err(parse_err(line, "edge record expects 3 fields"));
                }
                let curve = rest[2]
                    .parse::<u32>()
                    .map_err(|_| parse_err(line, format!("cannot parse curve id '{}'", rest[2])))?;
                segments.push(Segment { v: [a, b], curve });
            }
            "t" => {
                if rest.len() != 4 {
                    return Err(parse_err(line, "triangle record expects 4 fields"));
                }
                let [a, b, c] = fields::<usize, 3>(&rest[..3], line, "triangle")?;
                let patch = rest[3]
                    .parse::<u32>()
                    .map_err(|_| parse_err(line, format!("cannot parse patch id '{}'", rest[3])))?;
                triangles.push(Triangle { v: [a, b, c], patch });
            }
            other => return Err(parse_err(line, format!("unknown record type '{other}'"))),
        }
    }
    PiecewiseComplex::new(vertices, segments, triangles)
}

pub fn load_complex(path: &Path) -> Result<PiecewiseComplex, ComplexError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ComplexError::Io { path: path.display().to_string(), source })?;
    parse_complex(&text)
}

/// Serialises a complex back to `.psc` text (round-trip exact for `f64`).
pub fn write_complex(c: &PiecewiseComplex, header: &str) -> String {
    let mut s = String::new();
    for l in header.lines() {
        let _ = writeln!(s, "# {l}");
    }
    for p in c.vertices() {
        let _ = writeln!(s, "v {:?} {:?} {:?}", p.x, p.y, p.z);
    }
    for e in c.segments() {
        let _ = writeln!(s, "e {} {} {}", e.v[0], e.v[1], e.curve);
    }
    for t in c.triangles() {
        let _ = writeln!(s, "t {} {} {} {}", t.v[0], t.v[1], t.v[2], t.patch);
    }
    s
}
