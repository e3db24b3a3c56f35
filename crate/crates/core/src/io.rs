//! Legacy ASCII VTK unstructured grids: line cells for restricted curve
//! edges, triangles for the surface and tets for the volume.

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::delaunay::{TetMesh, VertId};
use crate::geometry::Point3;
use crate::quality::{area_length, volume_length};
use crate::refine::{rho_2, rho_3};
use crate::restricted::RestrictedComplex;

pub const VTK_LINE: u8 = 3;
pub const VTK_TRIANGLE: u8 = 5;
pub const VTK_TETRA: u8 = 10;

#[derive(Debug, Error, PartialEq)]
pub enum VtkError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unexpected end of file while reading {0}")]
    Truncated(&'static str),
}

/// A parsed grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VtkMesh {
    pub title: String,
    pub points: Vec<Point3>,
    pub cells: Vec<Vec<usize>>,
    pub types: Vec<u8>,
    pub cell_data: BTreeMap<String, Vec<f64>>,
}

impl VtkMesh {
    pub fn count(&self, cell_type: u8) -> usize {
        self.types.iter().filter(|&&t| t == cell_type).count()
    }
}

struct Cell {
    kind: u8,
    verts: Vec<VertId>,
    feature: i64,
    rho: f64,
    shape: f64,
}

fn cells(m: &TetMesh, rc: &RestrictedComplex) -> Vec<Cell> {
    let mut out = Vec::new();
    for e in rc.edges().values() {
        out.push(Cell { kind: VTK_LINE, verts: e.edge.to_vec(), feature: e.curve as i64, rho: 0.0, shape: 1.0 });
    }
    for f in rc.tris().values() {
        let p = f.tri.map(|v| m.point(v));
        out.push(Cell {
            kind: VTK_TRIANGLE,
            verts: f.tri.to_vec(),
            feature: f.patch as i64,
            rho: rho_2(f, &p),
            shape: area_length(p[0], p[1], p[2]),
        });
    }
    for t in rc.tets().values() {
        // the triangulation stores tets right-handed, as VTK expects
        let verts = if m.tet_exists(t.tet) { m.tet_vertices(t.tet) } else { t.verts };
        let p = verts.map(|v| m.point(v));
        out.push(Cell {
            kind: VTK_TETRA,
            verts: verts.to_vec(),
            feature: -1,
            rho: rho_3(&p),
            shape: volume_length(p[0], p[1], p[2], p[3]),
        });
    }
    out
}

/// Serialises the restricted complex. Points are the live vertices in id
/// order; values use round-trip float formatting.
pub fn write_vtk(m: &TetMesh, rc: &RestrictedComplex, title: &str) -> String {
    let ids: Vec<VertId> = m.vertices().collect();
    let index: BTreeMap<VertId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let cells = cells(m, rc);
    let mut s = String::new();
    let title = title.lines().next().unwrap_or("");
    writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID").unwrap();
    writeln!(s, "POINTS {} double", ids.len()).unwrap();
    for &v in &ids {
        let p = m.point(v);
        writeln!(s, "{} {} {}", p.x, p.y, p.z).unwrap();
    }
    let size: usize = cells.iter().map(|c| c.verts.len() + 1).sum();
    writeln!(s, "CELLS {} {size}", cells.len()).unwrap();
    for c in &cells {
        write!(s, "{}", c.verts.len()).unwrap();
        for v in &c.verts {
            write!(s, " {}", index[v]).unwrap();
        }
        s.push('\n');
    }
    writeln!(s, "CELL_TYPES {}", cells.len()).unwrap();
    for c in &cells {
        writeln!(s, "{}", c.kind).unwrap();
    }
    writeln!(s, "CELL_DATA {}", cells.len()).unwrap();
    writeln!(s, "SCALARS feature_id int 1\nLOOKUP_TABLE default").unwrap();
    for c in &cells {
        writeln!(s, "{}", c.feature).unwrap();
    }
    writeln!(s, "SCALARS radius_edge double 1\nLOOKUP_TABLE default").unwrap();
    for c in &cells {
        writeln!(s, "{}", c.rho).unwrap();
    }
    writeln!(s, "SCALARS shape double 1\nLOOKUP_TABLE default").unwrap();
    for c in &cells {
        writeln!(s, "{}", c.shape).unwrap();
    }
    s
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &'static str) -> Result<&'a str, VtkError> {
        loop {
            let (i, l) = self.it.next().ok_or(VtkError::Truncated(what))?;
            self.line = i + 1;
            if !l.trim().is_empty() {
                return Ok(l.trim());
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> VtkError {
        VtkError::Syntax { line: self.line, msg: msg.into() }
    }

    fn nums<T: std::str::FromStr>(&self, l: &str) -> Result<Vec<T>, VtkError> {
        l.split_whitespace().map(|t| t.parse().map_err(|_| self.err(format!("bad number `{t}`")))).collect()
    }

    /// `KEYWORD <count> ...` header; returns the count and the rest.
    fn header(&mut self, key: &'static str) -> Result<(usize, Vec<&'a str>), VtkError> {
        let l = self.next(key)?;
        let mut t = l.split_whitespace();
        if t.next() != Some(key) {
            return Err(self.err(format!("expected {key}")));
        }
        let n = t.next().and_then(|n| n.parse().ok()).ok_or_else(|| self.err(format!("{key} needs a count")))?;
        Ok((n, t.collect()))
    }
}

/// Parses the subset of legacy VTK written by [`write_vtk`].
pub fn parse_vtk(text: &str) -> Result<VtkMesh, VtkError> {
    let mut r = Lines { it: text.lines().enumerate(), line: 0 };
    if !r.next("header")?.starts_with("# vtk DataFile") {
        return Err(r.err("missing `# vtk DataFile` header"));
    }
    let mut out = VtkMesh { title: r.next("title")?.to_string(), ..Default::default() };
    if r.next("format")? != "ASCII" {
        return Err(r.err("only ASCII files are supported"));
    }
    if r.next("dataset")? != "DATASET UNSTRUCTURED_GRID" {
        return Err(r.err("expected DATASET UNSTRUCTURED_GRID"));
    }
    let (np, _) = r.header("POINTS")?;
    let mut coords: Vec<f64> = Vec::with_capacity(3 * np);
    while coords.len() < 3 * np {
        let l = r.next("POINTS")?;
        coords.extend(r.nums::<f64>(l)?);
    }
    if coords.len() != 3 * np {
        return Err(r.err("point coordinates are not a multiple of three"));
    }
    out.points = coords.chunks(3).map(|c| Point3::new(c[0], c[1], c[2])).collect();
    let (nc, _) = r.header("CELLS")?;
    for _ in 0..nc {
        let l = r.next("CELLS")?;
        let v: Vec<usize> = r.nums(l)?;
        if v.is_empty() || v[0] + 1 != v.len() {
            return Err(r.err("cell size does not match its vertex list"));
        }
        if v[1..].iter().any(|&i| i >= np) {
            return Err(r.err("cell references a missing point"));
        }
        out.cells.push(v[1..].to_vec());
    }
    let (nt, _) = r.header("CELL_TYPES")?;
    if nt != nc {
        return Err(r.err("CELL_TYPES count differs from CELLS"));
    }
    for _ in 0..nt {
        let l = r.next("CELL_TYPES")?;
        out.types.push(l.parse().map_err(|_| r.err(format!("bad cell type `{l}`")))?);
    }
    let Ok(l) = r.next("CELL_DATA") else { return Ok(out) };
    if !l.starts_with("CELL_DATA") {
        return Err(r.err("expected CELL_DATA"));
    }
    while let Ok(l) = r.next("SCALARS") {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 3 || t[0] != "SCALARS" {
            return Err(r.err("expected SCALARS"));
        }
        let name = t[1].to_string();
        if r.next("LOOKUP_TABLE")? != "LOOKUP_TABLE default" {
            return Err(r.err("expected LOOKUP_TABLE default"));
        }
        let mut vals = Vec::with_capacity(nc);
        for _ in 0..nc {
            let l = r.next("SCALARS")?;
            vals.push(l.parse().map_err(|_| r.err(format!("bad value `{l}`")))?);
        }
        out.cell_data.insert(name, vals);
    }
    Ok(out)
}
