//! Discrete input geometry and the intersection queries the mesher relies on.
//!
//! The input is a piecewise smooth complex given as a polyline curve network
//! and a triangle soup of surface patches. Everything downstream only talks to
//! the geometry through the queries in [`query`], so the refinement code does
//! not care how the geometry is represented.

mod features;
mod psc;
mod query;
mod sampling;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::aabb_tree::AabbTree;
use crate::geometry::{Aabb, Point3};

pub use features::{SharpFeatureSet, AcuteApex, DEFAULT_CREASE_ANGLE, ACUTE_ANGLE_LIMIT};
pub use psc::{load_complex, parse_complex, write_complex};
pub use query::{PolygonHits, VolumeError};

pub type VertexId = usize;
pub type CurveId = u32;
pub type PatchId = u32;

/// Relative tolerance applied to the bounding-box diagonal.
pub const REL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub v: [VertexId; 2],
    pub curve: CurveId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub v: [VertexId; 3],
    pub patch: PatchId,
}

/// A validated curve network plus surface patches with spatial indices.
#[derive(Debug, Clone)]
pub struct PiecewiseComplex {
    vertices: Vec<Point3>,
    segments: Vec<Segment>,
    triangles: Vec<Triangle>,
    feature_vertices: BTreeSet<VertexId>,
    curve_degree: Vec<u32>,
    seg_tree: AabbTree,
    tri_tree: AabbTree,
    bbox: Aabb,
    tol: f64,
    closed: bool,
}

pub(crate) fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

impl PiecewiseComplex {
    /// Validates the records and builds the spatial indices.
    pub fn new(
        vertices: Vec<Point3>,
        segments: Vec<Segment>,
        triangles: Vec<Triangle>,
    ) -> Result<PiecewiseComplex, ComplexError> {
        let nv = vertices.len();
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(ComplexError::Invalid(format!("vertex {i} has non-finite coordinates")));
        }
        let mut seen = BTreeSet::new();
        let mut per_curve: BTreeMap<(CurveId, VertexId), u32> = BTreeMap::new();
        let mut curve_degree = vec![0u32; nv];
        for (k, s) in segments.iter().enumerate() {
            for &v in &s.v {
                if v >= nv {
                    return Err(ComplexError::Invalid(format!(
                        "segment {k} references vertex {v} but only {nv} vertices exist"
                    )));
                }
            }
            if s.v[0] == s.v[1] {
                return Err(ComplexError::Invalid(format!("segment {k} is degenerate")));
            }
            if !seen.insert(edge_key(s.v[0], s.v[1])) {
                return Err(ComplexError::Invalid(format!(
                    "duplicate segment {k} ({}, {})",
                    s.v[0], s.v[1]
                )));
            }
            for &v in &s.v {
                curve_degree[v] += 1;
                let d = per_curve.entry((s.curve, v)).or_insert(0);
                *d += 1;
                if *d > 2 {
                    return Err(ComplexError::Invalid(format!(
                        "curve {} branches at vertex {v}; curves must be simple polylines",
                        s.curve
                    )));
                }
            }
        }

        let mut edge_use: BTreeMap<([usize; 2], PatchId), u32> = BTreeMap::new();
        let mut edge_total: BTreeMap<[usize; 2], u32> = BTreeMap::new();
        for (k, t) in triangles.iter().enumerate() {
            for &v in &t.v {
                if v >= nv {
                    return Err(ComplexError::Invalid(format!(
                        "triangle {k} references vertex {v} but only {nv} vertices exist"
                    )));
                }
            }
            if t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2] {
                return Err(ComplexError::Invalid(format!("triangle {k} repeats a vertex")));
            }
            for i in 0..3 {
                let e = edge_key(t.v[i], t.v[(i + 1) % 3]);
                *edge_use.entry((e, t.patch)).or_insert(0) += 1;
                *edge_total.entry(e).or_insert(0) += 1;
            }
        }
        for (&(e, patch), &n) in &edge_use {
            if n > 2 && !seen.contains(&e) {
                return Err(ComplexError::Invalid(format!(
                    "edge ({}, {}) is shared by {n} triangles of patch {patch}",
                    e[0], e[1]
                )));
            }
        }
        let closed = !triangles.is_empty() && edge_total.values().all(|&n| n % 2 == 0);

        let mut feature_vertices = BTreeSet::new();
        for (&(_, v), &d) in &per_curve {
            if d == 1 {
                feature_vertices.insert(v);
            }
        }
        for (v, &d) in curve_degree.iter().enumerate() {
            if d != 0 && d != 2 {
                feature_vertices.insert(v);
            }
        }

        let used: BTreeSet<usize> = segments
            .iter()
            .flat_map(|s| s.v)
            .chain(triangles.iter().flat_map(|t| t.v))
            .collect();
        let bbox = if used.is_empty() {
            Aabb::from_points(vertices.iter().copied())
        } else {
            Aabb::from_points(used.iter().map(|&i| vertices[i]))
        };
        let tol = REL_TOL * bbox.diagonal().max(f64::MIN_POSITIVE);
        let seg_boxes: Vec<Aabb> = segments
            .iter()
            .map(|s| Aabb::from_points(s.v.iter().map(|&i| vertices[i])))
            .collect();
        let tri_boxes: Vec<Aabb> = triangles
            .iter()
            .map(|t| Aabb::from_points(t.v.iter().map(|&i| vertices[i])))
            .collect();
        Ok(PiecewiseComplex {
            seg_tree: AabbTree::build(&seg_boxes),
            tri_tree: AabbTree::build(&tri_boxes),
            vertices,
            segments,
            triangles,
            feature_vertices,
            curve_degree,
            bbox,
            tol,
            closed,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> Point3 {
        self.vertices[v]
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    /// Curve endpoints and junctions whose curve degree is not two.
    pub fn feature_vertices(&self) -> &BTreeSet<VertexId> {
        &self.feature_vertices
    }

    /// Number of curve segments incident to an input vertex.
    pub fn curve_degree(&self, v: VertexId) -> u32 {
        self.curve_degree[v]
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    /// Absolute geometric tolerance (`1e-12` of the bounding-box diagonal).
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Whether the surface triangles enclose a volume (every edge has even use).
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn has_curves(&self) -> bool {
        !self.segments.is_empty()
    }

    pub fn has_surface(&self) -> bool {
        !self.triangles.is_empty()
    }

    pub fn segment_points(&self, s: usize) -> (Point3, Point3) {
        let seg = &self.segments[s];
        (self.vertices[seg.v[0]], self.vertices[seg.v[1]])
    }

    pub fn triangle_points(&self, t: usize) -> [Point3; 3] {
        let tri = &self.triangles[t];
        [self.vertices[tri.v[0]], self.vertices[tri.v[1]], self.vertices[tri.v[2]]]
    }

    /// Vertices touched by at least one curve segment.
    pub fn curve_vertices(&self) -> BTreeSet<VertexId> {
        self.segments.iter().flat_map(|s| s.v).collect()
    }

    /// Vertices touched by at least one surface triangle.
    pub fn surface_vertices(&self) -> BTreeSet<VertexId> {
        self.triangles.iter().flat_map(|t| t.v).collect()
    }

    /// Distance from `p` to the nearest surface triangle.
    pub fn distance_to_surface(&self, p: Point3) -> f64 {
        self.triangles
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let [a, b, c] = self.triangle_points(i);
                crate::geometry::closest_on_triangle(p, a, b, c).dist(p)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the nearest curve segment.
    pub fn distance_to_curves(&self, p: Point3) -> f64 {
        (0..self.segments.len())
            .map(|i| {
                let (a, b) = self.segment_points(i);
                crate::geometry::closest_on_segment(p, a, b).dist(p)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn seg_tree(&self) -> &AabbTree {
        &self.seg_tree
    }

    pub(crate) fn tri_tree(&self) -> &AabbTree {
        &self.tri_tree
    }
}
