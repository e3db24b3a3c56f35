use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use super::{edge_key, ComplexError, CurveId, PiecewiseComplex, Segment, VertexId};
use crate::geometry::tri_normal;

/// Default dihedral deviation above which a surface edge is a crease.
pub const DEFAULT_CREASE_ANGLE: f64 = PI / 6.0;
/// Curve-curve angles at or below this need collar protection.
pub const ACUTE_ANGLE_LIMIT: f64 = PI / 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AcuteApex {
    pub vertex: VertexId,
    /// The two feature edges meeting at `vertex`, as sorted vertex pairs.
    pub edges: [[VertexId; 2]; 2],
    /// Angle between the edges, radians.
    pub angle: f64,
}

impl AcuteApex {
    /// The far endpoints of the two edges.
    pub fn wing_targets(&self) -> [VertexId; 2] {
        let other = |e: [VertexId; 2]| if e[0] == self.vertex { e[1] } else { e[0] };
        [other(self.edges[0]), other(self.edges[1])]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SharpFeatureSet {
    pub crease_edges: BTreeSet<[VertexId; 2]>,
    pub corner_vertices: BTreeSet<VertexId>,
    pub acute_apexes: Vec<AcuteApex>,
}

impl PiecewiseComplex {
    /// Finds crease edges, corners and acute curve-curve apexes.
    ///
    /// An edge is a crease when it is a boundary or non-manifold edge, or when
    /// the normals of its two triangles deviate by more than `dihedral_threshold`.
    pub fn detect_sharp_features(&self, dihedral_threshold: f64) -> SharpFeatureSet {
        let mut incident: BTreeMap<[VertexId; 2], Vec<(usize, bool)>> = BTreeMap::new();
        for (k, t) in self.triangles().iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (t.v[i], t.v[(i + 1) % 3]);
                incident.entry(edge_key(a, b)).or_default().push((k, a < b));
            }
        }
        let mut crease_edges = BTreeSet::new();
        for (e, tris) in &incident {
            if tris.len() != 2 {
                crease_edges.insert(*e);
                continue;
            }
            let [p0, p1, p2] = self.triangle_points(tris[0].0);
            let [q0, q1, q2] = self.triangle_points(tris[1].0);
            let (Some(n1), Some(mut n2)) = (tri_normal(p0, p1, p2), tri_normal(q0, q1, q2)) else {
                crease_edges.insert(*e);
                continue;
            };
            // consistently oriented neighbours traverse the edge in opposite directions
            if tris[0].1 == tris[1].1 {
                n2 = -n2;
            }
            let deviation = n1.dot(n2).clamp(-1.0, 1.0).acos();
            if deviation > dihedral_threshold {
                crease_edges.insert(*e);
            }
        }

        let mut graph: BTreeMap<VertexId, BTreeSet<[VertexId; 2]>> = BTreeMap::new();
        for e in self.segments().iter().map(|s| edge_key(s.v[0], s.v[1])).chain(crease_edges.iter().copied()) {
            graph.entry(e[0]).or_default().insert(e);
            graph.entry(e[1]).or_default().insert(e);
        }
        let mut corner_vertices: BTreeSet<VertexId> = self.feature_vertices().clone();
        for (&v, edges) in &graph {
            if edges.len() != 2 {
                corner_vertices.insert(v);
            }
        }

        let mut acute_apexes = Vec::new();
        for (&v, edges) in &graph {
            let edges: Vec<[VertexId; 2]> = edges.iter().copied().collect();
            let p = self.vertex(v);
            for i in 0..edges.len() {
                for j in i + 1..edges.len() {
                    let far = |e: [VertexId; 2]| if e[0] == v { e[1] } else { e[0] };
                    let (Some(d1), Some(d2)) = (
                        (self.vertex(far(edges[i])) - p).normalized(),
                        (self.vertex(far(edges[j])) - p).normalized(),
                    ) else {
                        continue;
                    };
                    let angle = d1.dot(d2).clamp(-1.0, 1.0).acos();
                    if angle > 0.0 && angle <= ACUTE_ANGLE_LIMIT {
                        acute_apexes.push(AcuteApex { vertex: v, edges: [edges[i], edges[j]], angle });
                    }
                }
            }
        }
        SharpFeatureSet { crease_edges, corner_vertices, acute_apexes }
    }

    /// Returns a copy whose curve network also contains every crease edge not
    /// already covered by a segment. New curves are chains split at corners.
    pub fn with_crease_curves(&self, features: &SharpFeatureSet) -> Result<PiecewiseComplex, ComplexError> {
        let existing: BTreeSet<[VertexId; 2]> =
            self.segments().iter().map(|s| edge_key(s.v[0], s.v[1])).collect();
        let fresh: Vec<[VertexId; 2]> =
            features.crease_edges.iter().filter(|e| !existing.contains(*e)).copied().collect();
        if fresh.is_empty() {
            return Ok(self.clone());
        }
        let mut adj: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        for (k, e) in fresh.iter().enumerate() {
            adj.entry(e[0]).or_default().push(k);
            adj.entry(e[1]).or_default().push(k);
        }
        let touched_by_curve: BTreeSet<VertexId> = self.curve_vertices();
        let is_break = |v: VertexId| {
            features.corner_vertices.contains(&v) || touched_by_curve.contains(&v) || adj[&v].len() != 2
        };
        let mut next_curve: CurveId = self.segments().iter().map(|s| s.curve + 1).max().unwrap_or(0);
        let mut curve_of = vec![None::<CurveId>; fresh.len()];
        let walk = |start_edge: usize, from: VertexId, curve: CurveId, curve_of: &mut Vec<Option<CurveId>>| {
            let mut e = start_edge;
            let mut v = from;
            loop {
                curve_of[e] = Some(curve);
                let w = if fresh[e][0] == v { fresh[e][1] } else { fresh[e][0] };
                if is_break(w) {
                    break;
                }
                match adj[&w].iter().copied().find(|&n| curve_of[n].is_none()) {
                    Some(n) => {
                        e = n;
                        v = w;
                    }
                    None => break,
                }
            }
        };
        // chains leave from break vertices first; what remains are closed loops
        for from_breaks in [true, false] {
            for k in 0..fresh.len() {
                if curve_of[k].is_some() {
                    continue;
                }
                let e = fresh[k];
                let start = match (is_break(e[0]), is_break(e[1])) {
                    (true, _) => e[0],
                    (false, true) => e[1],
                    _ if from_breaks => continue,
                    _ => e[0],
                };
                walk(k, start, next_curve, &mut curve_of);
                next_curve += 1;
            }
        }
        let mut segments = self.segments().to_vec();
        segments.extend(
            fresh.iter().zip(&curve_of).map(|(e, c)| Segment { v: *e, curve: c.expect("assigned") }),
        );
        PiecewiseComplex::new(self.vertices().to_vec(), segments, self.triangles().to_vec())
    }
}
