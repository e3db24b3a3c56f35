use std::collections::{BTreeMap, BTreeSet};

use super::{RestrictedEdge, RestrictedTri};
use crate::delaunay::VertId;
use crate::geometry::Point3;
use crate::oracle::PatchId;

/// Local topology expected at a mesh vertex that sits on an input feature
/// vertex. Ordinary vertices use the default (no expectation).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiskExpectation {
    /// Number of input curve segments at the vertex.
    pub curve_degree: Option<u32>,
    /// Number of fan sectors per incident input patch.
    pub sectors: Option<BTreeMap<PatchId, usize>>,
}

/// One edge-connected component of the triangles around a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    pub closed: bool,
    /// Link vertices with a single incident triangle (open fans only).
    pub ends: Vec<VertId>,
    /// Some link vertex has more than two incident triangles.
    pub branching: bool,
}

/// Splits the umbrella of `p` into edge-connected fans. Each triangle must
/// contain `p`.
pub fn fan_components(p: VertId, tris: &[[VertId; 3]]) -> Vec<Fan> {
    let mut adj: BTreeMap<VertId, Vec<VertId>> = BTreeMap::new();
    for t in tris {
        let o: Vec<VertId> = t.iter().copied().filter(|&v| v != p).collect();
        if o.len() != 2 {
            continue;
        }
        adj.entry(o[0]).or_default().push(o[1]);
        adj.entry(o[1]).or_default().push(o[0]);
    }
    let mut seen = BTreeSet::new();
    let mut fans = Vec::new();
    for &start in adj.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut stack = vec![start];
        seen.insert(start);
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in &adj[&v] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        let ends: Vec<VertId> = comp.iter().copied().filter(|v| adj[v].len() == 1).collect();
        let branching = comp.iter().any(|v| adj[v].len() > 2);
        fans.push(Fan { closed: ends.is_empty() && !branching, ends, branching });
    }
    fans
}

/// `None` when the restricted edges at a vertex form a valid 1-disk,
/// otherwise the centre of the largest incident surface ball.
pub fn topo_disk_1(edges: &[&RestrictedEdge], expect: &DiskExpectation) -> Option<Point3> {
    if edges.is_empty() {
        return None;
    }
    let valid = match expect.curve_degree {
        Some(d) => edges.len() == d as usize,
        None => edges.len() == 2 && edges[0].curve == edges[1].curve,
    };
    if valid {
        return None;
    }
    largest(edges.iter().map(|e| (e.radius, e.centre)))
}

/// `None` when the restricted triangles at `p` form a valid 2-disk per
/// patch, otherwise the centre of the largest incident surface ball.
/// `on_curve` tells whether an edge belongs to the restricted curve mesh.
pub fn topo_disk_2<F: Fn([VertId; 2]) -> bool>(
    p: VertId,
    tris: &[&RestrictedTri],
    on_curve: F,
    expect: &DiskExpectation,
) -> Option<Point3> {
    if tris.is_empty() {
        return None;
    }
    let mut by_patch: BTreeMap<PatchId, Vec<[VertId; 3]>> = BTreeMap::new();
    for t in tris {
        by_patch.entry(t.patch).or_default().push(t.tri);
    }
    let valid = by_patch.iter().all(|(&patch, group)| {
        let fans = fan_components(p, group);
        let want = match &expect.sectors {
            Some(s) => match s.get(&patch) {
                Some(&n) => n,
                None => return false,
            },
            None => 1,
        };
        if fans.len() != want || fans.iter().any(|f| f.branching) {
            return false;
        }
        fans.iter().all(|f| {
            f.ends.iter().all(|&e| {
                let key = if p < e { [p, e] } else { [e, p] };
                on_curve(key) || tris.iter().any(|t| t.patch != patch && t.tri.contains(&e))
            })
        })
    });
    if valid {
        return None;
    }
    largest(tris.iter().map(|t| (t.radius, t.centre)))
}

fn largest(balls: impl Iterator<Item = (f64, Point3)>) -> Option<Point3> {
    let mut best: Option<(f64, Point3)> = None;
    for (r, c) in balls {
        if best.is_none_or(|(br, _)| r > br) {
            best = Some((r, c));
        }
    }
    best.map(|(_, c)| c)
}
