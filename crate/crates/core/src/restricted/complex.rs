use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{classify_edge_at, classify_face_of, classify_tet, tet_edges, tet_faces};
use super::{RestrictedEdge, RestrictedTet, RestrictedTri};
use crate::delaunay::{MeshChange, TetMesh, VertId};
use crate::oracle::PiecewiseComplex;

/// Which restricted sub-complexes are maintained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strata {
    pub curves: bool,
    pub surface: bool,
    pub volume: bool,
}

impl Strata {
    /// Everything the input supports: volume only for closed surfaces.
    pub fn for_complex(g: &PiecewiseComplex) -> Strata {
        Strata { curves: g.has_curves(), surface: g.has_surface(), volume: g.is_closed() }
    }
}

/// What an update changed. `*_touched` lists every key that was
/// re-classified and is restricted afterwards.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RestrictedDelta {
    pub edges_added: Vec<[VertId; 2]>,
    pub edges_removed: Vec<RestrictedEdge>,
    pub edges_touched: Vec<[VertId; 2]>,
    pub tris_added: Vec<[VertId; 3]>,
    pub tris_removed: Vec<RestrictedTri>,
    pub tris_touched: Vec<[VertId; 3]>,
    pub tets_added: Vec<[VertId; 4]>,
    pub tets_removed: Vec<RestrictedTet>,
    pub tets_touched: Vec<[VertId; 4]>,
}

impl RestrictedDelta {
    /// Whether the set of restricted curve edges changed.
    pub fn curve_changed(&self) -> bool {
        !self.edges_added.is_empty() || !self.edges_removed.is_empty()
    }

    /// Whether the set of restricted surface triangles changed.
    pub fn surface_changed(&self) -> bool {
        !self.tris_added.is_empty() || !self.tris_removed.is_empty()
    }
}

/// The restricted edges, triangles and tets of a triangulation, kept in
/// step with it through [`RestrictedComplex::update`].
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedComplex {
    strata: Strata,
    edges: BTreeMap<[VertId; 2], RestrictedEdge>,
    tris: BTreeMap<[VertId; 3], RestrictedTri>,
    tets: BTreeMap<[VertId; 4], RestrictedTet>,
    vert_edges: BTreeMap<VertId, BTreeSet<[VertId; 2]>>,
    vert_tris: BTreeMap<VertId, BTreeSet<[VertId; 3]>>,
}

fn unlink<K: Ord + Copy, const N: usize>(inc: &mut BTreeMap<VertId, BTreeSet<K>>, key: K, verts: [VertId; N]) {
    for v in verts {
        if let Some(s) = inc.get_mut(&v) {
            s.remove(&key);
            if s.is_empty() {
                inc.remove(&v);
            }
        }
    }
}

fn link<K: Ord + Copy, const N: usize>(inc: &mut BTreeMap<VertId, BTreeSet<K>>, key: K, verts: [VertId; N]) {
    for v in verts {
        inc.entry(v).or_default().insert(key);
    }
}

impl RestrictedComplex {
    pub fn empty(strata: Strata) -> RestrictedComplex {
        RestrictedComplex {
            strata,
            edges: BTreeMap::new(),
            tris: BTreeMap::new(),
            tets: BTreeMap::new(),
            vert_edges: BTreeMap::new(),
            vert_tris: BTreeMap::new(),
        }
    }

    /// Classifies every simplex of `m`.
    pub fn build(m: &TetMesh, g: &PiecewiseComplex, strata: Strata) -> RestrictedComplex {
        let mut rc = RestrictedComplex::empty(strata);
        rc.update(m, g, &MeshChange { created: m.tets().collect(), removed: Vec::new() });
        rc
    }

    pub fn strata(&self) -> Strata {
        self.strata
    }

    /// Drops simplices of removed tets, then re-classifies every face and
    /// edge of the created ones.
    pub fn update(&mut self, m: &TetMesh, g: &PiecewiseComplex, change: &MeshChange) -> RestrictedDelta {
        let mut old_e: BTreeMap<[VertId; 2], RestrictedEdge> = BTreeMap::new();
        let mut old_f: BTreeMap<[VertId; 3], RestrictedTri> = BTreeMap::new();
        let mut old_t: BTreeMap<[VertId; 4], RestrictedTet> = BTreeMap::new();
        for &q in &change.removed {
            if let Some(t) = self.tets.remove(&q) {
                old_t.insert(q, t);
            }
            for f in tet_faces(q) {
                if let Some(x) = self.tris.remove(&f) {
                    unlink(&mut self.vert_tris, f, f);
                    old_f.insert(f, x);
                }
            }
            for e in tet_edges(q) {
                if let Some(x) = self.edges.remove(&e) {
                    unlink(&mut self.vert_edges, e, e);
                    old_e.insert(e, x);
                }
            }
        }

        let mut seen_e: HashSet<[VertId; 2]> = HashSet::new();
        let mut seen_f: HashSet<[VertId; 3]> = HashSet::new();
        let mut touched_e = Vec::new();
        let mut touched_f = Vec::new();
        let mut touched_t = Vec::new();
        for &t in &change.created {
            if !m.tet_exists(t) {
                continue;
            }
            let v = m.tet_vertices(t);
            if self.strata.volume {
                if let Some(rt) = classify_tet(m, g, t) {
                    touched_t.push(rt.verts);
                    self.tets.insert(rt.verts, rt);
                }
            }
            if self.strata.surface {
                for (i, f) in tet_faces(v).into_iter().enumerate() {
                    if !seen_f.insert(f) {
                        continue;
                    }
                    self.tris.remove(&f);
                    unlink(&mut self.vert_tris, f, f);
                    if let Some(rf) = classify_face_of(m, g, t, i) {
                        link(&mut self.vert_tris, f, f);
                        self.tris.insert(f, rf);
                        touched_f.push(f);
                    }
                }
            }
            if self.strata.curves {
                for e in tet_edges(v) {
                    if !seen_e.insert(e) {
                        continue;
                    }
                    self.edges.remove(&e);
                    unlink(&mut self.vert_edges, e, e);
                    if let Some(re) = classify_edge_at(m, g, Some(t), e[0], e[1]) {
                        link(&mut self.vert_edges, e, e);
                        self.edges.insert(e, re);
                        touched_e.push(e);
                    }
                }
            }
        }
        touched_e.sort_unstable();
        touched_f.sort_unstable();
        touched_t.sort_unstable();
        RestrictedDelta {
            edges_added: touched_e.iter().filter(|k| !old_e.contains_key(*k)).copied().collect(),
            edges_removed: old_e.iter().filter(|(k, _)| !self.edges.contains_key(*k)).map(|(_, x)| *x).collect(),
            edges_touched: touched_e,
            tris_added: touched_f.iter().filter(|k| !old_f.contains_key(*k)).copied().collect(),
            tris_removed: old_f.iter().filter(|(k, _)| !self.tris.contains_key(*k)).map(|(_, x)| *x).collect(),
            tris_touched: touched_f,
            tets_added: touched_t.iter().filter(|k| !old_t.contains_key(*k)).copied().collect(),
            tets_removed: old_t.iter().filter(|(k, _)| !self.tets.contains_key(*k)).map(|(_, x)| *x).collect(),
            tets_touched: touched_t,
        }
    }

    pub fn edges(&self) -> &BTreeMap<[VertId; 2], RestrictedEdge> {
        &self.edges
    }

    pub fn tris(&self) -> &BTreeMap<[VertId; 3], RestrictedTri> {
        &self.tris
    }

    pub fn tets(&self) -> &BTreeMap<[VertId; 4], RestrictedTet> {
        &self.tets
    }

    pub fn edge(&self, k: &[VertId; 2]) -> Option<&RestrictedEdge> {
        self.edges.get(k)
    }

    pub fn tri(&self, k: &[VertId; 3]) -> Option<&RestrictedTri> {
        self.tris.get(k)
    }

    pub fn tet(&self, k: &[VertId; 4]) -> Option<&RestrictedTet> {
        self.tets.get(k)
    }

    /// Restricted edges incident to `v`, in key order.
    pub fn edges_at(&self, v: VertId) -> Vec<&RestrictedEdge> {
        self.vert_edges.get(&v).map(|s| s.iter().map(|k| &self.edges[k]).collect()).unwrap_or_default()
    }

    /// Restricted triangles incident to `v`, in key order.
    pub fn tris_at(&self, v: VertId) -> Vec<&RestrictedTri> {
        self.vert_tris.get(&v).map(|s| s.iter().map(|k| &self.tris[k]).collect()).unwrap_or_default()
    }

    /// Vertices with at least one restricted edge.
    pub fn curve_vertices(&self) -> impl Iterator<Item = VertId> + '_ {
        self.vert_edges.keys().copied()
    }

    /// Vertices with at least one restricted triangle.
    pub fn surface_vertices(&self) -> impl Iterator<Item = VertId> + '_ {
        self.vert_tris.keys().copied()
    }
}
