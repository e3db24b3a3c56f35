//! Incremental Delaunay tetrahedralisation with an artificial bounding shell.
//!
//! Vertices `0..8` are the corners of a box ten times the size of the input
//! bounding box. Tets touching a corner are ghosts; everything else is the
//! Delaunay tetrahedralisation of the inserted points.

mod insert;
mod remove;
mod voronoi;

use std::collections::HashMap;

use thiserror::Error;

use crate::geometry::{Aabb, Point3};
use crate::predicates::{orient3d, Sign};

pub use voronoi::{VoronoiEdge, VoronoiFace, VoronoiVertex};

pub type VertId = u32;
pub type TetId = u32;

/// Missing neighbour (outer face of the shell).
pub const NONE: u32 = u32::MAX;
/// Number of shell corner vertices.
pub const SHELL: u32 = 8;
/// Shell half-width as a multiple of the input bounding-box diagonal.
pub const SHELL_SCALE: f64 = 10.0;
/// Duplicate-point snap tolerance relative to the bounding-box diagonal.
pub const SNAP_REL: f64 = 1e-12;

/// Local vertex triples of the face opposite vertex `i`, ordered so that the
/// opposite vertex lies on the positive side.
pub const FACE: [[usize; 3]; 4] = [[1, 3, 2], [0, 2, 3], [0, 3, 1], [0, 1, 2]];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("point ({0}, {1}, {2}) lies outside the bounding shell")]
    OutsideShell(f64, f64, f64),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertId),
    #[error("vertex {0} belongs to the bounding shell")]
    ShellVertex(VertId),
    #[error("point location failed")]
    LocateFailed,
    #[error("edge ({0}, {1}) is not in the triangulation")]
    MissingEdge(VertId, VertId),
    #[error("broken tet ring around edge ({0}, {1})")]
    BrokenRing(VertId, VertId),
    #[error("cavity produced an inverted tet")]
    Inverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Tet {
    pub v: [VertId; 4],
    pub n: [TetId; 4],
}

/// Tets touched by a mutation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeshChange {
    /// Ids of tets that now exist and did not before.
    pub created: Vec<TetId>,
    /// Sorted vertex quadruples of tets that no longer exist.
    pub removed: Vec<[VertId; 4]>,
}

#[derive(Debug, Clone)]
pub struct Insertion {
    pub vertex: VertId,
    /// True when the point snapped to an existing vertex; nothing changed.
    pub duplicate: bool,
    pub change: MeshChange,
}

#[derive(Debug, Clone)]
pub(crate) struct UndoRecord {
    vertex: VertId,
    new_vertex: bool,
    created: Vec<TetId>,
    old: Vec<(TetId, Tet)>,
    old_len: usize,
    popped: Vec<TetId>,
}

#[derive(Debug, Clone)]
pub struct TetMesh {
    points: Vec<Point3>,
    alive: Vec<bool>,
    tets: Vec<Tet>,
    dead: Vec<bool>,
    free: Vec<TetId>,
    hint: Vec<TetId>,
    last: TetId,
    turn: usize,
    bbox: Aabb,
    shell: Aabb,
    snap: f64,
    undo: Option<UndoRecord>,
}

pub(crate) fn sorted4(mut v: [VertId; 4]) -> [VertId; 4] {
    v.sort_unstable();
    v
}

pub(crate) fn sorted3(mut v: [VertId; 3]) -> [VertId; 3] {
    v.sort_unstable();
    v
}

impl TetMesh {
    /// Empty triangulation whose shell encloses `bbox`.
    pub fn new(bbox: Aabb) -> TetMesh {
        let diag = bbox.diagonal().max(f64::MIN_POSITIVE.sqrt());
        let half = SHELL_SCALE * diag;
        let c = bbox.centre();
        let shell = Aabb::around(c, half);
        let mut m = TetMesh {
            points: Vec::new(),
            alive: Vec::new(),
            tets: Vec::new(),
            dead: Vec::new(),
            free: Vec::new(),
            hint: Vec::new(),
            last: 0,
            turn: 0,
            bbox,
            shell,
            snap: SNAP_REL * diag,
            undo: None,
        };
        for k in 0..8u32 {
            let pick = |bit: u32, lo: f64, hi: f64| if k & bit == 0 { lo } else { hi };
            m.points.push(Point3::new(
                pick(1, shell.min.x, shell.max.x),
                pick(2, shell.min.y, shell.max.y),
                pick(4, shell.min.z, shell.max.z),
            ));
            m.alive.push(true);
            m.hint.push(0);
        }
        m.reset_to_shell();
        m
    }

    /// Replaces all tets by the six-tet split of the shell box.
    fn reset_to_shell(&mut self) {
        self.tets.clear();
        self.dead.clear();
        self.free.clear();
        self.undo = None;
        let mut quads = Vec::new();
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let a = 1u32 << perm[0];
            let b = a | (1u32 << perm[1]);
            let mut q = [0, a, b, 7];
            if orient3d(self.pt(q[0]), self.pt(q[1]), self.pt(q[2]), self.pt(q[3])) == Sign::Negative {
                q.swap(0, 1);
            }
            quads.push(q);
        }
        let ids: Vec<TetId> = quads.iter().map(|&q| self.alloc(q)).collect();
        self.link(&ids);
        for &t in &ids {
            for &v in &self.tets[t as usize].v {
                self.hint[v as usize] = t;
            }
        }
        self.last = ids[0];
    }

    /// Allocates a tet with unset neighbours.
    fn alloc(&mut self, v: [VertId; 4]) -> TetId {
        let t = Tet { v, n: [NONE; 4] };
        if let Some(id) = self.free.pop() {
            self.tets[id as usize] = t;
            self.dead[id as usize] = false;
            id
        } else {
            self.tets.push(t);
            self.dead.push(false);
            (self.tets.len() - 1) as TetId
        }
    }

    fn kill(&mut self, t: TetId) {
        self.dead[t as usize] = true;
        self.free.push(t);
    }

    /// Connects the faces of `ids` among themselves and to surviving outside
    /// tets sharing a face.
    fn link(&mut self, ids: &[TetId]) {
        let mut open: HashMap<[VertId; 3], (TetId, usize)> = HashMap::new();
        for &t in ids {
            for i in 0..4 {
                let key = self.face_key(t, i);
                if let Some((u, j)) = open.remove(&key) {
                    self.tets[t as usize].n[i] = u;
                    self.tets[u as usize].n[j] = t;
                } else {
                    open.insert(key, (t, i));
                }
            }
        }
        let _ = open;
    }

    pub(crate) fn face_key(&self, t: TetId, i: usize) -> [VertId; 3] {
        let v = &self.tets[t as usize].v;
        sorted3([v[FACE[i][0]], v[FACE[i][1]], v[FACE[i][2]]])
    }

    /// Oriented vertex triple of face `i` of tet `t`.
    pub fn face(&self, t: TetId, i: usize) -> [VertId; 3] {
        let v = &self.tets[t as usize].v;
        [v[FACE[i][0]], v[FACE[i][1]], v[FACE[i][2]]]
    }

    pub(crate) fn pt(&self, v: VertId) -> Point3 {
        self.points[v as usize]
    }

    pub fn point(&self, v: VertId) -> Point3 {
        self.points[v as usize]
    }

    /// All vertex slots including the shell corners and removed vertices.
    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn is_shell_vertex(v: VertId) -> bool {
        v < SHELL
    }

    pub fn is_alive(&self, v: VertId) -> bool {
        (v as usize) < self.alive.len() && self.alive[v as usize]
    }

    /// Live, non-shell vertex ids in increasing order.
    pub fn vertices(&self) -> impl Iterator<Item = VertId> + '_ {
        (SHELL..self.points.len() as VertId).filter(|&v| self.alive[v as usize])
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices().count()
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn shell_box(&self) -> Aabb {
        self.shell
    }

    pub fn snap_tolerance(&self) -> f64 {
        self.snap
    }

    pub fn tet_exists(&self, t: TetId) -> bool {
        (t as usize) < self.tets.len() && !self.dead[t as usize]
    }

    pub fn tet_vertices(&self, t: TetId) -> [VertId; 4] {
        self.tets[t as usize].v
    }

    pub fn tet_points(&self, t: TetId) -> [Point3; 4] {
        self.tets[t as usize].v.map(|v| self.pt(v))
    }

    pub fn neighbour(&self, t: TetId, i: usize) -> TetId {
        self.tets[t as usize].n[i]
    }

    /// Face index in `neighbour(t, i)` that points back at `t`.
    pub fn mirror(&self, t: TetId, i: usize) -> Option<usize> {
        let u = self.tets[t as usize].n[i];
        if u == NONE {
            return None;
        }
        self.tets[u as usize].n.iter().position(|&w| w == t)
    }

    /// Whether the tet touches a shell corner.
    pub fn is_ghost(&self, t: TetId) -> bool {
        self.tets[t as usize].v.iter().any(|&v| v < SHELL)
    }

    /// Live tet ids in increasing order.
    pub fn tets(&self) -> impl Iterator<Item = TetId> + '_ {
        (0..self.tets.len() as TetId).filter(|&t| !self.dead[t as usize])
    }

    /// Live tets not touching the shell.
    pub fn solid_tets(&self) -> impl Iterator<Item = TetId> + '_ {
        self.tets().filter(|&t| !self.is_ghost(t))
    }

    pub fn num_tets(&self) -> usize {
        self.tets().count()
    }

    /// Sorted vertex quadruples of the non-ghost tets.
    pub fn solid_quads(&self) -> Vec<[VertId; 4]> {
        let mut q: Vec<[VertId; 4]> = self.solid_tets().map(|t| sorted4(self.tet_vertices(t))).collect();
        q.sort_unstable();
        q
    }

    /// Some live tet incident to `v`.
    pub(crate) fn tet_of(&self, v: VertId) -> Option<TetId> {
        let h = self.hint[v as usize];
        if self.tet_exists(h) && self.tets[h as usize].v.contains(&v) {
            return Some(h);
        }
        self.tets().find(|&t| self.tets[t as usize].v.contains(&v))
    }

    /// All tets incident to `v`, sorted.
    pub fn star(&self, v: VertId) -> Vec<TetId> {
        let Some(t0) = self.tet_of(v) else { return Vec::new() };
        let mut seen = vec![t0];
        let mut stack = vec![t0];
        while let Some(t) = stack.pop() {
            let tet = self.tets[t as usize];
            for i in 0..4 {
                if tet.v[i] == v {
                    continue;
                }
                let u = tet.n[i];
                if u != NONE && !seen.contains(&u) {
                    seen.push(u);
                    stack.push(u);
                }
            }
        }
        seen.sort_unstable();
        seen
    }

    /// Checks adjacency symmetry, face agreement and positive orientation.
    pub fn check(&self) -> Result<(), String> {
        for t in self.tets() {
            let tet = self.tets[t as usize];
            let [a, b, c, d] = self.tet_points(t);
            if orient3d(a, b, c, d) != Sign::Positive {
                return Err(format!("tet {t} {:?} not positively oriented", tet.v));
            }
            for i in 0..4 {
                let u = tet.n[i];
                if u == NONE {
                    continue;
                }
                if self.dead[u as usize] {
                    return Err(format!("tet {t} points at dead tet {u}"));
                }
                let Some(j) = self.mirror(t, i) else {
                    return Err(format!("adjacency {t}.{i} -> {u} is not symmetric"));
                };
                if self.face_key(t, i) != self.face_key(u, j) {
                    return Err(format!("tets {t} and {u} disagree on their shared face"));
                }
            }
        }
        Ok(())
    }
}
