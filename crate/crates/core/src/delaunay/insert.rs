use std::collections::HashSet;

use super::{sorted4, Insertion, KernelError, MeshChange, Tet, TetId, TetMesh, UndoRecord, VertId, NONE};
use crate::geometry::Point3;
use crate::predicates::{insphere, orient3d, Sign};

impl TetMesh {
    /// Visibility walk to a tet whose closure contains `p`.
    pub fn locate(&mut self, p: Point3) -> Result<TetId, KernelError> {
        if !self.strictly_inside_shell(p) {
            return Err(KernelError::OutsideShell(p.x, p.y, p.z));
        }
        let mut t = if self.tet_exists(self.last) {
            self.last
        } else {
            self.tets().next().ok_or(KernelError::LocateFailed)?
        };
        let limit = 4 * self.tets.len() + 64;
        for _ in 0..limit {
            let mut moved = false;
            for k in 0..4 {
                let i = (k + self.turn) % 4;
                let [a, b, c] = self.face(t, i).map(|v| self.pt(v));
                if orient3d(a, b, c, p) == Sign::Negative {
                    let u = self.tets[t as usize].n[i];
                    if u == NONE {
                        return Err(KernelError::OutsideShell(p.x, p.y, p.z));
                    }
                    t = u;
                    moved = true;
                    break;
                }
            }
            self.turn = self.turn.wrapping_add(1);
            if !moved {
                return Ok(t);
            }
        }
        self.tets()
            .find(|&t| {
                (0..4).all(|i| {
                    let [a, b, c] = self.face(t, i).map(|v| self.pt(v));
                    orient3d(a, b, c, p) != Sign::Negative
                })
            })
            .ok_or(KernelError::LocateFailed)
    }

    fn strictly_inside_shell(&self, p: Point3) -> bool {
        let s = self.shell;
        p.is_finite()
            && p.x > s.min.x
            && p.x < s.max.x
            && p.y > s.min.y
            && p.y < s.max.y
            && p.z > s.min.z
            && p.z < s.max.z
    }

    fn in_ball(&self, t: TetId, p: Point3) -> bool {
        let [a, b, c, d] = self.tet_points(t);
        insphere(a, b, c, d, p) == Sign::Positive
    }

    /// Tets whose open circumball contains `p`, flooded from the tet
    /// containing it. Returns `Err(v)` when `p` snaps to vertex `v`.
    pub(crate) fn cavity(&mut self, p: Point3) -> Result<Result<Vec<TetId>, VertId>, KernelError> {
        let t0 = self.locate(p)?;
        let mut cav = vec![t0];
        let mut seen: HashSet<TetId> = HashSet::from([t0]);
        let mut k = 0;
        while k < cav.len() {
            let t = cav[k];
            k += 1;
            for &v in &self.tets[t as usize].v {
                if self.pt(v).dist(p) <= self.snap {
                    return Ok(Err(v));
                }
            }
            for i in 0..4 {
                let u = self.tets[t as usize].n[i];
                if u != NONE && !seen.contains(&u) {
                    seen.insert(u);
                    if self.in_ball(u, p) {
                        cav.push(u);
                    }
                }
            }
        }
        if !self.in_ball(t0, p) {
            return Err(KernelError::LocateFailed);
        }
        Ok(Ok(cav))
    }

    /// Tets whose circumball strictly contains `p` (no mutation beyond the
    /// walk state). Empty when `p` snaps to an existing vertex.
    pub fn conflict_tets(&mut self, p: Point3) -> Result<Vec<TetId>, KernelError> {
        Ok(self.cavity(p)?.unwrap_or_default())
    }

    /// Adds `p` and re-triangulates its cavity. The insertion can be reverted
    /// with [`TetMesh::undo_last_insert`] until the next mutation.
    pub fn insert_point(&mut self, p: Point3) -> Result<Insertion, KernelError> {
        self.insert_impl(p, None)
    }

    pub(crate) fn insert_impl(&mut self, p: Point3, existing: Option<VertId>) -> Result<Insertion, KernelError> {
        let cav = match self.cavity(p)? {
            Ok(c) => c,
            Err(v) => {
                self.undo = None;
                return Ok(Insertion { vertex: v, duplicate: true, change: MeshChange::default() });
            }
        };
        let inside: HashSet<TetId> = cav.iter().copied().collect();
        let mut boundary = Vec::new();
        for &c in &cav {
            for i in 0..4 {
                let u = self.tets[c as usize].n[i];
                if u == NONE || !inside.contains(&u) {
                    let f = self.face(c, i);
                    let [a, b, d] = f.map(|v| self.pt(v));
                    if orient3d(a, b, d, p) != Sign::Positive {
                        return Err(KernelError::Inverted);
                    }
                    boundary.push((f, u, c));
                }
            }
        }

        let (vertex, new_vertex) = match existing {
            Some(v) => (v, false),
            None => {
                self.points.push(p);
                self.alive.push(true);
                self.hint.push(0);
                ((self.points.len() - 1) as VertId, true)
            }
        };
        self.alive[vertex as usize] = true;

        let old_len = self.tets.len();
        let mut popped = Vec::new();
        let mut created = Vec::with_capacity(boundary.len());
        for &(f, _, _) in &boundary {
            let reuse = !self.free.is_empty();
            let id = self.alloc([f[0], f[1], f[2], vertex]);
            if reuse {
                popped.push(id);
            }
            created.push(id);
        }
        self.link(&created);
        for (k, &(_, u, c)) in boundary.iter().enumerate() {
            let id = created[k];
            self.tets[id as usize].n[3] = u;
            if u != NONE {
                let j = self.tets[u as usize].n.iter().position(|&w| w == c).expect("outer face links cavity");
                self.tets[u as usize].n[j] = id;
            }
        }
        let old: Vec<(TetId, Tet)> = cav.iter().map(|&c| (c, self.tets[c as usize])).collect();
        for &c in &cav {
            self.kill(c);
        }
        for &id in &created {
            for v in self.tets[id as usize].v {
                self.hint[v as usize] = id;
            }
        }
        self.last = created[0];
        let change = MeshChange { created: created.clone(), removed: old.iter().map(|(_, t)| sorted4(t.v)).collect() };
        self.undo = Some(UndoRecord { vertex, new_vertex, created, old, old_len, popped });
        Ok(Insertion { vertex, duplicate: false, change })
    }

    /// Reverts the most recent insertion exactly, including tet ids.
    pub fn undo_last_insert(&mut self) -> Option<MeshChange> {
        let rec = self.undo.take()?;
        let removed: Vec<[VertId; 4]> = rec.created.iter().map(|&t| sorted4(self.tets[t as usize].v)).collect();
        let created_set: HashSet<TetId> = rec.created.iter().copied().collect();
        let old_set: HashSet<TetId> = rec.old.iter().map(|&(id, _)| id).collect();
        let keep = self.free.len() - rec.old.len();
        debug_assert!(self.free[keep..].iter().zip(&rec.old).all(|(a, b)| *a == b.0));
        self.free.truncate(keep);
        for &(id, tet) in &rec.old {
            self.tets[id as usize] = tet;
            self.dead[id as usize] = false;
        }
        for &(id, tet) in &rec.old {
            for i in 0..4 {
                let u = tet.n[i];
                if u == NONE || old_set.contains(&u) {
                    continue;
                }
                let key = self.face_key(id, i);
                for j in 0..4 {
                    let w = self.tets[u as usize].n[j];
                    if created_set.contains(&w) && self.face_key(u, j) == key {
                        self.tets[u as usize].n[j] = id;
                    }
                }
            }
        }
        for &id in rec.created.iter() {
            self.dead[id as usize] = true;
        }
        for &id in rec.popped.iter().rev() {
            self.free.push(id);
        }
        self.tets.truncate(rec.old_len);
        self.dead.truncate(rec.old_len);
        if rec.new_vertex {
            self.points.pop();
            self.alive.pop();
            self.hint.pop();
        } else {
            self.alive[rec.vertex as usize] = false;
        }
        for &(id, tet) in &rec.old {
            for v in tet.v {
                self.hint[v as usize] = id;
            }
        }
        self.last = rec.old[0].0;
        Some(MeshChange { created: rec.old.iter().map(|&(id, _)| id).collect(), removed })
    }
}
