use std::collections::BTreeSet;

use super::driver::Refiner;
use super::{bad_simplex_1, bad_simplex_2, bad_simplex_3, rho_2, rho_3, Mode, Priority};
use crate::delaunay::{VertId, FACE, NONE};
use crate::geometry::Point3;
use crate::restricted::{RestrictedDelta, RestrictedEdge, RestrictedTet, RestrictedTri};

fn sort3(mut f: [VertId; 3]) -> [VertId; 3] {
    f.sort_unstable();
    f
}

fn sort4(mut t: [VertId; 4]) -> [VertId; 4] {
    t.sort_unstable();
    t
}

impl Refiner {
    pub(super) fn tri_points(&self, k: [VertId; 3]) -> [Point3; 3] {
        k.map(|v| self.mesh.point(v))
    }

    pub(super) fn tet_points_of(&self, k: [VertId; 4]) -> [Point3; 4] {
        k.map(|v| self.mesh.point(v))
    }

    pub(super) fn edge_bad(&self, e: &RestrictedEdge) -> bool {
        bad_simplex_1(e, &self.cfg)
    }

    pub(super) fn tri_bad(&self, f: &RestrictedTri) -> bool {
        bad_simplex_2(f, &self.tri_points(f.tri), &self.cfg)
    }

    pub(super) fn tet_bad(&self, t: &RestrictedTet) -> bool {
        bad_simplex_3(t, &self.tet_points_of(t.verts), &self.cfg)
    }

    pub(super) fn frontal(&self) -> bool {
        self.cfg.mode == Mode::Frontal
    }

    /// Endpoint of `e` shared with a converged restricted edge.
    pub(super) fn edge_front(&self, e: &RestrictedEdge) -> Option<VertId> {
        e.edge.into_iter().find(|&x| {
            self.rc.edges_at(x).into_iter().any(|o| o.edge != e.edge && !self.edge_bad(o))
        })
    }

    /// Edge of `f` that is a converged curve edge or is shared with a
    /// converged restricted triangle.
    pub(super) fn tri_front(&self, f: &RestrictedTri) -> Option<[VertId; 2]> {
        let [a, b, c] = f.tri;
        [[a, b], [a, c], [b, c]].into_iter().find(|&k| {
            if self.rc.edge(&k).is_some_and(|e| !self.edge_bad(e)) {
                return true;
            }
            self.rc.tris_at(k[0]).into_iter().any(|o| o.tri != f.tri && o.tri.contains(&k[1]) && !self.tri_bad(o))
        })
    }

    /// Facet index of `t` that is a converged surface triangle or is shared
    /// with a converged restricted tet.
    pub(super) fn tet_front(&self, t: &RestrictedTet) -> Option<usize> {
        if !self.mesh.tet_exists(t.tet) {
            return None;
        }
        let v = self.mesh.tet_vertices(t.tet);
        (0..4).find(|&i| {
            let face = sort3(FACE[i].map(|k| v[k]));
            if self.rc.tri(&face).is_some_and(|f| !self.tri_bad(f)) {
                return true;
            }
            let n = self.mesh.neighbour(t.tet, i);
            n != NONE && self.rc.tet(&sort4(self.mesh.tet_vertices(n))).is_some_and(|o| !self.tet_bad(o))
        })
    }

    pub(super) fn queue_edge(&mut self, k: [VertId; 2]) {
        match self.rc.edge(&k) {
            Some(e) if !self.blocked_edges.contains(&k) && self.edge_bad(e) => {
                let prio = Priority { frontal: self.frontal() && self.edge_front(e).is_some(), value: e.radius };
                self.q_edges.push(k, prio);
            }
            _ => self.q_edges.remove(&k),
        }
    }

    pub(super) fn queue_tri(&mut self, k: [VertId; 3]) {
        match self.rc.tri(&k) {
            Some(f) if !self.blocked_tris.contains(&k) && self.tri_bad(f) => {
                let value = rho_2(f, &self.tri_points(k));
                let prio = Priority { frontal: self.frontal() && self.tri_front(f).is_some(), value };
                self.q_tris.push(k, prio);
            }
            _ => self.q_tris.remove(&k),
        }
    }

    pub(super) fn queue_tet(&mut self, k: [VertId; 4]) {
        match self.rc.tet(&k) {
            Some(t) if !self.blocked_tets.contains(&k) && self.tet_bad(t) => {
                let value = rho_3(&self.tet_points_of(k));
                let prio = Priority { frontal: self.frontal() && self.tet_front(t).is_some(), value };
                self.q_tets.push(k, prio);
            }
            _ => self.q_tets.remove(&k),
        }
    }

    pub(super) fn seed_queues(&mut self) {
        let edges: Vec<_> = self.rc.edges().keys().copied().collect();
        let tris: Vec<_> = self.rc.tris().keys().copied().collect();
        let tets: Vec<_> = self.rc.tets().keys().copied().collect();
        edges.into_iter().for_each(|k| self.queue_edge(k));
        tris.into_iter().for_each(|k| self.queue_tri(k));
        tets.into_iter().for_each(|k| self.queue_tet(k));
        self.disk1 = self.rc.curve_vertices().collect();
        self.disk2 = self.rc.surface_vertices().collect();
    }

    /// Refreshes queues, blocked sets and disk work lists after a committed
    /// insertion. Neighbours are re-evaluated too since their frontal
    /// status may have changed.
    pub(super) fn maintain(&mut self, vertex: VertId, d: &RestrictedDelta) {
        let mut cv: BTreeSet<VertId> = BTreeSet::new();
        for e in &d.edges_removed {
            self.q_edges.remove(&e.edge);
            self.blocked_edges.remove(&e.edge);
            cv.extend(e.edge);
        }
        for k in &d.edges_touched {
            self.blocked_edges.remove(k);
            cv.extend(k);
        }
        let mut sv: BTreeSet<VertId> = cv.clone();
        for f in &d.tris_removed {
            self.q_tris.remove(&f.tri);
            self.blocked_tris.remove(&f.tri);
            sv.extend(f.tri);
        }
        for k in &d.tris_touched {
            self.blocked_tris.remove(k);
            sv.extend(k);
        }
        cv.insert(vertex);
        sv.insert(vertex);
        for &v in &cv {
            let keys: Vec<_> = self.rc.edges_at(v).into_iter().map(|e| e.edge).collect();
            keys.into_iter().for_each(|k| self.queue_edge(k));
        }
        for &v in &sv {
            let keys: Vec<_> = self.rc.tris_at(v).into_iter().map(|f| f.tri).collect();
            keys.into_iter().for_each(|k| self.queue_tri(k));
        }
        for t in &d.tets_removed {
            self.q_tets.remove(&t.verts);
            self.blocked_tets.remove(&t.verts);
        }
        let mut tets: BTreeSet<[VertId; 4]> = BTreeSet::new();
        for k in &d.tets_touched {
            self.blocked_tets.remove(k);
            tets.insert(*k);
            if self.frontal() {
                if let Some(t) = self.rc.tet(k) {
                    for i in 0..4 {
                        let n = self.mesh.neighbour(t.tet, i);
                        if n != NONE {
                            tets.insert(sort4(self.mesh.tet_vertices(n)));
                        }
                    }
                }
            }
        }
        if self.frontal() && (!d.tris_touched.is_empty() || !d.tris_removed.is_empty()) {
            let faces: BTreeSet<[VertId; 3]> =
                d.tris_touched.iter().copied().chain(d.tris_removed.iter().map(|f| f.tri)).collect();
            for f in faces {
                if !self.mesh.is_alive(f[0]) {
                    continue;
                }
                for t in self.mesh.star(f[0]) {
                    let v = sort4(self.mesh.tet_vertices(t));
                    if f.iter().all(|x| v.contains(x)) {
                        tets.insert(v);
                    }
                }
            }
        }
        tets.into_iter().for_each(|k| self.queue_tet(k));
        self.disk1.extend(cv.iter().copied().filter(|&v| self.mesh.is_alive(v)));
        self.disk2.extend(sv.iter().copied().filter(|&v| self.mesh.is_alive(v)));
    }

    /// Pops the best edge, re-queueing entries whose frontal flag went stale.
    pub(super) fn pop_edge(&mut self) -> Option<([VertId; 2], Priority)> {
        while let Some((k, p)) = self.q_edges.pop() {
            let Some(e) = self.rc.edge(&k).copied() else { continue };
            if p.frontal && self.edge_front(&e).is_none() {
                self.q_edges.push(k, Priority { frontal: false, ..p });
                continue;
            }
            return Some((k, p));
        }
        None
    }

    pub(super) fn pop_tri(&mut self) -> Option<([VertId; 3], Priority)> {
        while let Some((k, p)) = self.q_tris.pop() {
            let Some(f) = self.rc.tri(&k).copied() else { continue };
            if p.frontal && self.tri_front(&f).is_none() {
                self.q_tris.push(k, Priority { frontal: false, ..p });
                continue;
            }
            return Some((k, p));
        }
        None
    }

    pub(super) fn pop_tet(&mut self) -> Option<([VertId; 4], Priority)> {
        while let Some((k, p)) = self.q_tets.pop() {
            let Some(t) = self.rc.tet(&k).copied() else { continue };
            if p.frontal && self.tet_front(&t).is_none() {
                self.q_tets.push(k, Priority { frontal: false, ..p });
                continue;
            }
            return Some((k, p));
        }
        None
    }
}
