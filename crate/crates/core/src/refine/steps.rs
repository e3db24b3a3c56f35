use std::collections::BTreeSet;

use super::driver::{Attempt, Refiner};
use super::{select_refinement_point, type2_offcentre_edge, type2_offcentre_tet, type2_offcentre_tri, Kind, RefineError};
use crate::delaunay::{VertId, FACE};
use crate::geometry::{tri_circumcentre, Point3};
use crate::restricted::{tet_edges, tet_faces, topo_disk_1, topo_disk_2, RestrictedDelta};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Owner {
    Tri([VertId; 3]),
    Tet([VertId; 4]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Inserted {
    Committed,
    RolledBack { curve: bool },
    Failed,
}

fn largest(best: &mut Option<(f64, Point3)>, r: f64, c: Point3) {
    if best.is_none_or(|(br, _)| r > br) {
        *best = Some((r, c));
    }
}

impl Refiner {
    pub(super) fn refine_edge(&mut self, k: [VertId; 2]) -> Result<(), RefineError> {
        let Some(e) = self.rc.edge(&k).copied() else { return Ok(()) };
        let mut c = e.centre;
        if self.frontal() {
            if let Some(x1) = self.edge_front(&e) {
                let p1 = self.mesh.point(x1);
                let off = type2_offcentre_edge(&self.geom, &e, p1, &self.cfg).map(|o| o.point);
                c = select_refinement_point(e.centre, off, Kind::Edge, p1, 0.0);
            }
        }
        if c != e.centre {
            self.stats.offcentres += 1;
        }
        if self.place(c)? {
            self.stats.steiner_edge += 1;
        } else {
            self.blocked_edges.insert(k);
        }
        Ok(())
    }

    pub(super) fn refine_tri(&mut self, k: [VertId; 3]) -> Result<(), RefineError> {
        let Some(f) = self.rc.tri(&k).copied() else { return Ok(()) };
        let mut c = f.centre;
        if self.frontal() {
            if let Some([a, b]) = self.tri_front(&f) {
                let (pa, pb) = (self.mesh.point(a), self.mesh.point(b));
                let off = type2_offcentre_tri(&self.geom, &f, pa, pb, &self.cfg).map(|o| o.point);
                c = select_refinement_point(f.centre, off, Kind::Tri, pa.midpoint(pb), 0.5 * pa.dist(pb));
            }
        }
        let curves = self.rc.strata().curves;
        if curves {
            if let Some(ce) = self.encroached_edge(c)? {
                self.stats.encroach_edge += 1;
                if !self.place(ce)? {
                    self.blocked_tris.insert(k);
                }
                return Ok(());
            }
        }
        let owner = Owner::Tri(k);
        if self.insert_watched(Some(owner), c, curves, false)? == Inserted::Committed {
            if c != f.centre {
                self.stats.offcentres += 1;
            }
            self.stats.steiner_tri += 1;
        }
        Ok(())
    }

    pub(super) fn refine_tet(&mut self, k: [VertId; 4]) -> Result<(), RefineError> {
        let Some(t) = self.rc.tet(&k).copied() else { return Ok(()) };
        let mut c = t.centre;
        if self.frontal() {
            if let Some(i) = self.tet_front(&t) {
                let v = self.mesh.tet_vertices(t.tet);
                let facet = FACE[i].map(|j| self.mesh.point(v[j]));
                let apex = self.mesh.point(v[i]);
                if let Some(c0) = tri_circumcentre(facet[0], facet[1], facet[2]) {
                    let off = type2_offcentre_tet(&t, facet, apex, &self.cfg).map(|o| o.point);
                    c = select_refinement_point(t.centre, off, Kind::Tet, c0, c0.dist(facet[0]));
                }
            }
        }
        let strata = self.rc.strata();
        if strata.curves {
            if let Some(ce) = self.encroached_edge(c)? {
                self.stats.encroach_edge += 1;
                if !self.place(ce)? {
                    self.blocked_tets.insert(k);
                }
                return Ok(());
            }
        }
        if strata.surface {
            if let Some(cf) = self.encroached_tri(c)? {
                self.stats.encroach_tri += 1;
                if !self.place(cf)? {
                    self.blocked_tets.insert(k);
                }
                return Ok(());
            }
        }
        if self.insert_watched(Some(Owner::Tet(k)), c, strata.curves, strata.surface)? == Inserted::Committed {
            if c != t.centre {
                self.stats.offcentres += 1;
            }
            self.stats.steiner_tet += 1;
        }
        Ok(())
    }

    fn block(&mut self, owner: Option<Owner>) {
        match owner {
            Some(Owner::Tri(k)) => {
                self.blocked_tris.insert(k);
            }
            Some(Owner::Tet(k)) => {
                self.blocked_tets.insert(k);
            }
            None => {}
        }
    }

    /// Inserts `c`; if it changes the watched restricted sets the insertion
    /// is undone and the largest adjacent curve (or surface) ball is refined
    /// instead. `owner` is blocked when no point could be placed.
    pub(super) fn insert_watched(
        &mut self,
        owner: Option<Owner>,
        c: Point3,
        watch_curve: bool,
        watch_surface: bool,
    ) -> Result<Inserted, RefineError> {
        let (vertex, delta) = match self.attempt(c)? {
            Attempt::Placed { vertex, delta } => (vertex, delta),
            Attempt::Rejected | Attempt::Duplicate => {
                self.block(owner);
                return Ok(Inserted::Failed);
            }
        };
        let curve = watch_curve && delta.curve_changed();
        if !curve && !(watch_surface && delta.surface_changed()) {
            self.commit(vertex, &delta);
            return Ok(Inserted::Committed);
        }
        if curve {
            self.stats.rollback_curve += 1;
        } else {
            self.stats.rollback_surface += 1;
        }
        self.revert(&delta, Some(curve));
        let target = if curve { self.adjacent_edge_ball(&delta, vertex) } else { self.adjacent_tri_ball(&delta, vertex) };
        if !self.place(target.unwrap_or(c))? {
            self.block(owner);
        }
        Ok(Inserted::RolledBack { curve })
    }

    /// Largest curve ball the rolled-back insertion would have affected,
    /// looked up in the restored complex.
    fn adjacent_edge_ball(&self, d: &RestrictedDelta, vertex: VertId) -> Option<Point3> {
        let added: BTreeSet<[VertId; 2]> = d.edges_added.iter().copied().collect();
        let mut best = None;
        for e in &d.edges_removed {
            largest(&mut best, e.radius, e.centre);
        }
        for k in d.edges_touched.iter().filter(|k| !added.contains(*k)) {
            if let Some(e) = self.rc.edge(k) {
                largest(&mut best, e.radius, e.centre);
            }
        }
        if best.is_none() {
            for &v in added.iter().flatten().filter(|&&v| v != vertex) {
                for e in self.rc.edges_at(v) {
                    largest(&mut best, e.radius, e.centre);
                }
            }
        }
        best.map(|(_, c)| c)
    }

    fn adjacent_tri_ball(&self, d: &RestrictedDelta, vertex: VertId) -> Option<Point3> {
        let added: BTreeSet<[VertId; 3]> = d.tris_added.iter().copied().collect();
        let mut best = None;
        for f in &d.tris_removed {
            largest(&mut best, f.radius, f.centre);
        }
        for k in d.tris_touched.iter().filter(|k| !added.contains(*k)) {
            if let Some(f) = self.rc.tri(k) {
                largest(&mut best, f.radius, f.centre);
            }
        }
        if best.is_none() {
            for &v in added.iter().flatten().filter(|&&v| v != vertex) {
                for f in self.rc.tris_at(v) {
                    largest(&mut best, f.radius, f.centre);
                }
            }
        }
        best.map(|(_, c)| c)
    }

    /// Centre of the largest restricted curve ball strictly containing `c`.
    fn encroached_edge(&mut self, c: Point3) -> Result<Option<Point3>, RefineError> {
        let mut keys = BTreeSet::new();
        for t in self.mesh.conflict_tets(c)? {
            keys.extend(tet_edges(self.mesh.tet_vertices(t)));
        }
        let mut best = None;
        for k in keys {
            if let Some(e) = self.rc.edge(&k) {
                if c.dist(e.centre) < e.radius {
                    largest(&mut best, e.radius, e.centre);
                }
            }
        }
        Ok(best.map(|(_, p)| p))
    }

    fn encroached_tri(&mut self, c: Point3) -> Result<Option<Point3>, RefineError> {
        let mut keys = BTreeSet::new();
        for t in self.mesh.conflict_tets(c)? {
            keys.extend(tet_faces(self.mesh.tet_vertices(t)));
        }
        let mut best = None;
        for k in keys {
            if let Some(f) = self.rc.tri(&k) {
                if c.dist(f.centre) < f.radius {
                    largest(&mut best, f.radius, f.centre);
                }
            }
        }
        Ok(best.map(|(_, p)| p))
    }

    pub(super) fn repair_disk_1(&mut self, v: VertId) -> Result<bool, RefineError> {
        if !self.mesh.is_alive(v) {
            return Ok(false);
        }
        let Some(c) = topo_disk_1(&self.rc.edges_at(v), &self.expectation(v)) else { return Ok(false) };
        let ok = self.place(c)?;
        if ok {
            self.stats.disk1_repairs += 1;
        }
        Ok(ok)
    }

    pub(super) fn repair_disk_2(&mut self, v: VertId) -> Result<bool, RefineError> {
        if !self.mesh.is_alive(v) {
            return Ok(false);
        }
        let rc = &self.rc;
        let Some(c) = topo_disk_2(v, &rc.tris_at(v), |k| rc.edge(&k).is_some(), &self.expectation(v)) else {
            return Ok(false);
        };
        let ok = self.place(c)?;
        if ok {
            self.stats.disk2_repairs += 1;
        }
        Ok(ok)
    }
}
