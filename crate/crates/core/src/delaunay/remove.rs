use std::collections::{HashMap, HashSet};

use super::{sorted3, sorted4, KernelError, MeshChange, TetId, TetMesh, VertId, NONE, SHELL};
use crate::geometry::{Aabb, Point3};
use crate::predicates::{orient3d, Sign};

impl TetMesh {
    /// Deletes vertex `v` and re-triangulates its star from a local Delaunay
    /// triangulation of the link vertices. Degenerate stars that the local
    /// triangulation cannot fill consistently trigger a full rebuild.
    pub fn remove_point(&mut self, v: VertId) -> Result<MeshChange, KernelError> {
        if v < SHELL {
            return Err(KernelError::ShellVertex(v));
        }
        if !self.is_alive(v) {
            return Err(KernelError::UnknownVertex(v));
        }
        self.undo = None;
        let star = self.star(v);
        match self.local_fill(v, &star) {
            Some(fill) => Ok(self.splice(v, &star, fill)),
            None => Ok(self.rebuild_without(v)),
        }
    }

    /// Tets of Del(link) that exactly fill the star, as oriented quadruples.
    fn local_fill(&self, v: VertId, star: &[TetId]) -> Option<Vec<[VertId; 4]>> {
        let mut link: Vec<VertId> =
            star.iter().flat_map(|&t| self.tets[t as usize].v).filter(|&w| w != v).collect();
        link.sort_unstable();
        link.dedup();
        let bbox = Aabb::from_points(link.iter().map(|&w| self.pt(w)));
        let mut local = TetMesh::new(bbox);
        local.snap = 0.0;
        let mut map = vec![0 as VertId; SHELL as usize];
        for &w in &link {
            let ins = local.insert_point(self.pt(w)).ok()?;
            if ins.duplicate {
                return None;
            }
            map.push(w);
        }

        let star_faces: HashSet<[VertId; 3]> = star
            .iter()
            .map(|&t| {
                let i = self.tets[t as usize].v.iter().position(|&w| w == v).expect("star tet has v");
                sorted3(self.face(t, i))
            })
            .collect();
        let in_star = |q: Point3| {
            star.iter().any(|&t| {
                (0..4).all(|i| {
                    let [a, b, c] = self.face(t, i).map(|w| self.pt(w));
                    orient3d(a, b, c, q) != Sign::Negative
                })
            })
        };
        let mut fill = Vec::new();
        let mut face_count: HashMap<[VertId; 3], u32> = HashMap::new();
        for t in local.solid_tets() {
            let lv = local.tet_vertices(t);
            let [a, b, c, d] = local.tet_points(t);
            let centroid = (a + b + c + d) / 4.0;
            if !in_star(centroid) {
                continue;
            }
            let g = lv.map(|w| map[w as usize]);
            for i in 0..4 {
                let f = super::FACE[i].map(|k| g[k]);
                *face_count.entry(sorted3(f)).or_insert(0) += 1;
            }
            fill.push(g);
        }
        let outer: HashSet<[VertId; 3]> =
            face_count.into_iter().filter(|&(_, n)| n == 1).map(|(f, _)| f).collect();
        if outer != star_faces {
            return None;
        }
        Some(fill)
    }

    fn splice(&mut self, v: VertId, star: &[TetId], fill: Vec<[VertId; 4]>) -> MeshChange {
        let removed: Vec<[VertId; 4]> = star.iter().map(|&t| sorted4(self.tets[t as usize].v)).collect();
        let star_set: HashSet<TetId> = star.iter().copied().collect();
        // outside tets facing the star, keyed by shared face
        let mut outside: HashMap<[VertId; 3], (TetId, usize)> = HashMap::new();
        for &t in star {
            let i = self.tets[t as usize].v.iter().position(|&w| w == v).expect("star tet has v");
            let u = self.tets[t as usize].n[i];
            if u != NONE && !star_set.contains(&u) {
                let j = self.mirror(t, i).expect("symmetric adjacency");
                outside.insert(self.face_key(t, i), (u, j));
            }
        }
        let created: Vec<TetId> = fill.iter().map(|&q| self.alloc(q)).collect();
        self.link(&created);
        for &t in &created {
            for i in 0..4 {
                if self.tets[t as usize].n[i] != NONE {
                    continue;
                }
                if let Some(&(u, j)) = outside.get(&self.face_key(t, i)) {
                    self.tets[t as usize].n[i] = u;
                    self.tets[u as usize].n[j] = t;
                }
            }
        }
        for &t in star {
            self.kill(t);
        }
        self.alive[v as usize] = false;
        for &t in &created {
            for w in self.tets[t as usize].v {
                self.hint[w as usize] = t;
            }
        }
        if let Some(&t) = created.first() {
            self.last = t;
        }
        MeshChange { created, removed }
    }

    /// Rebuilds the whole triangulation from the surviving vertices, keeping
    /// vertex ids.
    fn rebuild_without(&mut self, v: VertId) -> MeshChange {
        self.alive[v as usize] = false;
        self.rebuild()
    }

    /// Rebuilds from scratch, inserting surviving vertices in id order.
    pub fn rebuild(&mut self) -> MeshChange {
        let removed = self.tets().map(|t| sorted4(self.tets[t as usize].v)).collect();
        let order: Vec<VertId> = self.vertices().collect();
        self.reset_to_shell();
        for &w in &order {
            self.alive[w as usize] = false;
        }
        for w in order {
            let p = self.pt(w);
            self.insert_impl(p, Some(w)).expect("re-insertion of a valid vertex");
        }
        self.undo = None;
        MeshChange { created: self.tets().collect(), removed }
    }
}
