use super::{KernelError, TetId, TetMesh, VertId, NONE};
use crate::geometry::{tet_circumcentre, tri_normal, Point3};

/// Circumradius beyond this multiple of the shortest edge marks a dual
/// point as numerically unreliable.
pub const UNRELIABLE_RATIO: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiVertex {
    pub point: Point3,
    pub reliable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiEdge {
    pub a: Point3,
    pub b: Point3,
    /// The facet is on the shell hull and `b` ends a clipped ray.
    pub unbounded: bool,
    pub reliable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiFace {
    pub edge: [VertId; 2],
    /// Circumcentres of the tet ring in cyclic order.
    pub polygon: Vec<Point3>,
    /// Tet ids matching `polygon` (clipped ray ends have no tet).
    pub tets: Vec<TetId>,
    pub unbounded: bool,
    pub reliable: bool,
}

impl TetMesh {
    pub fn voronoi_vertex(&self, t: TetId) -> VoronoiVertex {
        let [a, b, c, d] = self.tet_points(t);
        let shortest = [a.dist(b), a.dist(c), a.dist(d), b.dist(c), b.dist(d), c.dist(d)]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        match tet_circumcentre(a, b, c, d) {
            Some(p) if p.is_finite() => {
                VoronoiVertex { point: p, reliable: p.dist(a) <= UNRELIABLE_RATIO * shortest }
            }
            _ => VoronoiVertex { point: (a + b + c + d) / 4.0, reliable: false },
        }
    }

    /// Outward end of the dual ray for hull face `i` of `t`.
    fn ray_end(&self, t: TetId, i: usize, from: Point3) -> Point3 {
        let [a, b, c] = self.face(t, i).map(|v| self.pt(v));
        let out = tri_normal(a, b, c).map(|n| -n).unwrap_or(Point3::ZERO);
        from + out * self.shell.diagonal()
    }

    /// Dual of face `i` of tet `t`.
    pub fn voronoi_edge(&self, t: TetId, i: usize) -> VoronoiEdge {
        let va = self.voronoi_vertex(t);
        let u = self.tets[t as usize].n[i];
        if u == NONE {
            return VoronoiEdge { a: va.point, b: self.ray_end(t, i, va.point), unbounded: true, reliable: va.reliable };
        }
        let vb = self.voronoi_vertex(u);
        VoronoiEdge { a: va.point, b: vb.point, unbounded: false, reliable: va.reliable && vb.reliable }
    }

    /// Some tet containing edge `(u, w)`.
    pub fn edge_tet(&self, u: VertId, w: VertId) -> Option<TetId> {
        if !self.is_alive(u) || !self.is_alive(w) {
            return None;
        }
        self.star(u).into_iter().find(|&t| self.tets[t as usize].v.contains(&w))
    }

    /// Tets around edge `(u, w)` in cyclic order, starting at `start`. The
    /// second value is the hull face where the walk stopped, if any.
    fn ring_walk(&self, u: VertId, w: VertId, start: TetId, first: usize) -> (Vec<TetId>, Option<(TetId, usize)>) {
        let mut ring = vec![start];
        let mut prev = NONE;
        let mut t = start;
        let mut pick = first;
        loop {
            let v = self.tets[t as usize].v;
            let others: Vec<usize> = (0..4).filter(|&k| v[k] != u && v[k] != w).collect();
            let face = if prev == NONE {
                others[pick]
            } else {
                *others.iter().find(|&&k| self.tets[t as usize].n[k] != prev).unwrap_or(&others[0])
            };
            let next = self.tets[t as usize].n[face];
            if next == NONE {
                return (ring, Some((t, face)));
            }
            if next == start {
                return (ring, None);
            }
            if ring.len() > self.tets.len() {
                return (ring, Some((t, face)));
            }
            ring.push(next);
            prev = t;
            t = next;
            pick = 0;
        }
    }

    /// Dual polygon of Delaunay edge `(u, w)`.
    pub fn voronoi_face(&self, u: VertId, w: VertId) -> Result<VoronoiFace, KernelError> {
        let start = self.edge_tet(u, w).ok_or(KernelError::MissingEdge(u, w))?;
        self.voronoi_face_at(start, u, w)
    }

    /// As [`TetMesh::voronoi_face`], walking the ring from a tet `start`
    /// known to contain the edge.
    pub fn voronoi_face_at(&self, start: TetId, u: VertId, w: VertId) -> Result<VoronoiFace, KernelError> {
        let v = self.tets[start as usize].v;
        if !v.contains(&u) || !v.contains(&w) || u == w {
            return Err(KernelError::MissingEdge(u, w));
        }
        let (fwd, stop) = self.ring_walk(u, w, start, 0);
        let mut tets = fwd;
        let mut polygon: Vec<Point3>;
        let mut reliable = true;
        let mut unbounded = false;
        let centre = |t: TetId, reliable: &mut bool| {
            let v = self.voronoi_vertex(t);
            *reliable &= v.reliable;
            v.point
        };
        match stop {
            None => {
                if tets.len() < 3 {
                    return Err(KernelError::BrokenRing(u, w));
                }
                polygon = tets.iter().map(|&t| centre(t, &mut reliable)).collect();
            }
            Some((tf, ff)) => {
                unbounded = true;
                let (back, stop_b) = self.ring_walk(u, w, start, 1);
                let Some((tb, fb)) = stop_b else {
                    return Err(KernelError::BrokenRing(u, w));
                };
                let mut order: Vec<TetId> = back.into_iter().skip(1).collect();
                order.reverse();
                order.extend(tets.iter().copied());
                tets = order;
                polygon = tets.iter().map(|&t| centre(t, &mut reliable)).collect();
                let head = self.ray_end(tb, fb, polygon[0]);
                let tail = self.ray_end(tf, ff, *polygon.last().expect("non-empty ring"));
                polygon.insert(0, head);
                polygon.push(tail);
            }
        }
        Ok(VoronoiFace { edge: [u.min(w), u.max(w)], polygon, tets, unbounded, reliable })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Aabb;

    fn ring_mesh(n: usize) -> (TetMesh, VertId, VertId) {
        let mut m = TetMesh::new(Aabb::from_points([Point3::new(-1., -1., -1.), Point3::new(1., 1., 1.)]));
        let a = m.insert_point(Point3::new(0., 0., -0.5)).unwrap().vertex;
        let b = m.insert_point(Point3::new(0., 0., 0.5)).unwrap().vertex;
        for k in 0..n {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            m.insert_point(Point3::new(t.cos(), t.sin(), 0.0)).unwrap();
        }
        (m, a, b)
    }

    #[test]
    fn unit_right_tet_vertex() {
        let mut m = TetMesh::new(Aabb::from_points([Point3::ZERO, Point3::new(1., 1., 1.)]));
        for p in [Point3::ZERO, Point3::new(1., 0., 0.), Point3::new(0., 1., 0.), Point3::new(0., 0., 1.)] {
            m.insert_point(p).unwrap();
        }
        let t = m.solid_tets().next().unwrap();
        let v = m.voronoi_vertex(t);
        assert!(v.reliable);
        assert!(v.point.dist(Point3::new(0.5, 0.5, 0.5)) < 1e-12);
    }

    #[test]
    fn pentagon_ring_is_perpendicular() {
        let (m, a, b) = ring_mesh(5);
        let f = m.voronoi_face(a, b).unwrap();
        assert!(!f.unbounded);
        assert_eq!(f.polygon.len(), 5);
        for p in &f.polygon {
            assert!(p.z.abs() < 1e-9);
        }
    }

    #[test]
    fn hull_edge_is_unbounded() {
        let m = TetMesh::new(Aabb::from_points([Point3::ZERO, Point3::new(1., 1., 1.)]));
        let f = m.voronoi_face(0, 1).unwrap();
        assert!(f.unbounded);
        assert!(f.polygon.len() >= 3);
    }

    #[test]
    fn missing_edge_is_error() {
        let (m, a, _) = ring_mesh(5);
        assert!(m.voronoi_face(a, 999).is_err());
    }
}
