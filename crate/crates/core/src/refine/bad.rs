use super::RefineConfig;
use crate::geometry::Point3;
use crate::quality::volume_length;
use crate::restricted::{ball_edge_ratio, element_size, radius_edge, RestrictedEdge, RestrictedTet, RestrictedTri};

/// Surface-ball radius over shortest edge.
pub fn rho_2(f: &RestrictedTri, pts: &[Point3; 3]) -> f64 {
    ball_edge_ratio(f.radius, pts)
}

pub fn rho_3(pts: &[Point3; 4]) -> f64 {
    radius_edge(pts)
}

pub fn bad_simplex_1(e: &RestrictedEdge, cfg: &RefineConfig) -> bool {
    let h = cfg.h(e.centre);
    e.err > cfg.eps_rel * h || element_size(1, e.radius) > cfg.alpha * h
}

pub fn bad_simplex_2(f: &RestrictedTri, pts: &[Point3; 3], cfg: &RefineConfig) -> bool {
    let h = cfg.h(f.centre);
    f.err > cfg.eps_rel * h || element_size(2, f.radius) > cfg.alpha * h || rho_2(f, pts) > cfg.rho_surf
}

pub fn bad_simplex_3(t: &RestrictedTet, pts: &[Point3; 4], cfg: &RefineConfig) -> bool {
    let h = cfg.h(t.centre);
    element_size(3, t.radius) > cfg.alpha * h
        || rho_3(pts) > cfg.rho_vol
        || volume_length(pts[0], pts[1], pts[2], pts[3]) <= cfg.vlen_min
}
