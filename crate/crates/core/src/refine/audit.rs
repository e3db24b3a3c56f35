use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::driver::Refiner;
use super::{rho_2, rho_3};
use crate::delaunay::VertId;
use crate::quality::{triangle_angles, volume_length};
use crate::restricted::{element_size, fan_components, topo_disk_1, topo_disk_2};

/// One checked property of the final mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// Extreme value seen, in the units of the bound.
    pub worst: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub certificates: Vec<Certificate>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.violations == 0)
    }

    pub fn get(&self, name: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Certificate> {
        self.certificates.iter().filter(|c| c.violations > 0)
    }
}

struct Tally {
    cert: Certificate,
    upper: bool,
}

impl Tally {
    fn upper(name: &'static str, bound: f64) -> Tally {
        Tally { cert: Certificate { name, checked: 0, violations: 0, worst: f64::NEG_INFINITY, bound }, upper: true }
    }

    fn lower(name: &'static str, bound: f64) -> Tally {
        Tally { cert: Certificate { name, checked: 0, violations: 0, worst: f64::INFINITY, bound }, upper: false }
    }

    /// Records `x` against the bound; `ok` is the exact acceptance test.
    fn add(&mut self, x: f64, ok: bool) {
        self.cert.checked += 1;
        self.cert.violations += usize::from(!ok);
        self.cert.worst = if self.upper { self.cert.worst.max(x) } else { self.cert.worst.min(x) };
    }

    fn done(self) -> Certificate {
        self.cert
    }
}

fn flag(name: &'static str, checked: usize, violations: usize) -> Certificate {
    Certificate { name, checked, violations, worst: violations as f64, bound: 0.0 }
}

/// Surface Euler characteristic of the input triangles.
fn input_euler(r: &Refiner) -> i64 {
    let g = r.geometry();
    let mut verts = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for t in g.triangles() {
        verts.extend(t.v);
        for i in 0..3 {
            let (a, b) = (t.v[i], t.v[(i + 1) % 3]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    verts.len() as i64 - edges.len() as i64 + g.triangles().len() as i64
}

/// Checks every quality and topology guarantee on the current mesh.
pub fn audit(r: &Refiner) -> AuditReport {
    let cfg = r.config();
    let rc = r.restricted();
    let m = r.mesh();
    let mut out = Vec::new();

    let mut eps1 = Tally::upper("curve_error", cfg.eps_rel);
    let mut size1 = Tally::upper("curve_size", cfg.alpha);
    for e in rc.edges().values() {
        let h = cfg.h(e.centre);
        eps1.add(e.err / h, e.err <= cfg.eps_rel * h);
        let s = element_size(1, e.radius);
        size1.add(s / h, s <= cfg.alpha * h);
    }
    out.extend([eps1.done(), size1.done()]);

    let min_angle = (0.5 / cfg.rho_surf).asin().to_degrees();
    let mut r2 = Tally::upper("surface_radius_edge", cfg.rho_surf);
    let mut ang = Tally::lower("surface_min_angle", min_angle);
    let mut eps2 = Tally::upper("surface_error", cfg.eps_rel);
    let mut size2 = Tally::upper("surface_size", cfg.alpha);
    for f in rc.tris().values() {
        let pts = f.tri.map(|v| m.point(v));
        let rho = rho_2(f, &pts);
        r2.add(rho, rho <= cfg.rho_surf);
        let a = triangle_angles(pts[0], pts[1], pts[2]).map_or(0.0, |a| a.into_iter().fold(180.0, f64::min));
        ang.add(a, a >= min_angle);
        let h = cfg.h(f.centre);
        eps2.add(f.err / h, f.err <= cfg.eps_rel * h);
        let s = element_size(2, f.radius);
        size2.add(s / h, s <= cfg.alpha * h);
    }
    out.extend([r2.done(), ang.done(), eps2.done(), size2.done()]);

    if rc.strata().volume {
        let mut r3 = Tally::upper("volume_radius_edge", cfg.rho_vol);
        let mut vl = Tally::lower("volume_length", cfg.vlen_min);
        let mut size3 = Tally::upper("volume_size", cfg.alpha);
        for t in rc.tets().values() {
            let pts = t.verts.map(|v| m.point(v));
            let rho = rho_3(&pts);
            r3.add(rho, rho <= cfg.rho_vol);
            let v = volume_length(pts[0], pts[1], pts[2], pts[3]);
            vl.add(v, v > cfg.vlen_min);
            let h = cfg.h(t.centre);
            let s = element_size(3, t.radius);
            size3.add(s / h, s <= cfg.alpha * h);
        }
        out.extend([r3.done(), vl.done(), size3.done()]);
    }

    let curve_verts: Vec<VertId> = rc.curve_vertices().collect();
    let bad1 = curve_verts.iter().filter(|&&v| topo_disk_1(&rc.edges_at(v), &r.expectation(v)).is_some()).count();
    out.push(flag("curve_disks", curve_verts.len(), bad1));
    let surf_verts: Vec<VertId> = rc.surface_vertices().collect();
    let bad2 = surf_verts
        .iter()
        .filter(|&&v| topo_disk_2(v, &rc.tris_at(v), |k| rc.edge(&k).is_some(), &r.expectation(v)).is_some())
        .count();
    out.push(flag("surface_disks", surf_verts.len(), bad2));

    if r.geometry().is_closed() {
        let mut edge_use: BTreeMap<[VertId; 2], usize> = BTreeMap::new();
        for k in rc.tris().keys() {
            for e in [[k[0], k[1]], [k[0], k[2]], [k[1], k[2]]] {
                *edge_use.entry(e).or_default() += 1;
            }
        }
        let open_edges = edge_use.values().filter(|&&n| n != 2).count();
        let bad_links = surf_verts
            .iter()
            .filter(|&&v| {
                let tris: Vec<[VertId; 3]> = rc.tris_at(v).into_iter().map(|f| f.tri).collect();
                let fans = fan_components(v, &tris);
                fans.len() != 1 || !fans[0].closed
            })
            .count();
        out.push(flag("closed_manifold", edge_use.len() + surf_verts.len(), open_edges + bad_links));
        let chi = surf_verts.len() as i64 - edge_use.len() as i64 + rc.tris().len() as i64;
        let want = input_euler(r);
        out.push(Certificate {
            name: "euler_characteristic",
            checked: 1,
            violations: usize::from(chi != want),
            worst: chi as f64,
            bound: want as f64,
        });
    }

    let missing = r.protected_edges().iter().filter(|k| rc.edge(k).is_none()).count();
    out.push(flag("protected_edges", r.protected_edges().len(), missing));
    AuditReport { certificates: out }
}
