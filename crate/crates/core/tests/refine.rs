mod common;

use std::path::Path;

use common::circumball_empty;
use psmesh::geometry::Point3;
use psmesh::oracle::{load_complex, PiecewiseComplex};
use psmesh::refine::{audit, refine, Mode, RefineConfig, Refiner, SizingField, SizingGrid, Status};
use psmesh::restricted::{RestrictedComplex, Strata};

fn load(name: &str) -> PiecewiseComplex {
    load_complex(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)).unwrap()
}

fn run(g: &PiecewiseComplex, h: f64, mode: Mode) -> Refiner {
    refine(g, RefineConfig::new(SizingField::uniform(h)).with_mode(mode)).unwrap()
}

fn failures(r: &Refiner) -> Vec<&'static str> {
    audit(r).failures().map(|c| c.name).collect()
}

#[test]
fn sphere_converges_in_both_modes() {
    let g = load("icosphere.psc");
    for mode in [Mode::Classical, Mode::Frontal] {
        let r = run(&g, 0.3, mode);
        assert_eq!(r.status(), Some(Status::Converged));
        assert_eq!(failures(&r), Vec::<&str>::new(), "{mode:?}");
        assert!(r.restricted().edges().is_empty());
        assert!(r.restricted().tets().len() > r.restricted().tris().len());
    }
}

#[test]
fn cube_converges_in_both_modes() {
    let g = load("cube.psc");
    for mode in [Mode::Classical, Mode::Frontal] {
        let r = run(&g, 0.2, mode);
        assert_eq!(r.status(), Some(Status::Converged));
        assert_eq!(failures(&r), Vec::<&str>::new(), "{mode:?}");
    }
}

#[test]
fn restricted_vertices_lie_on_their_strata() {
    let g = load("cube.psc");
    let r = run(&g, 0.25, Mode::Frontal);
    let tol = 1e-9 * g.bbox().diagonal();
    let m = r.mesh();
    for v in r.restricted().curve_vertices() {
        assert!(g.distance_to_curves(m.point(v)) <= tol, "curve vertex {v}");
    }
    for v in r.restricted().surface_vertices() {
        assert!(g.distance_to_surface(m.point(v)) <= tol, "surface vertex {v}");
    }
}

#[test]
fn final_triangulation_is_delaunay() {
    let g = load("icosphere.psc");
    let r = run(&g, 0.4, Mode::Classical);
    let m = r.mesh();
    m.check().unwrap();
    let pts: Vec<Point3> = (0..8).chain(m.vertices()).map(|v| m.point(v)).collect();
    for t in m.solid_tets() {
        let [a, b, c, d] = m.tet_points(t);
        assert!(circumball_empty([a, b, c, d], &pts));
    }
}

#[test]
fn incremental_complex_matches_rebuild() {
    for (name, h) in [("icosphere.psc", 0.35), ("cube.psc", 0.25), ("wedge.psc", 0.1)] {
        let g = load(name);
        let r = run(&g, h, Mode::Frontal);
        let fresh = RestrictedComplex::build(r.mesh(), &g, Strata::for_complex(&g));
        assert!(fresh == *r.restricted(), "{name}");
    }
}

#[test]
fn graded_sizing_grades_the_mesh() {
    let g = load("icosphere.psc");
    let grid = SizingGrid::new(Point3::new(-1.5, -1.5, -1.5), Point3::new(3.0, 3.0, 3.0), [2, 2, 2], vec![
        0.15, 0.6, 0.15, 0.6, 0.15, 0.6, 0.15, 0.6,
    ])
    .unwrap();
    let r = refine(&g, RefineConfig::new(SizingField::Gridded { grid })).unwrap();
    assert_eq!(r.status(), Some(Status::Converged));
    let m = r.mesh();
    let (mut left, mut right) = (0, 0);
    for v in r.restricted().surface_vertices() {
        if m.point(v).x < 0.0 {
            left += 1;
        } else {
            right += 1;
        }
    }
    assert!(left > 2 * right, "left {left}, right {right}");
}

#[test]
fn point_limit_stops_early() {
    let g = load("cube.psc");
    let mut cfg = RefineConfig::new(SizingField::uniform(0.1));
    cfg.max_points = 40;
    let r = refine(&g, cfg).unwrap();
    assert_eq!(r.status(), Some(Status::PointLimit));
    assert!(r.point_count() >= 40 && r.point_count() < 60);
}

#[test]
fn wedge_keeps_its_collar() {
    let g = load("wedge.psc");
    let r = run(&g, 0.1, Mode::Classical);
    assert_eq!(r.status(), Some(Status::Converged));
    assert_eq!(r.collars().len(), 1);
    assert_eq!(r.protected_edges().len(), 2);
    for k in r.protected_edges() {
        assert!(r.restricted().edge(k).is_some());
    }
    let rep = audit(&r);
    for name in ["curve_error", "curve_size", "curve_disks", "surface_disks", "protected_edges"] {
        assert_eq!(rep.get(name).unwrap().violations, 0, "{name}");
    }
}

#[test]
fn invalid_configs_are_refused() {
    let g = load("cube.psc");
    let mut cfg = RefineConfig::new(SizingField::uniform(0.2));
    cfg.vlen_min = 0.4;
    assert!(Refiner::new(&g, cfg).is_err());
    let cfg = RefineConfig::new(SizingField::uniform(0.0));
    assert!(Refiner::new(&g, cfg).is_err());
}
