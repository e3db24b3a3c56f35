use std::collections::BTreeMap;

use proptest::prelude::*;
use psmesh::delaunay::{TetMesh, VertId};
use psmesh::geometry::Point3;
use psmesh::oracle::PiecewiseComplex;
use psmesh::restricted::{RestrictedComplex, Strata};
use psmesh::shapes::{icosphere, unit_cube};

fn mesh_vertices(g: &PiecewiseComplex, ids: &[usize]) -> (TetMesh, Vec<VertId>) {
    let mut m = TetMesh::new(g.bbox());
    let v = ids.iter().map(|&i| m.insert_point(g.vertex(i)).unwrap().vertex).collect();
    (m, v)
}

fn euler(rc: &RestrictedComplex) -> i64 {
    let mut edges: BTreeMap<[VertId; 2], usize> = BTreeMap::new();
    for t in rc.tris().keys() {
        for e in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
            *edges.entry(e).or_default() += 1;
        }
    }
    assert!(edges.values().all(|&c| c == 2), "restricted surface not closed");
    rc.surface_vertices().count() as i64 - edges.len() as i64 + rc.tris().len() as i64
}

#[test]
fn dense_sphere_sample_gives_closed_sphere() {
    let g = icosphere(3, 1.0);
    // the level-2 vertices are the first 162 of level 3
    let ids: Vec<usize> = (0..162).collect();
    let (m, _) = mesh_vertices(&g, &ids);
    let rc = RestrictedComplex::build(&m, &g, Strata::for_complex(&g));
    assert_eq!(euler(&rc), 2);
    for t in rc.tris().values() {
        assert!(g.distance_to_surface(t.centre) < 1e-9);
        for &v in &t.tri {
            assert!((m.point(v).dist(t.centre) - t.radius).abs() < 1e-9 * t.radius.max(1.0));
        }
    }
    assert!(!rc.tets().is_empty());
    for t in rc.tets().values() {
        assert!(g.point_in_volume(t.centre).unwrap());
    }
}

#[test]
fn cube_corners_and_edge_midpoints_restrict_to_cube_edges() {
    let g = unit_cube();
    let mut m = TetMesh::new(g.bbox());
    for i in 0..8 {
        m.insert_point(g.vertex(i)).unwrap();
    }
    for s in 0..g.segments().len() {
        let (a, b) = g.segment_points(s);
        m.insert_point(a.midpoint(b)).unwrap();
    }
    let rc = RestrictedComplex::build(&m, &g, Strata::for_complex(&g));
    assert_eq!(rc.edges().len(), 24);
    for e in rc.edges().values() {
        let (a, b) = (m.point(e.edge[0]), m.point(e.edge[1]));
        assert!((a.dist(b) - 0.5).abs() < 1e-12);
        assert!(e.err < 1e-9);
    }
}

fn unit_sphere_point(rng: &mut impl FnMut() -> f64) -> Point3 {
    loop {
        let p = Point3::new(rng() * 2. - 1., rng() * 2. - 1., rng() * 2. - 1.);
        if let Some(n) = p.normalized() {
            if p.norm() <= 1.0 {
                return n * 1.3;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn incremental_update_matches_rebuild(seed in any::<u64>(), k in 5usize..40) {
        let g = icosphere(2, 1.0);
        let mut state = seed | 1;
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let ids: Vec<usize> = (0..12).collect();
        let (mut m, _) = mesh_vertices(&g, &ids);
        let strata = Strata::for_complex(&g);
        let mut rc = RestrictedComplex::build(&m, &g, strata);
        for _ in 0..k {
            let p = if rnd() < 0.5 {
                let i = (rnd() * g.vertices().len() as f64) as usize;
                g.vertex(i.min(g.vertices().len() - 1))
            } else {
                unit_sphere_point(&mut rnd) * rnd()
            };
            let ins = m.insert_point(p).unwrap();
            if ins.duplicate {
                continue;
            }
            let before = rc.clone();
            rc.update(&m, &g, &ins.change);
            if rnd() < 0.3 {
                let undo = m.undo_last_insert().unwrap();
                rc.update(&m, &g, &undo);
                prop_assert_eq!(&rc, &before);
            }
        }
        let fresh = RestrictedComplex::build(&m, &g, strata);
        prop_assert_eq!(rc.edges(), fresh.edges());
        prop_assert_eq!(rc.tris(), fresh.tris());
        prop_assert_eq!(rc.tets().keys().collect::<Vec<_>>(), fresh.tets().keys().collect::<Vec<_>>());
    }
}
