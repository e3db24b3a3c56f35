//! End-to-end acceptance run: one pass/fail line per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use common::{brute_delaunay, integer_insphere, integer_orient, random_points, rational_insphere, rational_orient};
use psmesh::delaunay::{TetMesh, VertId};
use psmesh::geometry::{Aabb, Point3};
use psmesh::io::write_vtk;
use psmesh::oracle::{load_complex, PiecewiseComplex};
use psmesh::predicates::{insphere, orient3d, Sign};
use psmesh::quality::{area_length, build_report, dihedral_angles, triangle_angles, volume_length};
use psmesh::refine::{audit, refine, Mode, RefineConfig, Refiner, SizingField, Status};
use psmesh::restricted::{RestrictedComplex, Strata};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn load(name: &str) -> PiecewiseComplex {
    load_complex(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)).unwrap()
}

/// Benchmark sizing: 15% of the largest box extent, the diameter for the
/// sphere.
fn sphere_h(g: &PiecewiseComplex) -> f64 {
    let e = g.bbox().extent();
    0.15 * e.x.max(e.y).max(e.z)
}

fn run(g: &PiecewiseComplex, h: f64, mode: Mode) -> Refiner {
    refine(g, RefineConfig::new(SizingField::uniform(h)).with_mode(mode)).unwrap()
}

fn check(ok: bool, pass: String, fail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(pass)
    } else {
        Err(fail())
    }
}

fn criterion_1_delaunay_oracle() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bbox = Aabb::from_points([Point3::ZERO, Point3::new(1., 1., 1.)]);
    let mut tets = 0;
    for i in 0..50 {
        let n = 5 + i * 115 / 49;
        loop {
            let mut m = TetMesh::new(bbox);
            for p in random_points(&mut rng, n) {
                m.insert_point(p).unwrap();
            }
            let ids: Vec<VertId> = (0..8).chain(m.vertices()).collect();
            let pts: Vec<Point3> = ids.iter().map(|&v| m.point(v)).collect();
            let b = brute_delaunay(&pts, 8);
            if b.ambiguous {
                continue;
            }
            let mut want: Vec<[VertId; 4]> = b
                .tets
                .iter()
                .map(|q| {
                    let mut v = q.map(|k| ids[k]);
                    v.sort_unstable();
                    v
                })
                .collect();
            want.sort_unstable();
            let got = m.solid_quads();
            if got != want {
                return Err(format!("set {i} (n = {n}): {} kernel tets vs {} brute-force", got.len(), want.len()));
            }
            tets += got.len();
            break;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    check(secs < 60.0, format!("50 sets, {tets} tets identical, {secs:.1} s"), || format!("took {secs:.1} s"))
}

fn ulp_nudge(x: f64, k: i64) -> f64 {
    if k >= 0 {
        (0..k).fold(x, |y, _| y.next_up())
    } else {
        (0..-k).fold(x, |y, _| y.next_down())
    }
}

/// Five points built to sit on or within a few ulps of a degenerate
/// configuration.
fn adversarial(rng: &mut ChaCha8Rng, k: usize) -> [Point3; 5] {
    let r = |rng: &mut ChaCha8Rng| Point3::new(rng.gen(), rng.gen(), rng.gen());
    match k % 5 {
        0 => {
            // nearly coplanar: affine combination rounded to floats
            let (a, b, c) = (r(rng), r(rng), r(rng));
            let (s, t): (f64, f64) = (rng.gen(), rng.gen());
            let d = a + (b - a) * s + (c - a) * t;
            [a, b, c, d, r(rng)]
        }
        1 => {
            // exactly coplanar on a dyadic lattice
            let z = rng.gen_range(-8..8) as f64 / 4.0;
            let mut p = [Point3::ZERO; 5];
            for q in &mut p {
                *q = Point3::new(rng.gen_range(-64..64) as f64 / 8.0, rng.gen_range(-64..64) as f64 / 8.0, z);
            }
            p[4].z = ulp_nudge(z, rng.gen_range(-2..=2));
            p
        }
        2 => {
            // cospherical lattice points with the query nudged by ulps
            let s = [
                Point3::new(3., 4., 0.),
                Point3::new(0., 3., 4.),
                Point3::new(4., 0., 3.),
                Point3::new(-5., 0., 0.),
                Point3::new(0., -4., -3.),
                Point3::new(0., 0., 5.),
            ];
            let o = Point3::new(rng.gen_range(-4..4) as f64, rng.gen_range(-4..4) as f64, 0.5);
            let mut p = [s[0] + o, s[1] + o, s[2] + o, s[3] + o, s[4 + k % 2] + o];
            p[4].x = ulp_nudge(p[4].x, rng.gen_range(-3..=3));
            p
        }
        3 => {
            // unit-sphere points rounded to floats: nearly cospherical
            let mut p = [Point3::ZERO; 5];
            for q in &mut p {
                let v = Point3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                *q = v.normalized().unwrap_or(Point3::new(1., 0., 0.));
            }
            p
        }
        _ => {
            // far from the origin with tiny, nearly collinear offsets
            let base = Point3::new(1e6, -1e6, 5e5);
            let d = Point3::new(1.0, 2.0, 3.0);
            let mut p = [Point3::ZERO; 5];
            for (i, q) in p.iter_mut().enumerate() {
                let t = i as f64 + rng.gen::<f64>() * 1e-9;
                *q = base + d * t + Point3::new(0.0, 0.0, rng.gen::<f64>() * 1e-10);
            }
            p
        }
    }
}

fn criterion_2_predicates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut cases, mut hard, mut zeros, mut errors, mut oracle_mismatch) = (0usize, 0usize, 0usize, 0usize, 0usize);
    for k in 0..100_000 {
        let p = if k < 1000 {
            hard += 1;
            adversarial(&mut rng, k)
        } else {
            let scale = [1.0, 1e-150, 1e150, 1e-300][k % 4];
            let v = random_points(&mut rng, 5);
            [v[0] * scale, v[1] * scale, v[2] * scale, v[3] * scale, v[4] * scale]
        };
        cases += 1;
        // the scaled-integer oracle decides every case; the rational one
        // double-checks it on all adversarial inputs and a stride of the rest
        let cross = k < 1000 || k % 50 == 0;
        let want = integer_orient(p[0], p[1], p[2], p[3]);
        if cross && rational_orient(p[0], p[1], p[2], p[3]) != want {
            oracle_mismatch += 1;
        }
        errors += usize::from(orient3d(p[0], p[1], p[2], p[3]) != want);
        if want == Sign::Zero {
            zeros += 1;
            continue;
        }
        let (a, b) = if want == Sign::Negative { (p[1], p[0]) } else { (p[0], p[1]) };
        let want = integer_insphere(a, b, p[2], p[3], p[4]);
        if cross && rational_insphere(a, b, p[2], p[3], p[4]) != want {
            oracle_mismatch += 1;
        }
        zeros += usize::from(want == Sign::Zero);
        errors += usize::from(insphere(a, b, p[2], p[3], p[4]) != want);
    }
    if oracle_mismatch > 0 {
        return Err(format!("the two exact oracles disagree on {oracle_mismatch} cases"));
    }
    check(errors == 0, format!("{cases} cases ({hard} adversarial, {zeros} exact zeros), 0 sign errors"), || {
        format!("{errors} sign errors in {cases} cases")
    })
}

fn criterion_3_sphere() -> Outcome {
    let g = load("icosphere.psc");
    let h = sphere_h(&g);
    let mut lines = Vec::new();
    for mode in [Mode::Classical, Mode::Frontal] {
        let t = Instant::now();
        let r = run(&g, h, mode);
        let secs = t.elapsed().as_secs_f64();
        let rep = audit(&r);
        let names = [
            "surface_radius_edge",
            "surface_min_angle",
            "volume_radius_edge",
            "surface_error",
            "volume_length",
            "closed_manifold",
            "euler_characteristic",
        ];
        let missing: Vec<&str> = names.iter().copied().filter(|n| rep.get(n).is_none()).collect();
        let failed: Vec<&str> = rep.failures().map(|c| c.name).collect();
        let chi = rep.get("euler_characteristic").map_or(f64::NAN, |c| c.worst);
        let angle = rep.get("surface_min_angle").map_or(f64::NAN, |c| c.worst);
        if r.status() != Some(Status::Converged) || !missing.is_empty() || !failed.is_empty() || chi != 2.0 || secs >= 30.0
            || !(angle >= 23.5)
        {
            return Err(format!(
                "{mode:?}: status {:?}, missing {missing:?}, failed {failed:?}, chi {chi}, {secs:.1} s",
                r.status()
            ));
        }
        lines.push(format!("{mode:?} {} vertices, min angle {angle:.2} deg, chi 2, {secs:.2} s", r.mesh().num_vertices()));
    }
    Ok(format!("h = {h}; {}", lines.join("; ")))
}

/// Mesh vertex for each input vertex that was seeded into the triangulation.
fn seeds(r: &Refiner) -> BTreeMap<usize, VertId> {
    r.seeded_vertices().map(|(m, i)| (i, m)).collect()
}

fn criterion_4_cube() -> Outcome {
    let g = load("cube.psc");
    for mode in [Mode::Classical, Mode::Frontal] {
        let r = run(&g, 0.2, mode);
        let gg = r.geometry();
        let rc = r.restricted();
        let seeded = seeds(&r);
        let corners: Vec<usize> = (0..gg.vertices().len()).filter(|&v| gg.curve_degree(v as _) == 3).collect();
        if corners.len() != 8 {
            return Err(format!("{mode:?}: {} input corners", corners.len()));
        }
        for &c in &corners {
            let Some(&mv) = seeded.get(&c) else { return Err(format!("{mode:?}: corner {c} not seeded")) };
            if r.mesh().point(mv) != gg.vertex(c as _) || rc.edges_at(mv).len() != 3 {
                return Err(format!("{mode:?}: corner {c} has {} curve edges", rc.edges_at(mv).len()));
            }
        }
        let mut ends: BTreeMap<u32, BTreeMap<usize, usize>> = BTreeMap::new();
        for s in gg.segments() {
            for v in s.v {
                *ends.entry(s.curve).or_default().entry(v).or_default() += 1;
            }
        }
        if ends.len() != 12 {
            return Err(format!("{mode:?}: {} crease curves", ends.len()));
        }
        for (curve, deg) in &ends {
            let want: BTreeSet<VertId> = deg.iter().filter(|(_, &d)| d == 1).map(|(v, _)| seeded[v]).collect();
            let edges: Vec<[VertId; 2]> = rc.edges().values().filter(|e| e.curve == *curve).map(|e| e.edge).collect();
            let mut vdeg: BTreeMap<VertId, usize> = BTreeMap::new();
            for e in &edges {
                for v in e {
                    *vdeg.entry(*v).or_default() += 1;
                }
            }
            let got: BTreeSet<VertId> = vdeg.iter().filter(|(_, &d)| d == 1).map(|(&v, _)| v).collect();
            let path = vdeg.values().all(|&d| d <= 2) && edges.len() + 1 == vdeg.len() && connected(&edges);
            if got != want || !path || want.len() != 2 {
                return Err(format!("{mode:?}: curve {curve} is not a path between its corners"));
            }
        }
        let failed: Vec<&str> = audit(&r).failures().map(|c| c.name).collect();
        if r.status() != Some(Status::Converged) || !failed.is_empty() {
            return Err(format!("{mode:?}: status {:?}, failed {failed:?}", r.status()));
        }
    }
    Ok("8 corners, 12 crease paths with correct endpoints, all certificates, both modes".into())
}

fn connected(edges: &[[VertId; 2]]) -> bool {
    let Some(first) = edges.first() else { return false };
    let mut seen: BTreeSet<VertId> = BTreeSet::from([first[0]]);
    let mut grew = true;
    while grew {
        grew = false;
        for e in edges {
            if seen.contains(&e[0]) != seen.contains(&e[1]) {
                seen.extend(e);
                grew = true;
            }
        }
    }
    edges.iter().all(|e| seen.contains(&e[0]))
}

fn criterion_5_wedge() -> Outcome {
    let g = load("wedge.psc");
    let mut worst: f64 = 0.0;
    for mode in [Mode::Classical, Mode::Frontal] {
        let r = run(&g, 0.1, mode);
        if r.status() != Some(Status::Converged) {
            return Err(format!("{mode:?}: did not converge"));
        }
        if r.collars().len() != 1 {
            return Err(format!("{mode:?}: {} collars", r.collars().len()));
        }
        let c = &r.collars()[0];
        let (d0, d1) = (c.apex_point.dist(c.wings[0]), c.apex_point.dist(c.wings[1]));
        let rel = (d0 - d1).abs() / d0.max(d1);
        worst = worst.max(rel);
        if rel > 1e-9 {
            return Err(format!("{mode:?}: wing distances {d0} and {d1}"));
        }
        let kept = r.protected_edges().iter().filter(|k| r.restricted().edge(k).is_some()).count();
        if r.protected_edges().len() != 2 || kept != 2 {
            return Err(format!("{mode:?}: {kept} of {} protected edges kept", r.protected_edges().len()));
        }
    }
    Ok(format!("one collar, wing mismatch {worst:.1e}, both protected edges kept, terminates in both modes"))
}

fn criterion_6_frontal_vs_classical() -> Outcome {
    let g = load("icosphere.psc");
    let h = sphere_h(&g);
    let stats = |mode| {
        let r = run(&g, h, mode);
        let q = build_report(r.mesh(), r.restricted(), &|p| r.config().h(p), 0.0);
        (q.length_deviation.median, r.mesh().num_vertices())
    };
    let (dc, nc) = stats(Mode::Classical);
    let (df, nf) = stats(Mode::Frontal);
    let line = format!("median |h_r - 1|: frontal {df:.4} vs classical {dc:.4}; vertices {nf} vs {nc}");
    check(df <= dc && nf as f64 <= 1.05 * nc as f64, line.clone(), || line)
}

/// Step name, point, watched curve and surface, expected curve flag.
type Case = (&'static str, Point3, bool, bool, bool);

/// Points that force a rollback, each with the curve flag it should report.
fn scripted_points(rng: &mut ChaCha8Rng) -> Vec<Case> {
    let mut out = Vec::new();
    for _ in 0..10 {
        let t: f64 = rng.gen_range(0.15..0.85);
        let off: f64 = rng.gen_range(0.01..0.03);
        // tet step, inside the cube next to the edge y = z = 0
        out.push(("7c", Point3::new(t, off, off * 0.8), true, true, true));
        // triangle step, on the face z = 0 next to the edge y = 0
        out.push(("5b", Point3::new(t, off, 0.0), true, false, true));
    }
    out
}

fn sphere_points(rng: &mut ChaCha8Rng) -> Vec<Case> {
    (0..10)
        .map(|_| {
            let v = Point3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let p = v.normalized().unwrap() * rng.gen_range(0.97..0.99);
            ("7d", p, true, true, false)
        })
        .collect()
}

fn criterion_7_rollback() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tally: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut problems = Vec::new();
    for (name, h, pts) in [("cube.psc", 0.25, scripted_points(&mut rng)), ("icosphere.psc", 0.3, sphere_points(&mut rng))] {
        let g = load(name);
        for (step, p, watch_curve, watch_surface, curve) in pts {
            // each case starts from the same converged mesh
            let mut r = run(&g, h, Mode::Classical);
            let rec = r.insert_scripted(p, watch_curve, watch_surface).unwrap();
            let e = tally.entry(step).or_default();
            e.0 += 1;
            match rec {
                Some(rec) if rec.curve == curve && rec.inverse_delta && rec.restored => e.1 += 1,
                other => problems.push(format!("{step} at {p:?}: {other:?}")),
            }
            let fresh = RestrictedComplex::build(r.mesh(), r.geometry(), Strata::for_complex(r.geometry()));
            if fresh != *r.restricted() {
                problems.push(format!("{step} at {p:?}: complex differs from a rebuild"));
            }
        }
    }
    let summary: Vec<String> = tally.iter().map(|(s, (n, ok))| format!("{s} {ok}/{n}")).collect();
    check(problems.is_empty(), format!("exact restores: {}", summary.join(", ")), || {
        format!("{}; {}", summary.join(", "), problems.join("; "))
    })
}

fn criterion_8_metric_anchors() -> Outcome {
    let s3 = 3f64.sqrt();
    let (a, b, c) = (Point3::ZERO, Point3::new(1., 0., 0.), Point3::new(0.5, s3 / 2.0, 0.));
    let d = Point3::new(0.5, s3 / 6.0, (2.0f64 / 3.0).sqrt());
    let al = area_length(a, b, c);
    let vl = volume_length(a, b, c, d);
    let dih = dihedral_angles(a, b, c, d).unwrap();
    let ang = triangle_angles(a, b, c).unwrap();
    let want = (1.0f64 / 3.0).acos().to_degrees();
    let dih_err = dih.iter().map(|x| (x - want).abs()).fold(0.0, f64::max);
    let ang_err = ang.iter().map(|x| (x - 60.0).abs()).fold(0.0, f64::max);
    let ok = (al - 1.0).abs() <= 1e-12 && (vl - 1.0).abs() <= 1e-12 && (dih[0] - 70.53).abs() <= 0.01 && dih_err <= 1e-9
        && ang_err <= 1e-12;
    let line = format!("a = {al}, v = {vl}, dihedral {:.4}, angle error {ang_err:.1e}", dih[0]);
    check(ok, line.clone(), || line)
}

fn outputs(g: &PiecewiseComplex, h: f64, mode: Mode) -> (String, String) {
    let r = run(g, h, mode);
    let q = build_report(r.mesh(), r.restricted(), &|p| r.config().h(p), 0.0);
    let doc = serde_json::json!({ "stats": r.stats(), "audit": audit(&r), "quality": q });
    (write_vtk(r.mesh(), r.restricted(), "run"), doc.to_string())
}

fn criterion_9_determinism() -> Outcome {
    let mut n = 0;
    for (name, h) in [("icosphere.psc", 0.3), ("cube.psc", 0.2), ("wedge.psc", 0.1)] {
        let g = load(name);
        for mode in [Mode::Classical, Mode::Frontal] {
            let first = outputs(&g, h, mode);
            if first != outputs(&g, h, mode) {
                return Err(format!("{name} {mode:?} differs between runs"));
            }
            n += 1;
        }
    }
    Ok(format!("{n} benchmark runs byte-identical (mesh and report)"))
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("1 delaunay oracle", criterion_1_delaunay_oracle),
        ("2 predicate exactness", criterion_2_predicates),
        ("3 sphere benchmark", criterion_3_sphere),
        ("4 cube benchmark", criterion_4_cube),
        ("5 sharp wedge", criterion_5_wedge),
        ("6 frontal vs classical", criterion_6_frontal_vs_classical),
        ("7 rollback exactness", criterion_7_rollback),
        ("8 metric anchors", criterion_8_metric_anchors),
        ("9 determinism", criterion_9_determinism),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("criterion {name}: PASS ({msg}) [{secs:.1} s]"),
            Err(msg) => {
                println!("criterion {name}: FAIL ({msg}) [{secs:.1} s]");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
