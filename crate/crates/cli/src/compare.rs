use std::fmt::Write;

use anyhow::Result;
use psmesh::quality::Summary;
use psmesh::refine::{Mode, Status};
use serde::Serialize;

use crate::args::Cli;
use crate::run::{load_input, mesh, to_json, write, Outcome};

#[derive(Debug, Clone, Serialize)]
pub struct ModeSummary {
    pub mode: Mode,
    pub status: Status,
    pub vertices: usize,
    pub curve_edges: usize,
    pub surface_tris: usize,
    pub volume_tets: usize,
    pub area_length: Summary,
    pub volume_length: Summary,
    pub tri_angles: Summary,
    pub relative_length: Summary,
    pub length_deviation: Summary,
    pub audit_passed: bool,
    /// Wall-clock seconds; printed but not serialised.
    #[serde(skip)]
    pub seconds: f64,
}

impl ModeSummary {
    fn of(o: &Outcome) -> ModeSummary {
        let q = &o.quality;
        let t = o.refiner.timings();
        ModeSummary {
            mode: o.refiner.config().mode,
            status: o.status,
            vertices: q.vertices,
            curve_edges: q.curve_edges,
            surface_tris: q.surface_tris,
            volume_tets: q.volume_tets,
            area_length: q.area_length.summary.clone(),
            volume_length: q.volume_length.summary.clone(),
            tri_angles: q.tri_angles.summary.clone(),
            relative_length: q.relative_length.summary.clone(),
            length_deviation: q.length_deviation.clone(),
            audit_passed: o.audit.passed(),
            seconds: t.sampling + t.protection + t.refinement,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub classical: ModeSummary,
    pub frontal: ModeSummary,
}

/// Runs both modes with otherwise identical settings.
pub fn compare_modes(cli: &Cli) -> Result<Comparison> {
    let g = load_input(&cli.input)?;
    let cfg = cli.config(g.bbox())?;
    let classical = ModeSummary::of(&mesh(&g, cfg.clone().with_mode(Mode::Classical))?);
    let frontal = ModeSummary::of(&mesh(&g, cfg.with_mode(Mode::Frontal))?);
    Ok(Comparison { classical, frontal })
}

pub fn table(c: &Comparison) -> String {
    let mut s = String::new();
    writeln!(s, "{:<24} {:>14} {:>14}", "", "classical", "frontal").unwrap();
    let (a, b) = (&c.classical, &c.frontal);
    let mut row = |name: &str, x: String, y: String| writeln!(s, "{name:<24} {x:>14} {y:>14}").unwrap();
    row("status", format!("{:?}", a.status), format!("{:?}", b.status));
    for (name, x, y) in [
        ("vertices", a.vertices, b.vertices),
        ("curve edges", a.curve_edges, b.curve_edges),
        ("surface triangles", a.surface_tris, b.surface_tris),
        ("tetrahedra", a.volume_tets, b.volume_tets),
    ] {
        row(name, x.to_string(), y.to_string());
    }
    for (name, x, y) in [
        ("a mean", a.area_length.mean, b.area_length.mean),
        ("a median", a.area_length.median, b.area_length.median),
        ("v mean", a.volume_length.mean, b.volume_length.mean),
        ("v median", a.volume_length.median, b.volume_length.median),
        ("theta min (deg)", a.tri_angles.min, b.tri_angles.min),
        ("theta mean (deg)", a.tri_angles.mean, b.tri_angles.mean),
        ("h_r mean", a.relative_length.mean, b.relative_length.mean),
        ("h_r median", a.relative_length.median, b.relative_length.median),
        ("|h_r - 1| median", a.length_deviation.median, b.length_deviation.median),
        ("time (s)", a.seconds, b.seconds),
    ] {
        row(name, format!("{x:.4}"), format!("{y:.4}"));
    }
    row("audit", pass(a.audit_passed).into(), pass(b.audit_passed).into());
    s
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Prints the table and writes the comparison document if requested.
pub fn run_compare(cli: &Cli) -> Result<Status> {
    let c = compare_modes(cli)?;
    print!("{}", table(&c));
    if let Some(path) = &cli.report {
        write(path, &to_json(&c))?;
    }
    let done = c.classical.status == Status::Converged && c.frontal.status == Status::Converged;
    Ok(if done { Status::Converged } else { Status::PointLimit })
}
