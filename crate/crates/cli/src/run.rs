use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use psmesh::io::write_vtk;
use psmesh::oracle::{load_complex, PiecewiseComplex};
use psmesh::quality::{build_report, QualityReport};
use psmesh::refine::{
    audit, check_termination_bounds, AuditReport, Mode, RefineConfig, RefineStats, Refiner, Status, TerminationBounds,
};
use serde::Serialize;

use crate::args::{Cli, Paths};

/// A finished refinement with its measurements.
pub struct Outcome {
    pub refiner: Refiner,
    pub status: Status,
    pub quality: QualityReport,
    pub audit: AuditReport,
    pub bounds: TerminationBounds,
    pub reporting: f64,
}

pub fn load_input(path: &Path) -> Result<PiecewiseComplex> {
    load_complex(path).with_context(|| format!("cannot load input {}", path.display()))
}

pub fn mesh(g: &PiecewiseComplex, cfg: RefineConfig) -> Result<Outcome> {
    let bounds = check_termination_bounds(g, &cfg);
    let mut refiner = Refiner::new(g, cfg).context("setting up refinement")?;
    let status = refiner.run().context("refining")?;
    let t = Instant::now();
    let cfg = refiner.config().clone();
    let quality = build_report(refiner.mesh(), refiner.restricted(), &|p| cfg.h(p), refiner.timings().refinement);
    let audit = audit(&refiner);
    Ok(Outcome { refiner, status, quality, audit, bounds, reporting: t.elapsed().as_secs_f64() })
}

/// The report document. It carries no paths or timings, so identical runs
/// give identical files.
#[derive(Serialize)]
struct Report<'a> {
    status: Status,
    mode: Mode,
    stats: &'a RefineStats,
    termination_bounds: &'a TerminationBounds,
    audit_passed: bool,
    audit: &'a AuditReport,
    quality: &'a QualityReport,
}

#[derive(Serialize)]
struct Outputs<'a> {
    mesh: &'a Path,
    report: &'a Path,
    manifest: &'a Path,
}

#[derive(Serialize)]
struct Timings {
    sampling: f64,
    protection: f64,
    refinement: f64,
    reporting: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    input: &'a Path,
    outputs: Outputs<'a>,
    seed: u64,
    mode: Mode,
    status: Status,
    config: &'a RefineConfig,
    timings: Timings,
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialise");
    s.push('\n');
    s
}

/// Meshes one input and writes mesh, report and manifest.
pub fn run(cli: &Cli) -> Result<Status> {
    let paths: Paths = cli.paths();
    let g = load_input(&paths.input)?;
    let cfg = cli.config(g.bbox())?;
    let out = mesh(&g, cfg)?;
    let r = &out.refiner;
    let title = format!("psmesh {} mesh", if r.config().mode == Mode::Frontal { "frontal" } else { "classical" });
    write(&paths.output, &write_vtk(r.mesh(), r.restricted(), &title))?;
    let report = Report {
        status: out.status,
        mode: r.config().mode,
        stats: r.stats(),
        termination_bounds: &out.bounds,
        audit_passed: out.audit.passed(),
        audit: &out.audit,
        quality: &out.quality,
    };
    write(&paths.report, &to_json(&report))?;
    let t = r.timings();
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        input: &paths.input,
        outputs: Outputs { mesh: &paths.output, report: &paths.report, manifest: &paths.manifest },
        seed: r.config().seed,
        mode: r.config().mode,
        status: out.status,
        config: r.config(),
        timings: Timings { sampling: t.sampling, protection: t.protection, refinement: t.refinement, reporting: out.reporting },
    };
    write(&paths.manifest, &to_json(&manifest))?;
    for c in out.audit.failures() {
        log::warn!("certificate {} fails on {} of {} elements (worst {}, bound {})", c.name, c.violations, c.checked, c.worst, c.bound);
    }
    log::info!(
        "{:?}: {} vertices, {} curve edges, {} triangles, {} tets",
        out.status,
        out.quality.vertices,
        out.quality.curve_edges,
        out.quality.surface_tris,
        out.quality.volume_tets
    );
    Ok(out.status)
}
