use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use psmesh::geometry::Aabb;
use psmesh::refine::{Mode, RefineConfig, SizingField, SizingGrid};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Classical,
    Frontal,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Classical => Mode::Classical,
            ModeArg::Frontal => Mode::Frontal,
        }
    }
}

/// Mesh a piecewise smooth complex by restricted Delaunay refinement.
#[derive(Debug, Parser)]
#[command(name = "psmesh", version)]
pub struct Cli {
    /// Input complex (.psc).
    #[arg(long)]
    pub input: PathBuf,
    /// Output mesh (legacy VTK). Defaults to the input path with `.vtk`.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "frontal")]
    pub mode: ModeArg,
    /// Radius-edge bound for surface triangles.
    #[arg(long, default_value_t = 1.25)]
    pub rho_surf: f64,
    /// Radius-edge bound for tetrahedra.
    #[arg(long, default_value_t = 2.0)]
    pub rho_vol: f64,
    /// Distance bound as a fraction of the target length.
    #[arg(long, default_value_t = 0.25)]
    pub eps_rel: f64,
    /// Target length: a number, or `grid:PATH` for a sizing lattice.
    /// Defaults to 15% of the largest bounding-box extent.
    #[arg(long)]
    pub hfun: Option<String>,
    /// Volume-length lower bound for tetrahedra, at most 1/3.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub vlen_min: f64,
    /// Size bound factor on element radii.
    #[arg(long, default_value_t = 4.0 / 3.0)]
    pub alpha: f64,
    /// Collar radius factor at acute apexes.
    #[arg(long, default_value_t = 1.5)]
    pub collar_beta: f64,
    #[arg(long)]
    pub max_points: Option<usize>,
    /// Quality report (JSON). Defaults to `<output>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Run manifest (JSON). Defaults to `<output>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Take the whole configuration from a manifest or config file; the
    /// other refinement flags are ignored.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Run both modes and print a side-by-side summary.
    #[arg(long)]
    pub compare: bool,
}

/// Resolved paths of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Paths {
    pub input: PathBuf,
    pub output: PathBuf,
    pub report: PathBuf,
    pub manifest: PathBuf,
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

impl Cli {
    pub fn paths(&self) -> Paths {
        let output = self.output.clone().unwrap_or_else(|| self.input.with_extension("vtk"));
        Paths {
            input: self.input.clone(),
            report: self.report.clone().unwrap_or_else(|| with_suffix(&output, ".report.json")),
            manifest: self.manifest.clone().unwrap_or_else(|| with_suffix(&output, ".manifest.json")),
            output,
        }
    }

    /// Builds the configuration; `bbox` supplies the default sizing.
    pub fn config(&self, bbox: Aabb) -> Result<RefineConfig> {
        if let Some(path) = &self.config {
            return load_config(path);
        }
        let sizing = match &self.hfun {
            None => SizingField::default_for(bbox),
            Some(s) => parse_hfun(s)?,
        };
        let mut cfg = RefineConfig::new(sizing);
        cfg.mode = self.mode.into();
        cfg.rho_surf = self.rho_surf;
        cfg.rho_vol = self.rho_vol;
        cfg.eps_rel = self.eps_rel;
        cfg.vlen_min = self.vlen_min;
        cfg.alpha = self.alpha;
        cfg.collar_beta = self.collar_beta;
        cfg.seed = self.seed;
        if let Some(n) = self.max_points {
            cfg.max_points = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_hfun(s: &str) -> Result<SizingField> {
    if let Some(path) = s.strip_prefix("grid:") {
        return Ok(SizingField::Gridded { grid: SizingGrid::load(Path::new(path))? });
    }
    let h: f64 = s.parse().with_context(|| format!("--hfun expects a number or grid:PATH, got `{s}`"))?;
    let f = SizingField::uniform(h);
    f.validate()?;
    Ok(f)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    Manifest { config: RefineConfig },
    Bare(RefineConfig),
}

pub fn load_config(path: &Path) -> Result<RefineConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg = match serde_json::from_str(&text).with_context(|| format!("cannot parse config {}", path.display()))? {
        ConfigFile::Manifest { config } | ConfigFile::Bare(config) => config,
    };
    if let Err(e) = cfg.validate() {
        bail!("{}: {e}", path.display());
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use psmesh::geometry::Point3;

    fn cli(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(["psmesh", "--input", "in.psc"].into_iter().chain(args.iter().copied()))
    }

    fn unit() -> Aabb {
        Aabb::from_points([Point3::ZERO, Point3::new(2.0, 1.0, 1.0)])
    }

    #[test]
    fn defaults() {
        let c = cli(&[]).unwrap();
        let cfg = c.config(unit()).unwrap();
        assert_eq!((cfg.rho_surf, cfg.rho_vol, cfg.eps_rel), (1.25, 2.0, 0.25));
        assert_eq!((cfg.vlen_min, cfg.alpha, cfg.collar_beta), (1.0 / 3.0, 4.0 / 3.0, 1.5));
        assert_eq!(cfg.mode, Mode::Frontal);
        assert_eq!(cfg.sizing, SizingField::uniform(0.3));
        let p = c.paths();
        assert_eq!(p.output, PathBuf::from("in.vtk"));
        assert_eq!(p.report, PathBuf::from("in.vtk.report.json"));
        assert_eq!(p.manifest, PathBuf::from("in.vtk.manifest.json"));
    }

    #[test]
    fn benchmark_settings() {
        let cfg = cli(&["--rho-surf", "1.25", "--rho-vol", "2", "--mode", "classical", "--hfun", "0.1"])
            .unwrap()
            .config(unit())
            .unwrap();
        assert_eq!((cfg.rho_surf, cfg.rho_vol, cfg.mode), (1.25, 2.0, Mode::Classical));
        assert_eq!(cfg.sizing, SizingField::uniform(0.1));
    }

    #[test]
    fn sliver_bound_is_enforced() {
        let err = cli(&["--vlen-min", "0.4"]).unwrap().config(unit()).unwrap_err();
        assert!(err.to_string().contains("converge"), "{err}");
    }

    #[test]
    fn bad_flags() {
        assert!(cli(&["--bogus"]).is_err());
        assert!(cli(&["--rho-surf", "abc"]).is_err());
        assert!(cli(&["--hfun", "zero"]).unwrap().config(unit()).is_err());
        assert!(cli(&["--hfun=-1"]).unwrap().config(unit()).is_err());
    }

    #[test]
    fn manifest_config_is_accepted() {
        let cfg = RefineConfig::new(SizingField::uniform(0.2));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let doc = serde_json::json!({ "input": "x.psc", "config": cfg });
        std::fs::write(&path, doc.to_string()).unwrap();
        assert_eq!(load_config(&path).unwrap(), cfg);
        std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(load_config(&path).unwrap(), cfg);
    }
}
