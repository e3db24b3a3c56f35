use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Aabb, Point3};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{0} must be at least {1}, got {2}")]
    TooSmall(&'static str, f64, f64),
    #[error("vlen-min must lie in (0, 1/3]; refinement is only known to converge for values up to 1/3, got {0}")]
    SliverBound(f64),
    #[error("sizing field must be finite and positive, got {0}")]
    BadSizing(f64),
    #[error("sizing grid line {line}: {msg}")]
    Grid { line: usize, msg: String },
    #[error("cannot read sizing grid {path}: {msg}")]
    GridIo { path: String, msg: String },
}

/// Regular lattice of target lengths, interpolated trilinearly and clamped
/// to the lattice box outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingGrid {
    pub origin: Point3,
    pub spacing: Point3,
    pub dims: [usize; 3],
    /// x varies fastest, then y, then z.
    pub values: Vec<f64>,
}

impl SizingGrid {
    pub fn new(origin: Point3, spacing: Point3, dims: [usize; 3], values: Vec<f64>) -> Result<SizingGrid, ConfigError> {
        let bad_line = |msg: &str| ConfigError::Grid { line: 0, msg: msg.to_string() };
        if dims.contains(&0) {
            return Err(bad_line("dims must be positive"));
        }
        if values.len() != dims[0] * dims[1] * dims[2] {
            return Err(bad_line("value count does not match dims"));
        }
        for s in spacing.to_array() {
            if !(s > 0.0 && s.is_finite()) {
                return Err(bad_line("spacing must be positive"));
            }
        }
        if let Some(&h) = values.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(ConfigError::BadSizing(h));
        }
        Ok(SizingGrid { origin, spacing, dims, values })
    }

    fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[i + self.dims[0] * (j + self.dims[1] * k)]
    }

    pub fn eval(&self, p: Point3) -> f64 {
        let rel = [(p.x - self.origin.x) / self.spacing.x, (p.y - self.origin.y) / self.spacing.y, (p.z - self.origin.z) / self.spacing.z];
        let mut idx = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let top = (self.dims[a] - 1) as f64;
            let u = rel[a].clamp(0.0, top);
            let i = (u.floor() as usize).min(self.dims[a].saturating_sub(2));
            idx[a] = i;
            frac[a] = if self.dims[a] == 1 { 0.0 } else { u - i as f64 };
        }
        let step = |a: usize| usize::from(self.dims[a] > 1);
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        let (di, dj, dk) = (step(0), step(1), step(2));
        let [fx, fy, fz] = frac;
        let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
        let c00 = lerp(self.at(i, j, k), self.at(i + di, j, k), fx);
        let c10 = lerp(self.at(i, j + dj, k), self.at(i + di, j + dj, k), fx);
        let c01 = lerp(self.at(i, j, k + dk), self.at(i + di, j, k + dk), fx);
        let c11 = lerp(self.at(i, j + dj, k + dk), self.at(i + di, j + dj, k + dk), fx);
        lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz)
    }

    /// Text format: `dims nx ny nz`, `origin x y z`, `spacing dx dy dz`,
    /// then `nx*ny*nz` values (x fastest) on any number of lines. `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<SizingGrid, ConfigError> {
        let mut dims = None;
        let mut origin = None;
        let mut spacing = None;
        let mut values = Vec::new();
        let err = |line: usize, msg: String| ConfigError::Grid { line, msg };
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let head = tok.next().expect("non-empty line");
            let nums = |tok: std::str::SplitWhitespace| -> Result<Vec<f64>, ConfigError> {
                tok.map(|t| t.parse::<f64>().map_err(|e| err(n + 1, format!("{t:?}: {e}")))).collect()
            };
            match head {
                "dims" => {
                    let v: Vec<usize> = tok
                        .map(|t| t.parse::<usize>().map_err(|e| err(n + 1, format!("{t:?}: {e}"))))
                        .collect::<Result<_, _>>()?;
                    if v.len() != 3 {
                        return Err(err(n + 1, "dims takes three integers".into()));
                    }
                    dims = Some([v[0], v[1], v[2]]);
                }
                "origin" | "spacing" => {
                    let v = nums(tok)?;
                    if v.len() != 3 {
                        return Err(err(n + 1, format!("{head} takes three numbers")));
                    }
                    let p = Point3::new(v[0], v[1], v[2]);
                    if head == "origin" {
                        origin = Some(p);
                    } else {
                        spacing = Some(p);
                    }
                }
                _ => {
                    let first = head.parse::<f64>().map_err(|_| err(n + 1, format!("unknown record {head:?}")))?;
                    values.push(first);
                    values.extend(nums(tok)?);
                }
            }
        }
        let dims = dims.ok_or_else(|| err(0, "missing dims".into()))?;
        let origin = origin.ok_or_else(|| err(0, "missing origin".into()))?;
        let spacing = spacing.ok_or_else(|| err(0, "missing spacing".into()))?;
        SizingGrid::new(origin, spacing, dims, values)
    }

    pub fn load(path: &Path) -> Result<SizingGrid, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::GridIo { path: path.display().to_string(), msg: e.to_string() })?;
        SizingGrid::parse(&text)
    }
}

/// The target edge length h̄(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SizingField {
    Uniform { h0: f64 },
    Gridded { grid: SizingGrid },
}

impl SizingField {
    pub fn uniform(h0: f64) -> SizingField {
        SizingField::Uniform { h0 }
    }

    pub fn eval(&self, p: Point3) -> f64 {
        match self {
            SizingField::Uniform { h0 } => *h0,
            SizingField::Gridded { grid } => grid.eval(p),
        }
    }

    /// Smallest lattice value (or the uniform value).
    pub fn min_value(&self) -> f64 {
        match self {
            SizingField::Uniform { h0 } => *h0,
            SizingField::Gridded { grid } => grid.values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let h = self.min_value();
        if h > 0.0 && h.is_finite() {
            Ok(())
        } else {
            Err(ConfigError::BadSizing(h))
        }
    }

    /// The default target: 15% of the largest box extent.
    pub fn default_for(b: Aabb) -> SizingField {
        let e = b.extent();
        SizingField::uniform(0.15 * e.x.max(e.y).max(e.z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Circumcentre (Type I) points only.
    Classical,
    /// Frontal ordering with size-optimal off-centres.
    Frontal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    pub rho_surf: f64,
    pub rho_vol: f64,
    /// ε̄(x) = eps_rel · h̄(x).
    pub eps_rel: f64,
    pub sizing: SizingField,
    pub vlen_min: f64,
    pub alpha: f64,
    pub mode: Mode,
    pub collar_beta: f64,
    pub max_points: usize,
    /// Number of well-separated seed vertices.
    pub seed_count: usize,
    /// Also seed surface corners found by crease detection.
    pub seed_corners: bool,
    /// Promote surface creases sharper than this dihedral deviation to
    /// curves; `None` disables detection.
    pub crease_angle: Option<f64>,
    pub seed: u64,
}

impl RefineConfig {
    pub fn new(sizing: SizingField) -> RefineConfig {
        RefineConfig {
            rho_surf: 1.25,
            rho_vol: 2.0,
            eps_rel: 0.25,
            sizing,
            vlen_min: 1.0 / 3.0,
            alpha: 4.0 / 3.0,
            mode: Mode::Frontal,
            collar_beta: 1.5,
            max_points: 5_000_000,
            seed_count: 8,
            seed_corners: true,
            crease_angle: Some(crate::oracle::DEFAULT_CREASE_ANGLE),
            seed: 0,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> RefineConfig {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let at_least = |name, min: f64, v: f64| if v >= min { Ok(()) } else { Err(ConfigError::TooSmall(name, min, v)) };
        at_least("rho-surf", 1.0 / 3f64.sqrt(), self.rho_surf)?;
        at_least("rho-vol", (3.0f64 / 8.0).sqrt(), self.rho_vol)?;
        at_least("collar-beta", 1.0, self.collar_beta)?;
        if !(self.alpha > 0.0) {
            return Err(ConfigError::TooSmall("alpha", 0.0, self.alpha));
        }
        if !(self.eps_rel > 0.0) {
            return Err(ConfigError::TooSmall("eps-rel", 0.0, self.eps_rel));
        }
        if !(self.vlen_min > 0.0 && self.vlen_min <= 1.0 / 3.0 + 1e-15) {
            return Err(ConfigError::SliverBound(self.vlen_min));
        }
        self.sizing.validate()
    }

    pub fn h(&self, p: Point3) -> f64 {
        self.sizing.eval(p)
    }

    pub fn eps_bar(&self, p: Point3) -> f64 {
        self.eps_rel * self.sizing.eval(p)
    }
}
