use log::warn;
use serde::Serialize;

use super::RefineConfig;
use crate::geometry::Point3;
use crate::oracle::PiecewiseComplex;

const LATTICE: usize = 8;

/// Grading constants of the sizing field and the radius-edge thresholds
/// below which termination is not guaranteed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminationBounds {
    pub mu0: f64,
    pub gamma0: f64,
    pub nu0: f64,
    pub surf_min: f64,
    pub vol_min: f64,
    pub surf_ok: bool,
    pub vol_ok: bool,
}

/// Evaluates `nu0 = 2 mu0 / gamma0`, with `mu0` the largest target length
/// on the input and `gamma0` the smallest over a lattice of the bounding
/// box, and warns when the quality thresholds fall below the bounds.
pub fn check_termination_bounds(g: &PiecewiseComplex, cfg: &RefineConfig) -> TerminationBounds {
    let mu0 = g.vertices().iter().map(|&p| cfg.h(p)).fold(0.0, f64::max);
    let b = g.bbox();
    let e = b.extent();
    let mut gamma0 = f64::INFINITY;
    for i in 0..=LATTICE {
        for j in 0..=LATTICE {
            for k in 0..=LATTICE {
                let t = |n: usize| n as f64 / LATTICE as f64;
                let p = b.min + Point3::new(e.x * t(i), e.y * t(j), e.z * t(k));
                gamma0 = gamma0.min(cfg.h(p));
            }
        }
    }
    for &p in g.vertices() {
        gamma0 = gamma0.min(cfg.h(p));
    }
    let nu0 = 2.0 * mu0 / gamma0;
    let k = 2f64.sqrt() + 2.0;
    let surf_min = k * nu0;
    let vol_min = k * nu0 * (nu0 + 2.0);
    let surf_ok = cfg.rho_surf >= surf_min;
    let vol_ok = cfg.rho_vol >= vol_min;
    if !surf_ok {
        warn!("surface radius-edge bound {} is below {surf_min:.3}; termination is not guaranteed, though refinement usually converges well beyond this bound", cfg.rho_surf);
    }
    if !vol_ok {
        warn!("volume radius-edge bound {} is below {vol_min:.3}; termination is not guaranteed, though refinement usually converges well beyond this bound", cfg.rho_vol);
    }
    TerminationBounds { mu0, gamma0, nu0, surf_min, vol_min, surf_ok, vol_ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refine::SizingField;
    use crate::shapes::unit_cube;

    #[test]
    fn uniform_sizing_gives_nu_two() {
        let b = check_termination_bounds(&unit_cube(), &RefineConfig::new(SizingField::uniform(0.2)));
        assert!((b.nu0 - 2.0).abs() < 1e-12);
        assert!((b.surf_min - 2.0 * (2f64.sqrt() + 2.0)).abs() < 1e-12);
        assert!((b.vol_min - 8.0 * (2f64.sqrt() + 2.0)).abs() < 1e-12);
        assert!(!b.surf_ok && !b.vol_ok);
    }
}
