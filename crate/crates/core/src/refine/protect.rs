use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::RefineConfig;
use crate::geometry::Point3;
use crate::oracle::{PiecewiseComplex, SharpFeatureSet, VertexId};

/// Smallest protecting radius relative to the box diagonal.
pub const MIN_RADIUS_REL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ProtectError {
    #[error("cannot protect the acute apex at input vertex {vertex} ({x}, {y}, {z}): radius fell below {min:e}")]
    Unprotectable { vertex: VertexId, x: f64, y: f64, z: f64, min: f64 },
}

/// An isosceles collar `[apex, wings[0], wings[1]]` around an acute apex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtectedFeature {
    pub apex: VertexId,
    pub apex_point: Point3,
    pub wings: [Point3; 2],
    pub radius: f64,
}

fn best_towards(from: Point3, dir: Point3, hits: &[Point3]) -> Option<Point3> {
    let d = (dir - from).normalized()?;
    hits.iter()
        .copied()
        .filter_map(|p| Some(((p - from).normalized()?.dot(d), p)))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, p)| p)
}

/// Wing points for the apex at radius `r`, if the ball meets the curve
/// network exactly once per incident curve segment.
fn wings(g: &PiecewiseComplex, apex: VertexId, targets: [VertexId; 2], r: f64) -> Option<[Point3; 2]> {
    let x = g.vertex(apex);
    let hits: Vec<Point3> = g.intersect_sphere_curve(x, r).into_iter().map(|(p, _)| p).collect();
    if hits.len() != g.curve_degree(apex) as usize {
        return None;
    }
    let a = best_towards(x, g.vertex(targets[0]), &hits)?;
    let b = best_towards(x, g.vertex(targets[1]), &hits)?;
    (a.dist(b) > 0.0).then_some([a, b])
}

/// Collars for every acute apex. Radii start at the target length and are
/// halved until each ball meets only its own curves and the enlarged balls
/// `B(apex, collar_beta r)` are pairwise disjoint.
pub fn protect_sharp_angles(
    g: &PiecewiseComplex,
    features: &SharpFeatureSet,
    cfg: &RefineConfig,
) -> Result<Vec<ProtectedFeature>, ProtectError> {
    let apexes = &features.acute_apexes;
    let min = MIN_RADIUS_REL * g.bbox().diagonal();
    let mut r: Vec<f64> = apexes.iter().map(|a| cfg.h(g.vertex(a.vertex))).collect();
    let mut w: Vec<Option<[Point3; 2]>> = vec![None; apexes.len()];
    loop {
        let mut changed = false;
        for i in 0..apexes.len() {
            if r[i] < min {
                let p = g.vertex(apexes[i].vertex);
                return Err(ProtectError::Unprotectable { vertex: apexes[i].vertex, x: p.x, y: p.y, z: p.z, min });
            }
            w[i] = wings(g, apexes[i].vertex, apexes[i].wing_targets(), r[i]);
            let pi = g.vertex(apexes[i].vertex);
            let clash = (0..apexes.len()).any(|j| {
                j != i && pi.dist(g.vertex(apexes[j].vertex)) <= cfg.collar_beta * (r[i] + r[j])
            });
            if w[i].is_none() || clash {
                r[i] *= 0.5;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(apexes
        .iter()
        .zip(r)
        .zip(w)
        .map(|((a, radius), w)| ProtectedFeature {
            apex: a.vertex,
            apex_point: g.vertex(a.vertex),
            wings: w.expect("stable radius has wings"),
            radius,
        })
        .collect())
}
