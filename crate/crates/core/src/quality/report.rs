use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{area_length, dihedral_angles, relative_edge_length, triangle_angles, volume_length};
use crate::delaunay::{TetMesh, VertId};
use crate::geometry::Point3;
use crate::restricted::RestrictedComplex;

pub const BINS: usize = 64;

/// Fixed-width histogram over `[lo, hi]`; values above `hi` land in
/// `overflow`, values below `lo` in the first bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64) -> Histogram {
        Histogram { lo, hi, counts: vec![0; BINS], overflow: 0 }
    }

    pub fn add(&mut self, x: f64) {
        if x > self.hi + 1e-9 * (self.hi - self.lo) {
            self.overflow += 1;
            return;
        }
        let t = ((x - self.lo) / (self.hi - self.lo) * BINS as f64).floor();
        let k = (t.max(0.0) as usize).min(BINS - 1);
        self.counts[k] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        if values.is_empty() {
            return Summary::default();
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Summary { count: n, min: v[0], max: v[n - 1], mean: v.iter().sum::<f64>() / n as f64, median }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub summary: Summary,
    pub histogram: Histogram,
}

impl Metric {
    fn build(values: &[f64], lo: f64, hi: f64) -> Metric {
        let mut histogram = Histogram::new(lo, hi);
        for &x in values {
            histogram.add(x);
        }
        Metric { summary: Summary::of(values), histogram }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub vertices: usize,
    pub curve_edges: usize,
    pub surface_tris: usize,
    pub volume_tets: usize,
    pub area_length: Metric,
    pub volume_length: Metric,
    pub tri_angles: Metric,
    pub dihedral_angles: Metric,
    pub relative_length: Metric,
    /// Statistics of |h_r - 1|.
    pub length_deviation: Summary,
    /// Simplices excluded from the angle histograms as degenerate.
    pub degenerate: usize,
    /// Wall-clock refinement time; kept out of the serialised report so
    /// repeated runs produce identical files.
    #[serde(skip)]
    pub refine_seconds: f64,
}

/// Relative lengths of every distinct edge of the restricted curve, surface
/// and volume elements.
pub fn relative_lengths(m: &TetMesh, rc: &RestrictedComplex, h: &dyn Fn(Point3) -> f64) -> Vec<f64> {
    let mut edges: BTreeSet<[VertId; 2]> = rc.edges().keys().copied().collect();
    let k = |a: VertId, b: VertId| if a < b { [a, b] } else { [b, a] };
    for t in rc.tris().keys() {
        edges.extend([k(t[0], t[1]), k(t[0], t[2]), k(t[1], t[2])]);
    }
    for t in rc.tets().keys() {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.insert(k(t[i], t[j]));
            }
        }
    }
    edges.iter().map(|e| relative_edge_length(m.point(e[0]), m.point(e[1]), h)).collect()
}

pub fn build_report(m: &TetMesh, rc: &RestrictedComplex, h: &dyn Fn(Point3) -> f64, refine_seconds: f64) -> QualityReport {
    let mut a = Vec::new();
    let mut tri_ang = Vec::new();
    let mut degenerate = 0;
    for t in rc.tris().keys() {
        let [p, q, r] = t.map(|v| m.point(v));
        a.push(area_length(p, q, r));
        match triangle_angles(p, q, r) {
            Some(x) => tri_ang.extend(x),
            None => degenerate += 1,
        }
    }
    let mut v = Vec::new();
    let mut dih = Vec::new();
    for t in rc.tets().keys() {
        let [p, q, r, s] = t.map(|v| m.point(v));
        v.push(volume_length(p, q, r, s));
        match dihedral_angles(p, q, r, s) {
            Some(x) => dih.extend(x),
            None => degenerate += 1,
        }
    }
    let hr = relative_lengths(m, rc, h);
    QualityReport {
        vertices: m.num_vertices(),
        curve_edges: rc.edges().len(),
        surface_tris: rc.tris().len(),
        volume_tets: rc.tets().len(),
        area_length: Metric::build(&a, 0.0, 1.0),
        volume_length: Metric::build(&v, 0.0, 1.0),
        tri_angles: Metric::build(&tri_ang, 0.0, 180.0),
        dihedral_angles: Metric::build(&dih, 0.0, 180.0),
        relative_length: Metric::build(&hr, 0.0, 2.0),
        length_deviation: Summary::of(&hr.iter().map(|x| (x - 1.0).abs()).collect::<Vec<_>>()),
        degenerate,
        refine_seconds,
    }
}
