use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PiecewiseComplex, VertexId};

/// Greedy farthest-point selection over `pool`, continuing from `chosen`.
/// Returns the picks together with the separation distance at each pick.
fn farthest_point(
    c: &PiecewiseComplex,
    pool: &[VertexId],
    chosen: &mut Vec<VertexId>,
    count: usize,
) -> Vec<f64> {
    let mut seps = Vec::new();
    let mut best: Vec<f64> = pool
        .iter()
        .map(|&v| chosen.iter().map(|&w| c.vertex(v).dist(c.vertex(w))).fold(f64::INFINITY, f64::min))
        .collect();
    let mut used = vec![false; pool.len()];
    for (i, &v) in pool.iter().enumerate() {
        used[i] = chosen.contains(&v);
    }
    while seps.len() < count {
        let mut pick = None;
        for i in 0..pool.len() {
            if used[i] {
                continue;
            }
            match pick {
                None => pick = Some(i),
                Some(j) if best[i] > best[j] => pick = Some(i),
                _ => {}
            }
        }
        let Some(i) = pick else { break };
        used[i] = true;
        seps.push(best[i]);
        let p = c.vertex(pool[i]);
        chosen.push(pool[i]);
        for (k, &w) in pool.iter().enumerate() {
            best[k] = best[k].min(p.dist(c.vertex(w)));
        }
    }
    seps
}

impl PiecewiseComplex {
    /// A well-separated subset of the input vertices used to seed the
    /// triangulation: farthest-point-first from the vertex nearest the
    /// bounding-box minimum corner, taking curve vertices before surface-only
    /// vertices. Every vertex in `always` is appended if not already chosen.
    pub fn initial_sampling(&self, n: usize, always: &[VertexId]) -> Vec<VertexId> {
        self.initial_sampling_seeded(n, always, 0)
    }

    /// As [`PiecewiseComplex::initial_sampling`]; a non-zero `seed` picks the
    /// starting vertex pseudo-randomly instead of nearest the box corner.
    pub fn initial_sampling_seeded(&self, n: usize, always: &[VertexId], seed: u64) -> Vec<VertexId> {
        let curve: Vec<VertexId> = self.curve_vertices().into_iter().collect();
        let curve_set: BTreeSet<VertexId> = curve.iter().copied().collect();
        let surface: Vec<VertexId> =
            self.surface_vertices().into_iter().filter(|v| !curve_set.contains(v)).collect();
        let mut all: Vec<VertexId> = curve.iter().chain(&surface).copied().collect();
        if all.is_empty() {
            all = (0..self.vertices().len()).collect();
        }
        let mut chosen = Vec::new();
        if !all.is_empty() {
            let first_pool = if curve.is_empty() { &all } else { &curve };
            let corner = self.bbox().min;
            let start = if seed == 0 {
                *first_pool
                    .iter()
                    .min_by(|&&a, &&b| {
                        self.vertex(a).dist_sq(corner).total_cmp(&self.vertex(b).dist_sq(corner)).then(a.cmp(&b))
                    })
                    .expect("non-empty pool")
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                first_pool[rng.gen_range(0..first_pool.len())]
            };
            chosen.push(start);
            let want = n.saturating_sub(1);
            let got = farthest_point(self, first_pool, &mut chosen, want).len();
            if got < want && !curve.is_empty() {
                farthest_point(self, &surface, &mut chosen, want - got);
            }
        }
        for &v in always {
            if !chosen.contains(&v) {
                chosen.push(v);
            }
        }
        chosen
    }

    /// Separation of the next greedy pick after `n` points (test helper for
    /// the max-min property).
    pub fn greedy_separations(&self, pool: &[VertexId], n: usize) -> Vec<f64> {
        let mut chosen = vec![pool[0]];
        farthest_point(self, pool, &mut chosen, n)
    }
}
