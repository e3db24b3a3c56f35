use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

use log::{debug, info};
use serde::Serialize;

use super::{protect_sharp_angles, ProtectedFeature, RefineConfig, RefineError, RefineQueue};
use crate::delaunay::{TetMesh, VertId};
use crate::geometry::Point3;
use crate::oracle::{PiecewiseComplex, VertexId};
use crate::restricted::{fan_components, DiskExpectation, RestrictedComplex, RestrictedDelta, Strata};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    PointLimit,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RefineStats {
    pub initial_points: usize,
    pub protection_points: usize,
    pub steiner_edge: usize,
    pub steiner_tri: usize,
    pub steiner_tet: usize,
    pub disk1_repairs: usize,
    pub disk2_repairs: usize,
    pub encroach_edge: usize,
    pub encroach_tri: usize,
    pub rollback_curve: usize,
    pub rollback_surface: usize,
    pub rollback_mismatch: usize,
    pub rejected_protected: usize,
    pub duplicates: usize,
    pub offcentres: usize,
    pub blocked: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct PhaseTimings {
    pub sampling: f64,
    pub protection: f64,
    pub refinement: f64,
}

/// Outcome of one rollback when full verification is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RollbackRecord {
    /// True for a curve-mesh change, false for a surface change.
    pub curve: bool,
    /// Undo delta is the exact inverse of the insertion delta.
    pub inverse_delta: bool,
    /// Restricted complex equals the snapshot taken before the insertion.
    pub restored: bool,
}

/// Result of a tentative insertion.
pub(super) enum Attempt {
    Placed { vertex: VertId, delta: RestrictedDelta },
    Rejected,
    Duplicate,
}

/// The refinement state: triangulation, restricted complex, work queues.
pub struct Refiner {
    pub(super) geom: PiecewiseComplex,
    pub(super) cfg: RefineConfig,
    pub(super) mesh: TetMesh,
    pub(super) rc: RestrictedComplex,
    pub(super) expect: BTreeMap<VertId, DiskExpectation>,
    pub(super) input_of: BTreeMap<VertId, VertexId>,
    pub(super) collars: Vec<ProtectedFeature>,
    pub(super) protected: Vec<[VertId; 2]>,
    pub(super) q_edges: RefineQueue<[VertId; 2]>,
    pub(super) q_tris: RefineQueue<[VertId; 3]>,
    pub(super) q_tets: RefineQueue<[VertId; 4]>,
    pub(super) disk1: BTreeSet<VertId>,
    pub(super) disk2: BTreeSet<VertId>,
    pub(super) blocked_edges: HashSet<[VertId; 2]>,
    pub(super) blocked_tris: HashSet<[VertId; 3]>,
    pub(super) blocked_tets: HashSet<[VertId; 4]>,
    pub(super) stats: RefineStats,
    pub(super) timings: PhaseTimings,
    pub(super) points: usize,
    pub(super) verify: bool,
    pub(super) log: Vec<RollbackRecord>,
    pub(super) snapshot: Option<RestrictedComplex>,
    status: Option<Status>,
}

/// Input vertices where several curves meet or a curve ends.
fn junctions(g: &PiecewiseComplex) -> BTreeSet<VertexId> {
    let mut curves: BTreeMap<VertexId, BTreeSet<u32>> = BTreeMap::new();
    for s in g.segments() {
        for v in s.v {
            curves.entry(v).or_default().insert(s.curve);
        }
    }
    curves
        .into_iter()
        .filter(|(v, c)| c.len() > 1 || g.curve_degree(*v) != 2)
        .map(|(v, _)| v)
        .collect()
}

fn sectors(g: &PiecewiseComplex, v: VertexId) -> Option<BTreeMap<u32, usize>> {
    let mut by_patch: BTreeMap<u32, Vec<[VertId; 3]>> = BTreeMap::new();
    for t in g.triangles().iter().filter(|t| t.v.contains(&v)) {
        by_patch.entry(t.patch).or_default().push(t.v.map(|x| x as VertId));
    }
    if by_patch.is_empty() {
        return None;
    }
    Some(by_patch.into_iter().map(|(p, tris)| (p, fan_components(v as VertId, &tris).len())).collect())
}

impl Refiner {
    /// Samples the input, protects acute apexes and builds the initial
    /// restricted complex and queues.
    pub fn new(input: &PiecewiseComplex, cfg: RefineConfig) -> Result<Refiner, RefineError> {
        cfg.validate()?;
        let clock = Instant::now();
        let geom = match cfg.crease_angle {
            Some(a) => {
                let f = input.detect_sharp_features(a);
                input.with_crease_curves(&f)?
            }
            None => input.clone(),
        };
        let features = geom.detect_sharp_features(cfg.crease_angle.unwrap_or(f64::INFINITY));
        let junc = junctions(&geom);
        let mut always: BTreeSet<VertexId> = junc.clone();
        always.extend(features.acute_apexes.iter().map(|a| a.vertex));
        if cfg.seed_corners {
            always.extend(features.corner_vertices.iter().copied());
        }
        let always: Vec<VertexId> = always.into_iter().collect();
        let seeds = geom.initial_sampling_seeded(cfg.seed_count, &always, cfg.seed);
        let sampling = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let collars = protect_sharp_angles(&geom, &features, &cfg)?;
        let protection = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let mut mesh = TetMesh::new(geom.bbox());
        let mut input_of = BTreeMap::new();
        let mut expect = BTreeMap::new();
        let mut points = 0;
        for &v in &seeds {
            let ins = mesh.insert_point(geom.vertex(v))?;
            if ins.duplicate {
                continue;
            }
            points += 1;
            input_of.insert(ins.vertex, v);
            let corner = features.corner_vertices.contains(&v);
            if junc.contains(&v) || corner {
                let e = DiskExpectation {
                    curve_degree: junc.contains(&v).then(|| geom.curve_degree(v)),
                    sectors: sectors(&geom, v),
                };
                expect.insert(ins.vertex, e);
            }
        }
        let initial_points = points;
        let mut apex_ids = Vec::new();
        for c in &collars {
            let apex = mesh.insert_point(c.apex_point)?.vertex;
            let mut ws = [0; 2];
            for (k, w) in c.wings.iter().enumerate() {
                let ins = mesh.insert_point(*w)?;
                points += usize::from(!ins.duplicate);
                ws[k] = ins.vertex;
            }
            apex_ids.push((apex, ws));
        }
        let rc = RestrictedComplex::build(&mesh, &geom, Strata::for_complex(&geom));
        let mut protected = Vec::new();
        for (apex, ws) in apex_ids {
            for w in ws {
                let k = if apex < w { [apex, w] } else { [w, apex] };
                if rc.edge(&k).is_some() {
                    protected.push(k);
                } else {
                    info!("collar edge {k:?} is not restricted after protection; left unprotected");
                }
            }
        }
        let mut r = Refiner {
            geom,
            cfg,
            mesh,
            rc,
            expect,
            input_of,
            collars,
            protected,
            q_edges: RefineQueue::default(),
            q_tris: RefineQueue::default(),
            q_tets: RefineQueue::default(),
            disk1: BTreeSet::new(),
            disk2: BTreeSet::new(),
            blocked_edges: HashSet::new(),
            blocked_tris: HashSet::new(),
            blocked_tets: HashSet::new(),
            stats: RefineStats { initial_points, protection_points: points - initial_points, ..Default::default() },
            timings: PhaseTimings { sampling, protection, refinement: 0.0 },
            points,
            verify: false,
            log: Vec::new(),
            snapshot: None,
            status: None,
        };
        r.seed_queues();
        r.timings.refinement += clock.elapsed().as_secs_f64();
        Ok(r)
    }

    /// Also compare the whole restricted complex with a snapshot on every
    /// rollback. Costs a clone per tentative insertion.
    pub fn set_verify_rollbacks(&mut self, on: bool) {
        self.verify = on;
    }

    /// Runs until every queue is empty or the point budget is spent.
    pub fn run(&mut self) -> Result<Status, RefineError> {
        let clock = Instant::now();
        let status = loop {
            if self.points >= self.cfg.max_points {
                break Status::PointLimit;
            }
            if !self.step()? {
                break Status::Converged;
            }
        };
        self.stats.blocked = self.blocked_edges.len() + self.blocked_tris.len() + self.blocked_tets.len();
        self.timings.refinement += clock.elapsed().as_secs_f64();
        info!("refinement finished: {status:?}, {} points", self.points);
        debug!("{:?}", self.stats);
        self.status = Some(status);
        Ok(status)
    }

    /// One pass of the main loop; false when nothing is left to do.
    pub fn step(&mut self) -> Result<bool, RefineError> {
        // elements surviving their step (an encroached ball was split
        // instead) go back into their queue
        if let Some((k, _)) = self.pop_edge() {
            self.refine_edge(k)?;
            self.queue_edge(k);
            return Ok(true);
        }
        while let Some(v) = self.disk1.pop_first() {
            if self.repair_disk_1(v)? {
                return Ok(true);
            }
        }
        if let Some((k, _)) = self.pop_tri() {
            self.refine_tri(k)?;
            self.queue_tri(k);
            return Ok(true);
        }
        while let Some(v) = self.disk2.pop_first() {
            if self.repair_disk_2(v)? {
                return Ok(true);
            }
        }
        if let Some((k, _)) = self.pop_tet() {
            self.refine_tet(k)?;
            self.queue_tet(k);
            return Ok(true);
        }
        Ok(false)
    }

    /// Inserts `p`, updates the restricted complex and rejects the point if
    /// it destroyed a protected edge.
    pub(super) fn attempt(&mut self, p: Point3) -> Result<Attempt, RefineError> {
        if self.verify {
            self.snapshot = Some(self.rc.clone());
        }
        let ins = self.mesh.insert_point(p)?;
        if ins.duplicate {
            self.stats.duplicates += 1;
            return Ok(Attempt::Duplicate);
        }
        let delta = self.rc.update(&self.mesh, &self.geom, &ins.change);
        if self.protected.iter().any(|k| self.rc.edge(k).is_none()) {
            self.revert(&delta, None);
            self.stats.rejected_protected += 1;
            return Ok(Attempt::Rejected);
        }
        Ok(Attempt::Placed { vertex: ins.vertex, delta })
    }

    /// Undoes the last insertion and checks that the restricted complex
    /// changed back by exactly the inverse of `delta`.
    pub(super) fn revert(&mut self, delta: &RestrictedDelta, curve: Option<bool>) {
        let undo = self.mesh.undo_last_insert().expect("an insertion to undo");
        let back = self.rc.update(&self.mesh, &self.geom, &undo);
        let inverse = inverse_of(delta, &back);
        if !inverse {
            self.stats.rollback_mismatch += 1;
        }
        if let Some(curve) = curve {
            let restored = self.snapshot.as_ref().map_or(inverse, |s| *s == self.rc);
            if self.verify {
                self.log.push(RollbackRecord { curve, inverse_delta: inverse, restored });
            }
        }
    }

    /// Keeps an insertion: counts it and refreshes queues.
    pub(super) fn commit(&mut self, vertex: VertId, delta: &RestrictedDelta) {
        self.points += 1;
        self.maintain(vertex, delta);
    }

    /// Inserts `p` for good; false if it was rejected or a duplicate.
    pub(super) fn place(&mut self, p: Point3) -> Result<bool, RefineError> {
        match self.attempt(p)? {
            Attempt::Placed { vertex, delta } => {
                self.commit(vertex, &delta);
                Ok(true)
            }
            Attempt::Rejected | Attempt::Duplicate => Ok(false),
        }
    }

    /// Inserts `p` tentatively and rolls it back, reporting the change it
    /// would have made and whether the complex was restored exactly.
    pub fn probe(&mut self, p: Point3) -> Result<Option<(RestrictedDelta, bool)>, RefineError> {
        let before = self.rc.clone();
        let ins = self.mesh.insert_point(p)?;
        if ins.duplicate {
            return Ok(None);
        }
        let delta = self.rc.update(&self.mesh, &self.geom, &ins.change);
        let undo = self.mesh.undo_last_insert().expect("an insertion to undo");
        let back = self.rc.update(&self.mesh, &self.geom, &undo);
        Ok(Some((delta.clone(), inverse_of(&delta, &back) && before == self.rc)))
    }

    /// Inserts `p` through the same path as a triangle or tet refinement
    /// step, rolling it back if it changes the curve mesh (`watch_curve`)
    /// or the surface mesh (`watch_surface`). Returns the rollback record,
    /// verified against a full snapshot, if one happened.
    pub fn insert_scripted(
        &mut self,
        p: Point3,
        watch_curve: bool,
        watch_surface: bool,
    ) -> Result<Option<RollbackRecord>, RefineError> {
        let verify = self.verify;
        self.verify = true;
        let before = self.log.len();
        let out = self.insert_watched(None, p, watch_curve, watch_surface);
        self.verify = verify;
        out?;
        Ok(self.log.get(before).copied())
    }

    pub fn mesh(&self) -> &TetMesh {
        &self.mesh
    }

    pub fn restricted(&self) -> &RestrictedComplex {
        &self.rc
    }

    /// The input after crease promotion.
    pub fn geometry(&self) -> &PiecewiseComplex {
        &self.geom
    }

    pub fn config(&self) -> &RefineConfig {
        &self.cfg
    }

    pub fn stats(&self) -> &RefineStats {
        &self.stats
    }

    pub fn timings(&self) -> PhaseTimings {
        self.timings
    }

    pub fn status(&self) -> Option<Status> {
        self.status
    }

    pub fn collars(&self) -> &[ProtectedFeature] {
        &self.collars
    }

    /// Collar edges that were restricted after protection.
    pub fn protected_edges(&self) -> &[[VertId; 2]] {
        &self.protected
    }

    /// Input vertex a seeded mesh vertex came from.
    pub fn input_vertex(&self, v: VertId) -> Option<VertexId> {
        self.input_of.get(&v).copied()
    }

    pub fn seeded_vertices(&self) -> impl Iterator<Item = (VertId, VertexId)> + '_ {
        self.input_of.iter().map(|(&a, &b)| (a, b))
    }

    pub fn expectation(&self, v: VertId) -> DiskExpectation {
        self.expect.get(&v).cloned().unwrap_or_default()
    }

    pub fn rollback_log(&self) -> &[RollbackRecord] {
        &self.log
    }

    /// Mesh vertices excluding the bounding shell.
    pub fn point_count(&self) -> usize {
        self.points
    }
}

fn sorted<T: Ord + Clone>(v: impl Iterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = v.collect();
    v.sort();
    v
}

/// `back` undoes `fwd`: what one added the other removed and vice versa.
fn inverse_of(fwd: &RestrictedDelta, back: &RestrictedDelta) -> bool {
    sorted(fwd.edges_added.iter().copied()) == sorted(back.edges_removed.iter().map(|e| e.edge))
        && sorted(fwd.edges_removed.iter().map(|e| e.edge)) == sorted(back.edges_added.iter().copied())
        && sorted(fwd.tris_added.iter().copied()) == sorted(back.tris_removed.iter().map(|t| t.tri))
        && sorted(fwd.tris_removed.iter().map(|t| t.tri)) == sorted(back.tris_added.iter().copied())
        && sorted(fwd.tets_added.iter().copied()) == sorted(back.tets_removed.iter().map(|t| t.verts))
        && sorted(fwd.tets_removed.iter().map(|t| t.verts)) == sorted(back.tets_added.iter().copied())
}

/// Builds a refiner and runs it to completion.
pub fn refine(g: &PiecewiseComplex, cfg: RefineConfig) -> Result<Refiner, RefineError> {
    let mut r = Refiner::new(g, cfg)?;
    r.run()?;
    Ok(r)
}
