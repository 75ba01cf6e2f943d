//! Vertex-at-a-time reduction to an irreducible triangulation.
//!
//! Vertices are taken from a FIFO queue. While a vertex `u` is processed,
//! every incident edge is decided exactly once: edges wait in the untested
//! list (`lue`) until they are examined, and edges that fail wait in the
//! tested list (`lte`) together with a counter `c` of the critical cycles
//! through them. Contractions elsewhere around `u` keep the counters exact
//! through the discovery (`o`) and test (`t`) time stamps, so an edge in
//! `lte` becomes contractible precisely when its counter drops to zero and
//! is never tested again.

use std::collections::VecDeque;
use std::fmt;
use std::time::Instant;

use crate::dcel::{Collapsed, EdgeId, FaceId, HalfEdgeId, Mesh, VertexId};
use crate::stats::{ReductionStats, TestTally};
use crate::topo;
use crate::Scalar;

mod worklist;

pub use worklist::{List, Worklists};

/// Runtime switches for the expensive self-checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    /// Assert the list invariants at every loop check, cross-check every
    /// decision and every critical-cycle counter against the set-based
    /// oracle, and certify the output.
    pub check_invariants: bool,
    /// After processing a vertex, assert with the oracle that it and its
    /// processed neighbors are trapped.
    pub check_trapped: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { check_invariants: cfg!(debug_assertions), check_trapped: cfg!(debug_assertions) }
    }
}

impl EngineOptions {
    pub fn checked() -> Self {
        EngineOptions { check_invariants: true, check_trapped: true }
    }

    pub fn unchecked() -> Self {
        EngineOptions { check_invariants: false, check_trapped: false }
    }
}

/// One contraction, in the order performed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContractionRecord {
    pub kept: VertexId,
    pub removed: VertexId,
    pub x: VertexId,
    pub y: VertexId,
    /// `[u,v]`, `[v,x]`, `[v,y]`.
    pub removed_edges: [EdgeId; 3],
    /// `[u,v,x]`, `[u,v,y]`.
    pub removed_faces: [FaceId; 2],
}

impl From<Collapsed> for ContractionRecord {
    fn from(c: Collapsed) -> Self {
        ContractionRecord {
            kept: c.kept,
            removed: c.removed,
            x: c.x,
            y: c.y,
            removed_edges: c.removed_edges,
            removed_faces: c.removed_faces,
        }
    }
}

impl fmt::Display for ContractionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (u, v, x, y) = (self.kept, self.removed, self.x, self.y);
        write!(f, "contract {u} {v} | removed edges [{u},{v}] [{v},{x}] [{v},{y}] faces [{u},{v},{x}] [{u},{v},{y}]")
    }
}

/// How many self-checks a run performed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckCounts {
    /// List-invariant checks at loop conditions.
    pub loop_checks: u64,
    /// Arrivals at the tested-list scan where counters were compared with
    /// the oracle.
    pub counter_checks: u64,
    /// Individual counter comparisons.
    pub counters_compared: u64,
    /// Decisions compared with the oracle.
    pub decisions_compared: u64,
}

/// Result of a run.
#[derive(Clone, Debug)]
pub struct Reduction<S> {
    pub mesh: Mesh<S>,
    pub stats: ReductionStats,
    pub log: Vec<ContractionRecord>,
    pub checks: CheckCounts,
}

pub struct Engine<S> {
    mesh: Mesh<S>,
    queue: VecDeque<VertexId>,
    ts: u64,
    lists: Worklists,
    /// For each current neighbor `w` of `u`, the edge `[u, w]`.
    edge_to_u: Vec<Option<EdgeId>>,
    u: VertexId,
    log: Vec<ContractionRecord>,
    stats: ReductionStats,
    tally: TestTally,
    temp: Vec<HalfEdgeId>,
    lue_insertions: u64,
    options: EngineOptions,
    checks: CheckCounts,
    input_euler: i64,
}

impl<S: Scalar> Engine<S> {
    pub fn new(mesh: Mesh<S>) -> Self {
        Self::with_options(mesh, EngineOptions::default())
    }

    /// Initializes attributes and the vertex queue.
    pub fn with_options(mut mesh: Mesh<S>, options: EngineOptions) -> Self {
        let start = Instant::now();
        let vertices: Vec<VertexId> = mesh.vertices().collect();
        for &v in &vertices {
            let degree = mesh.outgoing(v).count() as u32;
            *mesh.attrs_mut(v) = crate::dcel::VertexAttrs { degree, ..Default::default() };
        }
        let n_edges = mesh.edge_capacity();
        let n_vertices = mesh.vertex_capacity();
        let input_euler = mesh.n_vertices() as i64 - mesh.n_edges() as i64 + mesh.n_faces() as i64;
        let mut engine = Engine {
            mesh,
            queue: vertices.into_iter().collect(),
            ts: 0,
            lists: Worklists::new(n_edges),
            edge_to_u: vec![None; n_vertices],
            u: VertexId(0),
            log: Vec::new(),
            stats: ReductionStats::default(),
            tally: TestTally::with_capacity(n_edges),
            temp: Vec::new(),
            lue_insertions: 0,
            options,
            checks: CheckCounts::default(),
            input_euler,
        };
        engine.stats.init_time = start.elapsed();
        engine
    }

    pub fn mesh(&self) -> &Mesh<S> {
        &self.mesh
    }

    pub fn stats(&self) -> &ReductionStats {
        &self.stats
    }

    pub fn queue(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.queue.iter().copied()
    }

    pub fn log(&self) -> &[ContractionRecord] {
        &self.log
    }

    /// Processes queued vertices until the queue is empty.
    pub fn run(mut self) -> Reduction<S> {
        let start = Instant::now();
        while self.step().is_some() {}
        self.stats.reduce_time = start.elapsed();
        self.stats.final_ts = self.ts;
        self.stats.retested_edges = self.tally.retested();
        if self.options.check_invariants {
            self.mesh.validate().expect("output mesh is structurally valid");
            assert!(topo::certify_irreducible(&self.mesh), "output is not irreducible");
            let euler = self.mesh.n_vertices() as i64 - self.mesh.n_edges() as i64 + self.mesh.n_faces() as i64;
            assert_eq!(euler, self.input_euler, "Euler characteristic changed");
        }
        Reduction { mesh: self.mesh, stats: self.stats, log: self.log, checks: self.checks }
    }

    /// Pops the next vertex and processes it if it is still unprocessed.
    /// Returns the popped vertex, or `None` once the queue is empty.
    pub fn step(&mut self) -> Option<VertexId> {
        let u = self.queue.pop_front()?;
        if !self.mesh.attrs(u).processed {
            self.process_vertex(u);
        }
        Some(u)
    }

    fn process_vertex(&mut self, u: VertexId) {
        self.u = u;
        self.lue_insertions = 0;
        let ts = self.ts;
        let spokes: Vec<HalfEdgeId> = self.mesh.outgoing(u).collect();
        for h in spokes {
            let v = self.mesh.destination(h);
            let e = self.mesh.edge_of(h);
            self.edge_to_u[v.index()] = Some(e);
            let a = self.mesh.attrs_mut(v);
            a.neighbor_of = Some(u);
            a.discovered = Some(ts);
            a.tested = None;
            // A counter left over from an earlier processed vertex would
            // otherwise leak into this one.
            a.cycles = 0;
            let (processed, degree) = (a.processed, a.degree);
            if !processed {
                self.insert_untested(e, degree == 3);
            }
        }

        loop {
            self.check_lists();
            while let Some(e) = self.lists.pop_front(List::Lue) {
                let v = self.mesh.other_end(e, u);
                self.mesh.attrs_mut(v).tested = Some(self.ts);
                self.stats.link_tests += 1;
                if self.tally.record(e.index()) > 1 && self.options.check_invariants {
                    panic!("edge {e:?} tested twice");
                }
                if self.mesh.degree(v) == 3 {
                    self.process_degree3(e, v);
                } else {
                    self.process_degree_gt3(e, v);
                }
                self.check_lists();
            }
            if !self.lists.is_empty(List::Lte) {
                self.check_counters();
                self.process_edge_list();
            }
            self.check_lists();
            if self.lists.is_empty(List::Lue) {
                break;
            }
        }

        self.mesh.attrs_mut(u).processed = true;
        self.lists.clear(List::Lte);
        self.stats.max_lue_insertions = self.stats.max_lue_insertions.max(self.lue_insertions);
        if self.options.check_trapped {
            self.check_trapped();
        }
    }

    fn insert_untested(&mut self, e: EdgeId, front: bool) {
        if front {
            self.lists.push_front(List::Lue, e);
        } else {
            self.lists.push_back(List::Lue, e);
        }
        self.lue_insertions += 1;
    }

    #[inline]
    fn edge_to(&self, w: VertexId) -> EdgeId {
        self.edge_to_u[w.index()].expect("neighbor of u has a recorded edge")
    }

    /// Decides `e = [u, v]` with `d(v) = 3`: contractible unless the mesh
    /// is T4.
    fn process_degree3(&mut self, e: EdgeId, v: VertexId) {
        let u = self.u;
        let contract = self.mesh.degree(u) != 3;
        if self.options.check_invariants {
            self.checks.decisions_compared += 1;
            assert_eq!(contract, topo::link_condition_oracle(&self.mesh, e), "degree-3 decision on {e:?}");
        }
        self.stats.link_work += 1;
        if !contract {
            return;
        }
        let (x, y) = self.contract(e, v);
        let ax = *self.mesh.attrs(x);
        let ay = *self.mesh.attrs(y);
        match (ax.tested, ay.tested) {
            (Some(_), Some(_)) => {
                self.decrement(x);
                self.decrement(y);
            }
            (Some(tx), _) if Some(tx) >= ay.discovered => self.decrement(x),
            (_, Some(ty)) if Some(ty) >= ax.discovered => self.decrement(y),
            _ => {}
        }
    }

    fn decrement(&mut self, w: VertexId) {
        let a = self.mesh.attrs_mut(w);
        a.cycles -= 1;
        if a.cycles == 0 {
            let e = self.edge_to(w);
            self.lists.move_to_front(List::Lte, e);
        }
    }

    /// Counts the critical cycles through `e = [u, v]`, `d(v) > 3`, using
    /// the neighbor marks; contracts if there are none.
    fn process_degree_gt3(&mut self, e: EdgeId, v: VertexId) {
        let u = self.u;
        let (x, y) = self.mesh.apexes(e);
        let ov = self.mesh.attrs(v).discovered;
        let mut cv = 0u32;
        let mut h = self.mesh.vertex_he(v);
        let start = h;
        loop {
            let z = self.mesh.destination(h);
            self.stats.link_work += 1;
            if z != u && z != x && z != y && self.mesh.attrs(z).neighbor_of == Some(u) {
                cv += 1;
                let az = self.mesh.attrs_mut(z);
                if az.tested.is_some() && az.tested < ov {
                    az.cycles += 1;
                    if az.cycles == 1 {
                        let ez = self.edge_to(z);
                        self.lists.move_to_back(List::Lte, ez);
                    }
                }
            }
            h = self.mesh.next(self.mesh.mate(h));
            if h == start {
                break;
            }
        }
        self.mesh.attrs_mut(v).cycles = cv;
        if self.options.check_invariants {
            self.checks.decisions_compared += 1;
            assert_eq!(cv as usize, topo::critical_cycles_through(&self.mesh, e), "count on {e:?}");
            assert_eq!(cv == 0, topo::link_condition_oracle(&self.mesh, e), "decision on {e:?}");
        }
        if cv == 0 {
            self.contract(e, v);
        } else {
            self.lists.push_back(List::Lte, e);
        }
    }

    /// Contracts `e = [u, v]` into `u` and updates marks, counters and lists.
    /// Returns the apexes of `e`.
    fn contract(&mut self, e: EdgeId, v: VertexId) -> (VertexId, VertexId) {
        let u = self.u;
        let (x, y) = self.mesh.apexes(e);
        self.ts += 1;
        let ts = self.ts;
        let spokes: Vec<HalfEdgeId> = self.mesh.outgoing(v).collect();
        for h in spokes {
            let z = self.mesh.destination(h);
            if z == u || z == x || z == y {
                continue;
            }
            self.edge_to_u[z.index()] = Some(self.mesh.edge_of(h));
            let a = self.mesh.attrs_mut(z);
            a.neighbor_of = Some(u);
            a.cycles = 0;
            a.discovered = Some(ts);
            a.tested = None;
        }
        self.mesh.attrs_mut(v).processed = true;

        let mut temp = std::mem::take(&mut self.temp);
        temp.clear();
        let collapsed = self.mesh.contract(e, u, &mut temp);
        self.log.push(collapsed.into());
        self.stats.contractions += 1;
        self.edge_to_u[v.index()] = None;

        for w in [x, y] {
            let a = *self.mesh.attrs(w);
            if a.degree == 3 && !a.processed && a.tested.is_none() {
                let ew = self.edge_to(w);
                debug_assert_eq!(self.lists.owner(ew), Some(List::Lue));
                self.lists.move_to_front(List::Lue, ew);
            }
        }

        for &h in &temp {
            let z = self.mesh.destination(h);
            let ez = self.mesh.edge_of(h);
            let az = *self.mesh.attrs(z);
            if !az.processed {
                self.insert_untested(ez, az.degree == 3);
                continue;
            }
            let (zx, zy) = self.mesh.apexes(ez);
            let mut g = self.mesh.vertex_he(z);
            let start = g;
            loop {
                let w = self.mesh.destination(g);
                if w != u && w != zx && w != zy {
                    let aw = self.mesh.attrs_mut(w);
                    if aw.neighbor_of == Some(u) && aw.tested.is_some() {
                        aw.cycles += 1;
                        if aw.cycles == 1 {
                            let ew = self.edge_to(w);
                            self.lists.move_to_back(List::Lte, ew);
                        }
                    }
                }
                g = self.mesh.next(self.mesh.mate(g));
                if g == start {
                    break;
                }
            }
        }
        self.temp = temp;
        (x, y)
    }

    /// Contracts edges of `lte` that became contractible: any whose far
    /// endpoint dropped to degree 3, then at most one with a zero counter.
    fn process_edge_list(&mut self) {
        let u = self.u;
        while let Some(e) = self.lists.front(List::Lte) {
            let v = self.mesh.other_end(e, u);
            if self.mesh.degree(v) != 3 {
                break;
            }
            self.lists.remove(e);
            self.process_degree3(e, v);
        }
        if let Some(e) = self.lists.front(List::Lte) {
            let v = self.mesh.other_end(e, u);
            if self.mesh.attrs(v).cycles == 0 {
                self.lists.remove(e);
                if self.options.check_invariants {
                    self.checks.decisions_compared += 1;
                    assert!(topo::link_condition_oracle(&self.mesh, e), "zero counter on non-contractible {e:?}");
                }
                self.contract(e, v);
            }
        }
    }

    /// Ordering and attribute invariants of both lists.
    fn check_lists(&mut self) {
        if !self.options.check_invariants {
            return;
        }
        self.checks.loop_checks += 1;
        let u = self.u;
        let mut seen_gt3 = false;
        for e in self.lists.iter(List::Lue) {
            assert!(self.mesh.edge_alive(e), "dead edge {e:?} in lue");
            let (a, b) = self.mesh.endpoints(e);
            assert!(a == u || b == u, "lue edge {e:?} not incident on {u:?}");
            let w = self.mesh.other_end(e, u);
            assert_eq!(self.edge_to_u[w.index()], Some(e));
            let at = self.mesh.attrs(w);
            if at.degree > 3 {
                seen_gt3 = true;
            } else {
                assert!(!seen_gt3, "degree-3 edge {e:?} behind a higher-degree edge in lue");
            }
            assert!(!at.processed, "lue edge {e:?} reaches a processed vertex");
            assert_eq!(at.neighbor_of, Some(u));
            assert!(at.discovered.is_some(), "lue edge {e:?} without discovery time");
            assert_eq!(at.tested, None, "lue edge {e:?} already has a test time");
            assert_eq!(at.cycles, 0, "lue edge {e:?} has a nonzero counter");
            assert_eq!(self.tally.times_tested(e.index()), 0, "lue edge {e:?} was tested before");
        }
        let mut seen_positive = false;
        for e in self.lists.iter(List::Lte) {
            assert!(self.mesh.edge_alive(e), "dead edge {e:?} in lte");
            let w = self.mesh.other_end(e, u);
            assert_eq!(self.edge_to_u[w.index()], Some(e));
            let at = self.mesh.attrs(w);
            assert!(at.discovered.is_some() && at.tested >= at.discovered, "lte edge {e:?} time stamps");
            assert_eq!(self.tally.times_tested(e.index()), 1, "lte edge {e:?} test count");
            if at.cycles > 0 {
                seen_positive = true;
            } else {
                assert!(!seen_positive, "zero-counter edge {e:?} behind a positive one in lte");
            }
        }
    }

    /// Counters of all `lte` edges against the oracle.
    fn check_counters(&mut self) {
        if !self.options.check_invariants {
            return;
        }
        self.checks.counter_checks += 1;
        let u = self.u;
        let edges: Vec<EdgeId> = self.lists.iter(List::Lte).collect();
        for e in edges {
            let w = self.mesh.other_end(e, u);
            let expected = topo::critical_cycles_through(&self.mesh, e);
            assert_eq!(self.mesh.attrs(w).cycles as usize, expected, "counter of {e:?}");
            self.checks.counters_compared += 1;
        }
    }

    /// Processing can only change the links of `u` and its neighbors, so
    /// those are the processed vertices whose trapped status could revert.
    fn check_trapped(&self) {
        let u = self.u;
        assert!(topo::is_trapped(&self.mesh, u), "{u:?} is not trapped after processing");
        for w in self.mesh.neighbors(u) {
            if self.mesh.attrs(w).processed {
                assert!(topo::is_trapped(&self.mesh, w), "processed {w:?} stopped being trapped");
            }
        }
    }
}

/// Reduces `mesh` with default options.
pub fn reduce<S: Scalar>(mesh: Mesh<S>) -> Reduction<S> {
    Engine::new(mesh).run()
}

/// The reducer's decision for `e` as seen from `u`, computed the same way
/// the engine does: mark the neighbors of `u`, then contract if `d(v) = 3`
/// and `d(u) != 3`, or if no vertex of `lk(v)` outside `{u, x, y}` is
/// marked. Overwrites the neighbor marks.
pub fn fast_link_test<S: Scalar>(mesh: &mut Mesh<S>, e: EdgeId, u: VertexId) -> bool {
    let v = mesh.other_end(e, u);
    let neighbors: Vec<VertexId> = mesh.neighbors(u).collect();
    for w in neighbors {
        mesh.attrs_mut(w).neighbor_of = Some(u);
    }
    if mesh.degree(v) == 3 {
        return mesh.degree(u) != 3;
    }
    let (x, y) = mesh.apexes(e);
    !mesh
        .neighbors(v)
        .any(|z| z != u && z != x && z != y && mesh.attrs(z).neighbor_of == Some(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen;
    use crate::topo::{certify_irreducible, is_t4};

    fn run(soup: &crate::TriangleSoup<f64>) -> Reduction<f64> {
        Engine::with_options(soup.build().unwrap(), EngineOptions::checked()).run()
    }

    #[test]
    fn initialization() {
        let t4 = meshgen::gen_tetrahedron::<f64>().build().unwrap();
        let engine = Engine::new(t4);
        assert_eq!(engine.queue().count(), 4);
        assert!(engine.mesh().vertices().all(|v| engine.mesh().degree(v) == 3));

        let oct = Engine::new(meshgen::gen_octahedron::<f64>().build().unwrap());
        for v in oct.mesh().vertices() {
            let a = oct.mesh().attrs(v);
            assert_eq!((a.degree, a.discovered, a.tested, a.neighbor_of), (4, None, None, None));
        }

        let ico = Engine::new(meshgen::gen_icosahedron::<f64>().build().unwrap());
        let sum: u32 = ico.queue().map(|v| ico.mesh().degree(v)).sum();
        assert_eq!(sum as usize, 2 * ico.mesh().n_edges());
        let order: Vec<u32> = ico.queue().map(|v| v.0).collect();
        assert_eq!(order, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn t4_is_left_alone() {
        let r = run(&meshgen::gen_tetrahedron());
        assert_eq!(r.stats.contractions, 0);
        assert!(is_t4(&r.mesh));
    }

    #[test]
    fn icosahedron_collapses_to_t4() {
        let r = run(&meshgen::gen_icosahedron());
        assert_eq!(r.stats.contractions, 8);
        assert_eq!(r.log.len(), 8);
        assert!(is_t4(&r.mesh));
        assert_eq!(r.stats.retested_edges, 0);
    }

    #[test]
    fn torus7_is_already_irreducible() {
        let r = run(&meshgen::gen_torus7());
        assert_eq!(r.stats.contractions, 0);
        assert!(r.stats.link_tests <= 21);
        assert!(certify_irreducible(&r.mesh));
    }

    #[test]
    fn genus0_contractions_all_happen_at_first_vertex() {
        for soup in [
            meshgen::refine(&meshgen::gen_icosahedron(), 2),
            meshgen::random::random_sphere(300, 5),
            meshgen::gen_brick(2, 3, &[meshgen::Cell::Cavity; 6]).unwrap(),
        ] {
            let r = run(&soup);
            assert!(is_t4(&r.mesh));
            let first = r.log[0].kept;
            assert!(r.log.iter().all(|c| c.kept == first));
        }
    }

    #[test]
    fn torus_output_size() {
        for (p_, q) in [(8, 8), (5, 9), (12, 4)] {
            let r = run(&meshgen::gen_torus_grid(p_, q).unwrap());
            let nv = r.mesh.n_vertices();
            assert!((7..=10).contains(&nv), "{p_}x{q}: {nv}");
            assert_eq!(r.stats.contractions as usize, p_ * q - nv);
        }
    }

    #[test]
    fn log_replay_reproduces_output() {
        let soup = meshgen::random::perturb(&meshgen::gen_torus_grid::<f64>(6, 6).unwrap(), 60, 11);
        let r = run(&soup);
        let mut replay = soup.build().unwrap();
        for rec in &r.log {
            let e = replay.edge_between(rec.kept, rec.removed).expect("logged edge exists");
            assert_eq!(e, rec.removed_edges[0]);
            let c = replay.contract(e, rec.kept, &mut Vec::new());
            assert_eq!(ContractionRecord::from(c), *rec);
        }
        assert_eq!(replay.edge_pairs(), r.mesh.edge_pairs());
    }

    #[test]
    fn every_surviving_vertex_is_processed() {
        let r = run(&meshgen::gen_brick(2, 2, &meshgen::parse_cells("HCFH").unwrap()).unwrap());
        assert!(r.mesh.vertices().all(|v| r.mesh.attrs(v).processed));
        assert!(certify_irreducible(&r.mesh));
        assert!(r.mesh.n_vertices() <= 26 * 2 - 4);
    }

    #[test]
    fn record_display() {
        let r = run(&meshgen::gen_octahedron());
        let line = r.log[0].to_string();
        assert!(line.starts_with("contract 0 "), "{line}");
        assert!(line.contains("| removed edges [0,"));
    }

    #[test]
    fn fast_test_matches_oracle_on_octahedron() {
        let mesh = meshgen::gen_octahedron::<f64>().build().unwrap();
        for e in mesh.edges() {
            let (a, b) = mesh.endpoints(e);
            for u in [a, b] {
                let mut m = mesh.clone();
                assert!(fast_link_test(&mut m, e, u));
            }
        }
    }
}
