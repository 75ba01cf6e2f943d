//! Comparison reducers: randomized brute force, and the lowest-degree
//! vertex strategy with per-vertex neighbor dictionaries.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dcel::{EdgeId, HalfEdgeId, Mesh, VertexId};
use crate::irreducer::{CheckCounts, ContractionRecord, Reduction};
use crate::stats::{ReductionStats, TestTally};
use crate::topo;
use crate::Scalar;

/// Order in which the brute-force reducer first visits the edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeOrder {
    /// Seeded Fisher–Yates shuffle.
    Shuffled(u64),
    /// Edges failing the link condition in the input first, then the rest,
    /// each group in index order.
    Adversarial,
}

fn reset_degrees<S: Scalar>(mesh: &mut Mesh<S>) {
    let vs: Vec<VertexId> = mesh.vertices().collect();
    for v in vs {
        let d = mesh.outgoing(v).count() as u32;
        *mesh.attrs_mut(v) = crate::dcel::VertexAttrs { degree: d, ..Default::default() };
    }
}

fn euler<S: Scalar>(m: &Mesh<S>) -> i64 {
    m.n_vertices() as i64 - m.n_edges() as i64 + m.n_faces() as i64
}

pub fn brute_force_reduce<S: Scalar>(mesh: Mesh<S>, seed: u64) -> Reduction<S> {
    brute_force_reduce_ordered(mesh, EdgeOrder::Shuffled(seed))
}

/// Sweeps an edge array, contracting every edge that passes the link
/// condition and deferring the rest; repeats over the deferred edges until
/// a sweep contracts nothing.
pub fn brute_force_reduce_ordered<S: Scalar>(mut mesh: Mesh<S>, order: EdgeOrder) -> Reduction<S> {
    let init = Instant::now();
    reset_degrees(&mut mesh);
    let mut edges: Vec<EdgeId> = mesh.edges().collect();
    match order {
        EdgeOrder::Shuffled(seed) => edges.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
        EdgeOrder::Adversarial => {
            let (bad, good): (Vec<_>, Vec<_>) = edges.iter().partition(|&&e| !topo::link_condition_oracle(&mesh, e));
            edges = bad.into_iter().chain(good).collect();
        }
    }
    let mut stats = ReductionStats { init_time: init.elapsed(), ..Default::default() };
    let mut tally = TestTally::with_capacity(mesh.edge_capacity());
    let mut log = Vec::new();
    let mut temp: Vec<HalfEdgeId> = Vec::new();
    let mut marks: HashSet<VertexId> = HashSet::new();

    let start = Instant::now();
    loop {
        let mut deferred = Vec::with_capacity(edges.len());
        let mut contracted = false;
        for &e in &edges {
            if !mesh.edge_alive(e) {
                continue;
            }
            stats.link_tests += 1;
            tally.record(e.index());
            let (u, v) = mesh.endpoints(e);
            marks.clear();
            marks.extend(mesh.neighbors(u));
            let mut common = 0;
            for w in mesh.neighbors(v) {
                if marks.contains(&w) {
                    common += 1;
                }
            }
            stats.link_work += (mesh.degree(u) + mesh.degree(v)) as u64;
            if common == 2 && mesh.n_vertices() > 4 {
                temp.clear();
                let c = mesh.contract(e, u, &mut temp);
                log.push(ContractionRecord::from(c));
                stats.contractions += 1;
                contracted = true;
            } else {
                deferred.push(e);
            }
        }
        edges = deferred;
        if !contracted {
            break;
        }
    }
    stats.reduce_time = start.elapsed();
    stats.retested_edges = tally.retested();
    Reduction { mesh, stats, log, checks: CheckCounts::default() }
}

/// Repeatedly takes a loose vertex of lowest degree and tests its edges in
/// rotational order against its neighbor dictionary. The first edge that
/// passes is contracted into the neighbor; if none passes the vertex is
/// marked trapped for good.
pub fn schipper_reduce<S: Scalar>(mut mesh: Mesh<S>) -> Reduction<S> {
    let init = Instant::now();
    reset_degrees(&mut mesh);
    let cap = mesh.vertex_capacity();
    let mut dict: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); cap];
    let mut trapped = vec![false; cap];
    let mut stamp = vec![0u64; cap];
    let mut buckets: Vec<VecDeque<(VertexId, u64)>> = Vec::new();
    let vertices: Vec<VertexId> = mesh.vertices().collect();
    for &v in &vertices {
        dict[v.index()] = mesh.neighbors(v).collect();
        enqueue(&mut buckets, &mut stamp, v, mesh.degree(v));
    }
    let mut stats = ReductionStats { init_time: init.elapsed(), ..Default::default() };
    let mut tally = TestTally::with_capacity(mesh.edge_capacity());
    let mut log = Vec::new();
    let mut temp = Vec::new();

    let start = Instant::now();
    while let Some(u) = pop_lowest(&mut buckets, &stamp, &mesh, &trapped) {
        let spokes: Vec<HalfEdgeId> = mesh.outgoing(u).collect();
        let mut chosen = None;
        for h in spokes {
            let e = mesh.edge_of(h);
            let v = mesh.destination(h);
            let (x, y) = mesh.apexes(e);
            stats.link_tests += 1;
            tally.record(e.index());
            let du = &dict[u.index()];
            let dv = &dict[v.index()];
            stats.link_work += du.len() as u64;
            let pass = mesh.n_vertices() > 4 && !du.iter().any(|&w| w != v && w != x && w != y && dv.contains(&w));
            if pass {
                chosen = Some((e, v, x, y));
                break;
            }
        }
        let Some((e, v, x, y)) = chosen else {
            trapped[u.index()] = true;
            continue;
        };

        let moved: Vec<VertexId> = dict[u.index()]
            .iter()
            .copied()
            .filter(|&w| w != v && w != x && w != y)
            .collect();
        temp.clear();
        let c = mesh.contract(e, v, &mut temp);
        log.push(ContractionRecord::from(c));
        stats.contractions += 1;

        let du = std::mem::take(&mut dict[u.index()]);
        for &z in &moved {
            dict[z.index()].remove(&u);
            dict[z.index()].insert(v);
        }
        dict[x.index()].remove(&u);
        dict[y.index()].remove(&u);
        let dv = &mut dict[v.index()];
        dv.remove(&u);
        dv.extend(du.into_iter().filter(|&w| w != v));
        debug_assert_eq!(dv.len() as u32, mesh.degree(v));

        for w in [v, x, y] {
            if !trapped[w.index()] {
                enqueue(&mut buckets, &mut stamp, w, mesh.degree(w));
            }
        }
    }
    stats.reduce_time = start.elapsed();
    stats.retested_edges = tally.retested();
    Reduction { mesh, stats, log, checks: CheckCounts::default() }
}

fn enqueue(buckets: &mut Vec<VecDeque<(VertexId, u64)>>, stamp: &mut [u64], v: VertexId, degree: u32) {
    let d = degree as usize;
    if buckets.len() <= d {
        buckets.resize_with(d + 1, VecDeque::new);
    }
    stamp[v.index()] += 1;
    buckets[d].push_back((v, stamp[v.index()]));
}

fn pop_lowest<S: Scalar>(
    buckets: &mut [VecDeque<(VertexId, u64)>],
    stamp: &[u64],
    mesh: &Mesh<S>,
    trapped: &[bool],
) -> Option<VertexId> {
    for bucket in buckets.iter_mut().skip(3) {
        while let Some((v, s)) = bucket.pop_front() {
            if s == stamp[v.index()] && mesh.vertex_alive(v) && !trapped[v.index()] {
                return Some(v);
            }
        }
    }
    None
}

/// Euler characteristic preserved and output irreducible.
pub fn output_is_sound<S: Scalar>(input: &Mesh<S>, output: &Mesh<S>) -> bool {
    euler(input) == euler(output) && topo::certify_irreducible(output)
}
