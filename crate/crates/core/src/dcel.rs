//! Augmented doubly-connected edge list for closed surface triangulations.
//!
//! Elements live in index-addressed arrays and carry an `alive` flag.
//! Dead elements are never reused, so handles stay meaningful for the
//! whole lifetime of a mesh (contraction logs refer to them).
//!
//! Each vertex record carries the per-vertex attributes used by the
//! reducer ([`VertexAttrs`]); the structure itself only maintains the
//! topology.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::Scalar;

macro_rules! handle {
    ($(#[$meta:meta])* $name:ident, $prefix:literal) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

handle!(
    /// Vertex handle. Equal to the vertex index of the input soup.
    VertexId,
    "v"
);
handle!(
    /// Undirected edge handle.
    EdgeId,
    "e"
);
handle!(
    /// Triangle handle.
    FaceId,
    "f"
);
handle!(
    /// Half-edge handle.
    HalfEdgeId,
    "h"
);

/// A time stamp; `None` plays the role of the `-1` sentinel and orders
/// before every real stamp.
pub type Stamp = Option<u64>;

/// Per-vertex attributes maintained by the reducer. The meaning of every
/// field except `degree` is relative to the vertex currently being
/// processed, `u`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VertexAttrs {
    /// Current degree.
    pub degree: u32,
    /// Processed, or removed by a contraction.
    pub processed: bool,
    /// Set to `u` while this vertex is (or once was) a neighbor of `u`.
    /// Never cleared.
    pub neighbor_of: Option<VertexId>,
    /// Number of critical cycles through the edge to `u`.
    pub cycles: u32,
    /// Time at which this vertex became a neighbor of `u`.
    pub discovered: Stamp,
    /// Time at which the edge to `u` left the untested list.
    pub tested: Stamp,
}

#[derive(Clone, Debug)]
pub struct VertexRecord {
    pub he: HalfEdgeId,
    pub attrs: VertexAttrs,
    pub alive: bool,
}

#[derive(Clone, Debug)]
pub struct EdgeRecord {
    pub h1: HalfEdgeId,
    pub h2: HalfEdgeId,
    pub alive: bool,
}

#[derive(Clone, Debug)]
pub struct HalfEdgeRecord {
    pub origin: VertexId,
    pub prev: HalfEdgeId,
    pub next: HalfEdgeId,
    pub edge: EdgeId,
    pub face: FaceId,
    pub alive: bool,
}

#[derive(Clone, Debug)]
pub struct FaceRecord {
    pub he: HalfEdgeId,
    pub alive: bool,
}

/// One entry of a vertex link, in rotational order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkEntry {
    /// The link vertex `w`.
    pub vertex: VertexId,
    /// The edge `[v, w]`.
    pub spoke: EdgeId,
    /// The link edge from `w` to the next link vertex.
    pub rim: EdgeId,
}

/// What a [`Mesh::collapse`] removed and which edges survived.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Collapsed {
    pub kept: VertexId,
    pub removed: VertexId,
    /// Apexes of the contracted edge.
    pub x: VertexId,
    pub y: VertexId,
    /// `[u, v]`, `[v, x]`, `[v, y]`.
    pub removed_edges: [EdgeId; 3],
    /// `[u, v, x]`, `[u, v, y]`.
    pub removed_faces: [FaceId; 2],
    /// Surviving edges `[u, x]` and `[u, y]`.
    pub edge_ux: EdgeId,
    pub edge_uy: EdgeId,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {triangle} references vertex {index}, but only {count} vertices exist")]
    IndexOutOfRange { triangle: usize, index: usize, count: usize },
    #[error("triangle {triangle} repeats a vertex")]
    DegenerateTriangle { triangle: usize },
    #[error("edge {a}-{b} is incident on {count} triangles, expected 2")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
    #[error("edge {a}-{b} is traversed twice in the same direction (inconsistent orientation)")]
    InconsistentOrientation { a: usize, b: usize },
    #[error("vertex {vertex} does not have a disk neighborhood")]
    NonManifoldVertex { vertex: usize },
    #[error("vertex {vertex} has degree {degree}, below the minimum of 3")]
    LowDegree { vertex: usize, degree: usize },
    #[error("surface is not connected")]
    Disconnected,
    #[error("{kind} handle {index} is dead or out of range")]
    DeadHandle { kind: &'static str, index: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Closed triangulated surface stored as an augmented DCEL.
#[derive(Clone, Debug)]
pub struct Mesh<S> {
    pub(crate) vertices: Vec<VertexRecord>,
    pub(crate) edges: Vec<EdgeRecord>,
    pub(crate) faces: Vec<FaceRecord>,
    pub(crate) half_edges: Vec<HalfEdgeRecord>,
    positions: Vec<[S; 3]>,
    n_v: usize,
    n_e: usize,
    n_f: usize,
}

impl<S: Scalar> Mesh<S> {
    /// Builds a mesh from indexed triangles, rejecting anything that is not
    /// a triangulation of a closed, connected, orientable surface with a
    /// simple graph and minimum degree 3.
    pub fn from_triangles(positions: Vec<[S; 3]>, triangles: &[[usize; 3]]) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let nv = positions.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i >= nv {
                    return Err(MeshError::IndexOutOfRange { triangle: t, index: i, count: nv });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
        }

        // Count undirected incidences first so that non-manifold edges are
        // reported as such rather than as orientation clashes.
        let mut undirected: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
        for tri in triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *undirected.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut bad: Vec<_> = undirected.iter().filter(|(_, &c)| c != 2).collect();
        bad.sort();
        if let Some((&(a, b), &count)) = bad.first() {
            return Err(MeshError::NonManifoldEdge { a, b, count });
        }

        let nf = triangles.len();
        let mut half_edges = Vec::with_capacity(3 * nf);
        let mut faces = Vec::with_capacity(nf);
        let mut directed: HashMap<(usize, usize), HalfEdgeId> = HashMap::with_capacity(3 * nf);
        for (t, tri) in triangles.iter().enumerate() {
            let base = 3 * t as u32;
            for k in 0..3u32 {
                let (a, b) = (tri[k as usize], tri[((k + 1) % 3) as usize]);
                let h = HalfEdgeId(base + k);
                if directed.insert((a, b), h).is_some() {
                    return Err(MeshError::InconsistentOrientation { a: a.min(b), b: a.max(b) });
                }
                half_edges.push(HalfEdgeRecord {
                    origin: VertexId(a as u32),
                    prev: HalfEdgeId(base + (k + 2) % 3),
                    next: HalfEdgeId(base + (k + 1) % 3),
                    edge: EdgeId(u32::MAX),
                    face: FaceId(t as u32),
                    alive: true,
                });
            }
            faces.push(FaceRecord { he: HalfEdgeId(base), alive: true });
        }

        let mut edges = Vec::with_capacity(undirected.len());
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if a > b {
                    continue;
                }
                let h1 = HalfEdgeId((3 * t + k) as u32);
                let h2 = match directed.get(&(b, a)) {
                    Some(&h) => h,
                    None => return Err(MeshError::InconsistentOrientation { a, b }),
                };
                let e = EdgeId(edges.len() as u32);
                edges.push(EdgeRecord { h1, h2, alive: true });
                half_edges[h1.index()].edge = e;
                half_edges[h2.index()].edge = e;
            }
        }

        let mut out_count = vec![0usize; nv];
        let mut vertices: Vec<VertexRecord> = (0..nv)
            .map(|_| VertexRecord { he: HalfEdgeId(u32::MAX), attrs: VertexAttrs::default(), alive: true })
            .collect();
        for (i, he) in half_edges.iter().enumerate() {
            let v = he.origin.index();
            out_count[v] += 1;
            if vertices[v].he.0 == u32::MAX {
                vertices[v].he = HalfEdgeId(i as u32);
            }
        }
        if let Some(v) = (0..nv).find(|&v| out_count[v] == 0) {
            return Err(MeshError::LowDegree { vertex: v, degree: 0 });
        }

        let mut mesh = Mesh {
            vertices,
            edges,
            faces,
            half_edges,
            positions,
            n_v: nv,
            n_e: undirected.len(),
            n_f: nf,
        };

        for (v, &expected) in out_count.iter().enumerate() {
            let vid = VertexId(v as u32);
            let ring = mesh.outgoing(vid).count();
            if ring != expected {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
            if ring < 3 {
                return Err(MeshError::LowDegree { vertex: v, degree: ring });
            }
            mesh.vertices[v].attrs.degree = ring as u32;
        }

        // A vertex ring of distinct neighbors rules out parallel edges around it.
        for v in 0..nv {
            let vid = VertexId(v as u32);
            let mut seen = HashSet::new();
            for h in mesh.outgoing(vid) {
                if !seen.insert(mesh.destination(h)) {
                    return Err(MeshError::NonManifoldVertex { vertex: v });
                }
            }
        }

        if !mesh.is_connected() {
            return Err(MeshError::Disconnected);
        }
        Ok(mesh)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_v
    }

    pub fn n_edges(&self) -> usize {
        self.n_e
    }

    pub fn n_faces(&self) -> usize {
        self.n_f
    }

    /// Sizes of the underlying arrays, including dead elements.
    pub fn vertex_capacity(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_capacity(&self) -> usize {
        self.edges.len()
    }

    pub fn position(&self, v: VertexId) -> [S; 3] {
        self.positions[v.index()]
    }

    pub fn positions(&self) -> &[[S; 3]] {
        &self.positions
    }

    pub fn vertex_alive(&self, v: VertexId) -> bool {
        self.vertices.get(v.index()).is_some_and(|r| r.alive)
    }

    pub fn edge_alive(&self, e: EdgeId) -> bool {
        self.edges.get(e.index()).is_some_and(|r| r.alive)
    }

    pub fn face_alive(&self, f: FaceId) -> bool {
        self.faces.get(f.index()).is_some_and(|r| r.alive)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, r)| r.alive)
            .map(|(i, _)| VertexId(i as u32))
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, r)| r.alive)
            .map(|(i, _)| EdgeId(i as u32))
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, r)| r.alive)
            .map(|(i, _)| FaceId(i as u32))
    }

    #[inline]
    pub fn attrs(&self, v: VertexId) -> &VertexAttrs {
        &self.vertices[v.index()].attrs
    }

    #[inline]
    pub fn attrs_mut(&mut self, v: VertexId) -> &mut VertexAttrs {
        &mut self.vertices[v.index()].attrs
    }

    /// Stored degree attribute (maintained by the caller of `collapse`).
    #[inline]
    pub fn degree(&self, v: VertexId) -> u32 {
        self.vertices[v.index()].attrs.degree
    }

    #[inline]
    pub fn vertex_he(&self, v: VertexId) -> HalfEdgeId {
        self.vertices[v.index()].he
    }

    #[inline]
    pub fn edge_half_edges(&self, e: EdgeId) -> (HalfEdgeId, HalfEdgeId) {
        let r = &self.edges[e.index()];
        (r.h1, r.h2)
    }

    #[inline]
    pub fn face_he(&self, f: FaceId) -> HalfEdgeId {
        self.faces[f.index()].he
    }

    #[inline]
    pub fn origin(&self, h: HalfEdgeId) -> VertexId {
        self.half_edges[h.index()].origin
    }

    #[inline]
    pub fn next(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.half_edges[h.index()].next
    }

    #[inline]
    pub fn prev(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.half_edges[h.index()].prev
    }

    #[inline]
    pub fn edge_of(&self, h: HalfEdgeId) -> EdgeId {
        self.half_edges[h.index()].edge
    }

    #[inline]
    pub fn face_of(&self, h: HalfEdgeId) -> FaceId {
        self.half_edges[h.index()].face
    }

    /// Opposite half-edge, found through the edge record.
    #[inline]
    pub fn mate(&self, h: HalfEdgeId) -> HalfEdgeId {
        let e = &self.edges[self.half_edges[h.index()].edge.index()];
        if e.h1 == h {
            e.h2
        } else {
            e.h1
        }
    }

    /// Checked variant of [`Mesh::mate`].
    pub fn try_mate(&self, h: HalfEdgeId) -> Result<HalfEdgeId, MeshError> {
        match self.half_edges.get(h.index()) {
            Some(r) if r.alive => Ok(self.mate(h)),
            _ => Err(MeshError::DeadHandle { kind: "half-edge", index: h.index() }),
        }
    }

    #[inline]
    pub fn destination(&self, h: HalfEdgeId) -> VertexId {
        self.origin(self.next(h))
    }

    /// Endpoints of an edge, `(origin(h1), origin(h2))`.
    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let r = &self.edges[e.index()];
        (self.origin(r.h1), self.origin(r.h2))
    }

    /// The half-edge of `e` leaving `v`.
    #[inline]
    pub fn half_edge_from(&self, e: EdgeId, v: VertexId) -> HalfEdgeId {
        let r = &self.edges[e.index()];
        if self.origin(r.h1) == v {
            r.h1
        } else {
            debug_assert_eq!(self.origin(r.h2), v);
            r.h2
        }
    }

    /// Endpoint of `e` other than `v`.
    #[inline]
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.endpoints(e);
        if a == v {
            b
        } else {
            a
        }
    }

    /// Half-edges leaving `v`, in rotational order starting at `he(v)`.
    pub fn outgoing(&self, v: VertexId) -> Outgoing<'_, S> {
        let start = self.vertices[v.index()].he;
        Outgoing { mesh: self, start, current: Some(start) }
    }

    /// Neighbors of `v` in rotational order.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.outgoing(v).map(|h| self.destination(h))
    }

    /// The link of `v`: its neighbors, spokes and rim edges in rotational order.
    pub fn link_of_vertex(&self, v: VertexId) -> Result<Vec<LinkEntry>, MeshError> {
        self.check_vertex(v)?;
        Ok(self
            .outgoing(v)
            .map(|h| LinkEntry {
                vertex: self.destination(h),
                spoke: self.edge_of(h),
                rim: self.edge_of(self.prev(self.mate(h))),
            })
            .collect())
    }

    /// The two apexes of the faces incident on `e`. The first is the apex of
    /// the face containing `h1(e)`.
    pub fn link_of_edge(&self, e: EdgeId) -> Result<(VertexId, VertexId), MeshError> {
        self.check_edge(e)?;
        Ok(self.apexes(e))
    }

    #[inline]
    pub(crate) fn apexes(&self, e: EdgeId) -> (VertexId, VertexId) {
        let r = &self.edges[e.index()];
        (self.origin(self.prev(r.h1)), self.origin(self.prev(r.h2)))
    }

    /// Finds the edge joining `a` and `b` by walking the rotation of `a`.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.outgoing(a).find(|&h| self.destination(h) == b).map(|h| self.edge_of(h))
    }

    /// The three vertices of a face, following `next` from `he(f)`.
    pub fn face_vertices(&self, f: FaceId) -> [VertexId; 3] {
        let h = self.faces[f.index()].he;
        let h1 = self.next(h);
        [self.origin(h), self.origin(h1), self.origin(self.next(h1))]
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<(), MeshError> {
        if self.vertex_alive(v) {
            Ok(())
        } else {
            Err(MeshError::DeadHandle { kind: "vertex", index: v.index() })
        }
    }

    pub(crate) fn check_edge(&self, e: EdgeId) -> Result<(), MeshError> {
        if self.edge_alive(e) {
            Ok(())
        } else {
            Err(MeshError::DeadHandle { kind: "edge", index: e.index() })
        }
    }

    fn is_connected(&self) -> bool {
        let Some(start) = self.vertices().next() else {
            return false;
        };
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![start];
        seen[start.index()] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n_v
    }

    /// Contracts `e = [keep, v]`, identifying `v` with `keep`.
    ///
    /// Removes `v`, the edges `[u,v]`, `[v,x]`, `[v,y]` and the faces
    /// `[u,v,x]`, `[u,v,y]`; every other edge `[v,z]` keeps its identity and
    /// becomes `[u,z]`. The re-origined half-edges are appended to `temp` in
    /// rotational order. Degree attributes are left to the caller.
    ///
    /// The caller must have established that `e` is contractible.
    pub fn collapse(&mut self, e: EdgeId, keep: VertexId, temp: &mut Vec<HalfEdgeId>) -> Collapsed {
        let u = keep;
        // h runs from u to v inside face [u, v, x].
        let h = self.half_edge_from(e, u);
        let v = self.destination(h);
        let mh = self.mate(h);
        let x = self.origin(self.prev(h));
        let y = self.origin(self.prev(mh));

        // h1: x -> v, h2: v -> y; both survive.
        let h1 = self.mate(self.next(h));
        let h2 = self.mate(self.prev(mh));
        let e1 = self.edge_of(h1);
        let e2 = self.edge_of(h2);

        let mut h3 = self.next(h1);
        while h3 != h2 {
            self.half_edges[h3.index()].origin = u;
            temp.push(h3);
            h3 = self.next(self.mate(h3));
        }
        self.half_edges[h2.index()].origin = u;

        let dead_ux = self.prev(h); // x -> u
        let dead_uy = self.next(mh); // u -> y
        let f = self.edge_of(dead_ux);
        let g = self.edge_of(dead_uy);
        let ux = self.mate(dead_ux); // u -> x
        let yu = self.mate(dead_uy); // y -> u

        self.edges[f.index()].h1 = ux;
        self.edges[f.index()].h2 = h1;
        self.half_edges[h1.index()].edge = f;
        self.edges[g.index()].h1 = yu;
        self.edges[g.index()].h2 = h2;
        self.half_edges[h2.index()].edge = g;

        self.vertices[u.index()].he = h2;
        if self.vertices[x.index()].he == dead_ux {
            self.vertices[x.index()].he = h1;
        }
        if self.vertices[y.index()].he == self.prev(mh) {
            self.vertices[y.index()].he = yu;
        }

        let f1 = self.face_of(h);
        let f2 = self.face_of(mh);
        for dead in [h, self.next(h), dead_ux, mh, dead_uy, self.prev(mh)] {
            self.half_edges[dead.index()].alive = false;
        }
        for dead in [e, e1, e2] {
            self.edges[dead.index()].alive = false;
        }
        self.faces[f1.index()].alive = false;
        self.faces[f2.index()].alive = false;
        self.vertices[v.index()].alive = false;
        self.n_v -= 1;
        self.n_e -= 3;
        self.n_f -= 2;

        Collapsed {
            kept: u,
            removed: v,
            x,
            y,
            removed_edges: [e, e1, e2],
            removed_faces: [f1, f2],
            edge_ux: f,
            edge_uy: g,
        }
    }

    /// [`Mesh::collapse`] followed by the degree bookkeeping for `u`, `x`
    /// and `y`.
    pub fn contract(&mut self, e: EdgeId, keep: VertexId, temp: &mut Vec<HalfEdgeId>) -> Collapsed {
        let (a, b) = self.endpoints(e);
        let removed = if a == keep { b } else { a };
        let dv = self.degree(removed);
        let c = self.collapse(e, keep, temp);
        self.attrs_mut(c.x).degree -= 1;
        self.attrs_mut(c.y).degree -= 1;
        let du = &mut self.attrs_mut(c.kept).degree;
        *du = *du + dv - 4;
        c
    }

    /// Full structural check: face loops, mate involution, edge pairing,
    /// vertex rings, stored degrees, simplicity and element counts.
    pub fn validate(&self) -> Result<(), MeshError> {
        let fail = |msg: String| Err(MeshError::Invariant(msg));

        let mut live_half_edges = 0usize;
        for (i, r) in self.half_edges.iter().enumerate() {
            if !r.alive {
                continue;
            }
            live_half_edges += 1;
            let h = HalfEdgeId(i as u32);
            if !self.face_alive(r.face) {
                return fail(format!("{h:?} belongs to dead face {:?}", r.face));
            }
            if !self.edge_alive(r.edge) {
                return fail(format!("{h:?} belongs to dead edge {:?}", r.edge));
            }
            if !self.vertex_alive(r.origin) {
                return fail(format!("{h:?} starts at dead vertex {:?}", r.origin));
            }
            if self.prev(self.next(h)) != h || self.next(self.prev(h)) != h {
                return fail(format!("next/prev of {h:?} are not inverse"));
            }
            if self.next(self.next(self.next(h))) != h {
                return fail(format!("face loop through {h:?} is not a triangle"));
            }
            let m = self.mate(h);
            if m == h || self.mate(m) != h {
                return fail(format!("mate of {h:?} is not an involution"));
            }
            if self.origin(m) != self.destination(h) {
                return fail(format!("{h:?} and its mate do not run in opposite directions"));
            }
            if self.face_of(m) == r.face {
                return fail(format!("{h:?} and its mate lie in the same face"));
            }
        }

        for f in self.faces() {
            let h = self.face_he(f);
            if !self.half_edges[h.index()].alive || self.face_of(h) != f {
                return fail(format!("{f:?} points to a foreign half-edge"));
            }
            let [a, b, c] = self.face_vertices(f);
            if a == b || b == c || a == c {
                return fail(format!("{f:?} has repeated vertices"));
            }
        }

        let mut pairs = HashSet::with_capacity(self.n_e);
        for e in self.edges() {
            let (h1, h2) = self.edge_half_edges(e);
            for h in [h1, h2] {
                if !self.half_edges[h.index()].alive || self.edge_of(h) != e {
                    return fail(format!("{e:?} references a foreign half-edge"));
                }
            }
            let (a, b) = self.endpoints(e);
            if a == b {
                return fail(format!("{e:?} is a loop"));
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                return fail(format!("{e:?} duplicates edge {a:?}-{b:?}"));
            }
        }

        let mut out_count = vec![0u32; self.vertices.len()];
        for r in self.half_edges.iter().filter(|r| r.alive) {
            out_count[r.origin.index()] += 1;
        }
        for v in self.vertices() {
            let he = self.vertex_he(v);
            if !self.half_edges[he.index()].alive || self.origin(he) != v {
                return fail(format!("{v:?} points to a half-edge it does not originate"));
            }
            let ring = self.outgoing(v).count() as u32;
            if ring != out_count[v.index()] {
                return fail(format!("{v:?} does not have a disk neighborhood"));
            }
            if ring < 3 {
                return fail(format!("{v:?} has degree {ring}"));
            }
            if self.degree(v) != ring {
                return fail(format!("{v:?} stores degree {} but has {ring}", self.degree(v)));
            }
        }

        let nv = self.vertices().count();
        let ne = self.edges().count();
        let nf = self.faces().count();
        if (nv, ne, nf) != (self.n_v, self.n_e, self.n_f) {
            return fail(format!(
                "live counts ({nv}, {ne}, {nf}) disagree with ({}, {}, {})",
                self.n_v, self.n_e, self.n_f
            ));
        }
        if live_half_edges != 2 * ne || 3 * nf != 2 * ne {
            return fail(format!("{live_half_edges} half-edges for {ne} edges and {nf} faces"));
        }
        Ok(())
    }

    /// Live triangles renumbered densely, with the positions of the live
    /// vertices. Vertices are renumbered in increasing handle order.
    pub fn to_triangles(&self) -> (Vec<[S; 3]>, Vec<[usize; 3]>) {
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut positions = Vec::with_capacity(self.n_v);
        for v in self.vertices() {
            remap[v.index()] = positions.len();
            positions.push(self.positions[v.index()]);
        }
        let triangles = self
            .faces()
            .map(|f| self.face_vertices(f).map(|v| remap[v.index()]))
            .collect();
        (positions, triangles)
    }

    /// Sorted list of undirected edges as vertex-handle pairs.
    pub fn edge_pairs(&self) -> Vec<(VertexId, VertexId)> {
        let mut out: Vec<_> = self
            .edges()
            .map(|e| {
                let (a, b) = self.endpoints(e);
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort();
        out
    }
}

/// Rotation around a vertex: `h -> next(mate(h))`.
pub struct Outgoing<'a, S> {
    mesh: &'a Mesh<S>,
    start: HalfEdgeId,
    current: Option<HalfEdgeId>,
}

impl<S: Scalar> Iterator for Outgoing<'_, S> {
    type Item = HalfEdgeId;

    fn next(&mut self) -> Option<HalfEdgeId> {
        let h = self.current?;
        let n = self.mesh.next(self.mesh.mate(h));
        self.current = if n == self.start { None } else { Some(n) };
        Some(h)
    }
}
