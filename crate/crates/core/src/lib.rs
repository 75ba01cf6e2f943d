//! Reduction of closed, connected, orientable surface triangulations to
//! irreducible triangulations by topology-preserving edge contractions.
//!
//! The crate is organized as:
//!
//! * [`dcel`]: the augmented doubly-connected edge list and the edge
//!   collapse surgery.
//! * [`topo`]: Euler characteristic, genus, the link-condition oracle and
//!   irreducibility certification.
//! * [`irreducer`]: the vertex-at-a-time reducer with timestamped
//!   critical-cycle counters (each edge is tested at most once).
//! * [`baselines`]: the randomized brute-force reducer and the
//!   lowest-degree-vertex reducer used for comparison.
//! * [`meshio`], [`meshgen`]: OFF input/output and benchmark mesh families.
//! * [`bench`]: the benchmark driver that emits CSV rows.
//!
//! Vertex positions are carried as opaque payload and never influence the
//! combinatorial algorithms; everything positional is generic over
//! [`Scalar`].

pub mod baselines;
pub mod bench;
pub mod dcel;
pub mod irreducer;
pub mod meshgen;
pub mod meshio;
mod scalar;
pub mod stats;
pub mod topo;

pub use dcel::{EdgeId, FaceId, HalfEdgeId, Mesh, MeshError, VertexId};
pub use irreducer::{reduce, ContractionRecord, Engine, EngineOptions, Reduction};
pub use meshio::TriangleSoup;
pub use scalar::Scalar;
pub use stats::ReductionStats;
pub use topo::TopologyReport;

/// Double-precision mesh, the default used by the CLI.
pub type MeshF64 = Mesh<f64>;
/// Single-precision mesh.
pub type MeshF32 = Mesh<f32>;
/// Double-precision triangle soup.
pub type SoupF64 = TriangleSoup<f64>;
/// Single-precision triangle soup.
pub type SoupF32 = TriangleSoup<f32>;
