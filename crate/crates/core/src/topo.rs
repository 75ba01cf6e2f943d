//! Topological queries used as independent oracles: Euler characteristic
//! and genus, T4 recognition, the link condition by explicit set
//! intersection, critical-cycle counts and irreducibility certification.
//!
//! Nothing here reads the reducer's per-vertex attributes, so these
//! functions can falsify them.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::dcel::{EdgeId, Mesh, VertexId};
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopologyReport {
    pub n_v: usize,
    pub n_e: usize,
    pub n_f: usize,
    pub euler: i64,
    pub genus: u32,
    pub is_t4: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("not a closed orientable surface: Euler characteristic {euler}")]
    NotClosedOrientable { euler: i64 },
}

impl TopologyReport {
    /// Report from raw counts. `is_t4` is decided from the counts alone,
    /// which is exact for valid triangulations.
    pub fn from_counts(n_v: usize, n_e: usize, n_f: usize) -> Result<Self, TopologyError> {
        let euler = n_v as i64 - n_e as i64 + n_f as i64;
        let twice_genus = 2 - euler;
        if twice_genus < 0 || twice_genus % 2 != 0 {
            return Err(TopologyError::NotClosedOrientable { euler });
        }
        Ok(TopologyReport {
            n_v,
            n_e,
            n_f,
            euler,
            genus: (twice_genus / 2) as u32,
            is_t4: (n_v, n_e, n_f) == (4, 6, 4),
        })
    }
}

pub fn euler_genus<S: Scalar>(m: &Mesh<S>) -> Result<TopologyReport, TopologyError> {
    let mut r = TopologyReport::from_counts(m.n_vertices(), m.n_edges(), m.n_faces())?;
    r.is_t4 = is_t4(m);
    Ok(r)
}

/// Four vertices, each of degree 3 (degrees counted from the rotation,
/// not the stored attribute).
pub fn is_t4<S: Scalar>(m: &Mesh<S>) -> bool {
    m.n_vertices() == 4 && m.vertices().all(|v| m.outgoing(v).count() == 3)
}

fn neighbor_set<S: Scalar>(m: &Mesh<S>, v: VertexId) -> HashSet<VertexId> {
    m.neighbors(v).collect()
}

fn rim_set<S: Scalar>(m: &Mesh<S>, v: VertexId) -> HashSet<(VertexId, VertexId)> {
    m.outgoing(v)
        .map(|h| {
            let a = m.destination(h);
            let b = m.destination(m.next(h));
            (a.min(b), a.max(b))
        })
        .collect()
}

/// True iff `lk(u) ∩ lk(v) = lk(e)` for `e = [u, v]`, comparing both the
/// vertices and the edges of the two links.
pub fn link_condition_oracle<S: Scalar>(m: &Mesh<S>, e: EdgeId) -> bool {
    let (u, v) = m.endpoints(e);
    let (x, y) = m.apexes(e);
    let nu = neighbor_set(m, u);
    let nv = neighbor_set(m, v);
    let common: HashSet<VertexId> = nu.intersection(&nv).copied().collect();
    if common.len() != 2 || !common.contains(&x) || !common.contains(&y) {
        return false;
    }
    // With only x and y in common, a shared link edge can only be [x, y],
    // which happens exactly when the surface is T4.
    rim_set(m, u).is_disjoint(&rim_set(m, v))
}

/// Number of critical 3-cycles `(u, v, z)` through `e = [u, v]`.
pub fn critical_cycles_through<S: Scalar>(m: &Mesh<S>, e: EdgeId) -> usize {
    let (u, v) = m.endpoints(e);
    let nu = neighbor_set(m, u);
    neighbor_set(m, v).intersection(&nu).count() - 2
}

pub fn contractible_edges<S: Scalar>(m: &Mesh<S>) -> Vec<EdgeId> {
    m.edges().filter(|&e| link_condition_oracle(m, e)).collect()
}

/// True iff no live edge satisfies the link condition (T4 included).
pub fn certify_irreducible<S: Scalar>(m: &Mesh<S>) -> bool {
    is_t4(m) || m.edges().all(|e| !link_condition_oracle(m, e))
}

/// True iff every edge incident on `v` fails the link condition.
pub fn is_trapped<S: Scalar>(m: &Mesh<S>, v: VertexId) -> bool {
    m.outgoing(v).all(|h| !link_condition_oracle(m, m.edge_of(h)))
}

/// Number of edges per critical-cycle count.
pub fn critical_cycle_histogram<S: Scalar>(m: &Mesh<S>) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for e in m.edges() {
        *hist.entry(critical_cycles_through(m, e)).or_insert(0) += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen;

    #[test]
    fn counts_to_genus() {
        let r = TopologyReport::from_counts(4, 6, 4).unwrap();
        assert_eq!((r.euler, r.genus), (2, 0));
        assert_eq!(TopologyReport::from_counts(20000, 60024, 40016).unwrap().genus, 5);
        assert_eq!(TopologyReport::from_counts(7, 21, 14).unwrap().genus, 1);
        assert!(TopologyReport::from_counts(4, 7, 4).is_err());
        assert!(TopologyReport::from_counts(5, 6, 4).is_err());
    }

    #[test]
    fn t4_recognition() {
        let t4 = meshgen::gen_tetrahedron::<f64>().build().unwrap();
        assert!(is_t4(&t4));
        assert!(euler_genus(&t4).unwrap().is_t4);
        let oct = meshgen::gen_octahedron::<f64>().build().unwrap();
        assert!(!is_t4(&oct));
    }

    #[test]
    fn t4_edges_fail_but_have_no_critical_cycle() {
        let t4 = meshgen::gen_tetrahedron::<f64>().build().unwrap();
        for e in t4.edges() {
            assert!(!link_condition_oracle(&t4, e));
            assert_eq!(critical_cycles_through(&t4, e), 0);
        }
        assert!(certify_irreducible(&t4));
    }

    #[test]
    fn octahedron_edges_all_contractible() {
        let oct = meshgen::gen_octahedron::<f64>().build().unwrap();
        assert_eq!(contractible_edges(&oct).len(), 12);
        assert!(!certify_irreducible(&oct));
    }

    #[test]
    fn torus7_is_irreducible() {
        let m = meshgen::gen_torus7::<f64>().build().unwrap();
        assert_eq!(m.n_edges(), 21);
        assert_eq!(euler_genus(&m).unwrap().genus, 1);
        assert!(certify_irreducible(&m));
        // K7: every pair of adjacent vertices has 5 common neighbors.
        assert_eq!(critical_cycle_histogram(&m), BTreeMap::from([(3, 21)]));
    }

    #[test]
    fn stacked_face_creates_one_critical_cycle() {
        // Stacking a vertex onto face (a, b, c) of the octahedron leaves the
        // old face as a non-facial 3-cycle.
        let soup = meshgen::random::stack_face(&meshgen::gen_octahedron::<f64>(), 0);
        let m = soup.build().unwrap();
        let [a, b, _] = soup.triangles[0];
        let e = m.edge_between(VertexId(a as u32), VertexId(b as u32)).unwrap();
        assert_eq!(critical_cycles_through(&m, e), 1);
        assert!(!link_condition_oracle(&m, e));
    }

    #[test]
    fn theorem_one_equivalence_on_fixtures() {
        for soup in meshgen::small_fixtures::<f64>() {
            let m = soup.1.build().unwrap();
            let t4 = is_t4(&m);
            for e in m.edges() {
                assert_eq!(
                    link_condition_oracle(&m, e),
                    critical_cycles_through(&m, e) == 0 && !t4,
                    "{} edge {e:?}",
                    soup.0
                );
            }
        }
    }
}
