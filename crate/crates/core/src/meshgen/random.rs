//! Seeded random edits that keep a soup a valid closed triangulation:
//! face stacking, edge splits, checked edge flips and relabeling. Used to
//! build stress inputs with many critical cycles.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::meshio::TriangleSoup;
use crate::Scalar;

/// Incremental editor over a valid soup. Keeps a directed-edge index so
/// each edit is O(1) amortized.
struct Editor<S> {
    positions: Vec<[S; 3]>,
    triangles: Vec<[usize; 3]>,
    directed: HashMap<(usize, usize), usize>,
    degree: Vec<usize>,
}

impl<S: Scalar> Editor<S> {
    fn new(soup: &TriangleSoup<S>) -> Self {
        let mut ed = Editor {
            positions: soup.positions.clone(),
            triangles: Vec::with_capacity(soup.triangles.len()),
            directed: HashMap::with_capacity(3 * soup.triangles.len()),
            degree: vec![0; soup.positions.len()],
        };
        for &t in &soup.triangles {
            ed.push(t);
        }
        ed
    }

    fn push(&mut self, t: [usize; 3]) {
        let id = self.triangles.len();
        self.triangles.push(t);
        self.index(id);
        for &v in &t {
            self.degree[v] += 1;
        }
    }

    fn index(&mut self, id: usize) {
        let t = self.triangles[id];
        for k in 0..3 {
            self.directed.insert((t[k], t[(k + 1) % 3]), id);
        }
    }

    fn unindex(&mut self, id: usize) {
        let t = self.triangles[id];
        for k in 0..3 {
            let key = (t[k], t[(k + 1) % 3]);
            // A neighbor edited earlier in the same operation may already own it.
            if self.directed.get(&key) == Some(&id) {
                self.directed.remove(&key);
            }
        }
    }

    /// Replaces triangle `id` in place.
    fn replace(&mut self, id: usize, t: [usize; 3]) {
        for &v in &self.triangles[id] {
            self.degree[v] -= 1;
        }
        self.unindex(id);
        self.triangles[id] = t;
        self.index(id);
        for &v in &t {
            self.degree[v] += 1;
        }
    }

    fn add_vertex(&mut self, members: &[usize]) -> usize {
        let n = S::lit(members.len() as f64);
        let mut q = [S::zero(); 3];
        for &m in members {
            for (qk, pk) in q.iter_mut().zip(self.positions[m]) {
                *qk = *qk + pk / n;
            }
        }
        self.positions.push(q);
        self.degree.push(0);
        self.positions.len() - 1
    }

    fn stack(&mut self, id: usize) {
        let [a, b, c] = self.triangles[id];
        let s = self.add_vertex(&[a, b, c]);
        self.replace(id, [a, b, s]);
        self.push([b, c, s]);
        self.push([c, a, s]);
    }

    /// Splits the edge traversed `a -> b` by triangle `id`.
    fn split(&mut self, id: usize, k: usize) {
        let t = self.triangles[id];
        let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
        let other = self.directed[&(b, a)];
        let o = self.triangles[other];
        let d = o.into_iter().find(|&v| v != a && v != b).expect("triangle apex");
        let m = self.add_vertex(&[a, b]);
        self.replace(id, [a, m, c]);
        self.push([m, b, c]);
        self.replace(other, [b, m, d]);
        self.push([m, a, d]);
    }

    /// Flips the edge traversed `a -> b` by triangle `id` if the result is
    /// still a simple triangulation with minimum degree 3.
    fn flip(&mut self, id: usize, k: usize) -> bool {
        let t = self.triangles[id];
        let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
        let other = self.directed[&(b, a)];
        let o = self.triangles[other];
        let d = o.into_iter().find(|&v| v != a && v != b).expect("triangle apex");
        if c == d || self.degree[a] <= 3 || self.degree[b] <= 3 {
            return false;
        }
        if self.directed.contains_key(&(c, d)) || self.directed.contains_key(&(d, c)) {
            return false;
        }
        self.replace(id, [c, a, d]);
        self.replace(other, [d, b, c]);
        true
    }

    fn into_soup(self) -> TriangleSoup<S> {
        TriangleSoup::new(self.positions, self.triangles)
    }
}

/// Inserts a new vertex inside face `face`.
pub fn stack_face<S: Scalar>(soup: &TriangleSoup<S>, face: usize) -> TriangleSoup<S> {
    let mut ed = Editor::new(soup);
    ed.stack(face);
    ed.into_soup()
}

/// Splits edge `k` (from corner `k` to corner `k+1`) of triangle `face`.
pub fn split_edge<S: Scalar>(soup: &TriangleSoup<S>, face: usize, k: usize) -> TriangleSoup<S> {
    let mut ed = Editor::new(soup);
    ed.split(face, k % 3);
    ed.into_soup()
}

/// Flips edge `k` of triangle `face`; `None` if the flip is not allowed.
pub fn flip_edge<S: Scalar>(soup: &TriangleSoup<S>, face: usize, k: usize) -> Option<TriangleSoup<S>> {
    let mut ed = Editor::new(soup);
    ed.flip(face, k % 3).then(|| ed.into_soup())
}

/// Applies `steps` random stack/split edits, each followed by a few random
/// flip attempts.
pub fn perturb<S: Scalar>(soup: &TriangleSoup<S>, steps: usize, seed: u64) -> TriangleSoup<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ed = Editor::new(soup);
    for _ in 0..steps {
        let id = rng.gen_range(0..ed.triangles.len());
        if rng.gen_bool(0.5) {
            ed.stack(id);
        } else {
            ed.split(id, rng.gen_range(0..3));
        }
        for _ in 0..3 {
            let id = rng.gen_range(0..ed.triangles.len());
            ed.flip(id, rng.gen_range(0..3));
        }
    }
    ed.into_soup()
}

/// Flips `attempts` random edges where allowed.
pub fn random_flips<S: Scalar>(soup: &TriangleSoup<S>, attempts: usize, seed: u64) -> TriangleSoup<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ed = Editor::new(soup);
    for _ in 0..attempts {
        let id = rng.gen_range(0..ed.triangles.len());
        ed.flip(id, rng.gen_range(0..3));
    }
    ed.into_soup()
}

/// Random triangulated sphere with `n_vertices >= 4` vertices grown from
/// a tetrahedron.
pub fn random_sphere<S: Scalar>(n_vertices: usize, seed: u64) -> TriangleSoup<S> {
    let base = super::gen_tetrahedron();
    perturb(&base, n_vertices.saturating_sub(4), seed)
}

/// Randomly permutes vertex labels and shuffles the triangle list.
pub fn relabel<S: Scalar>(soup: &TriangleSoup<S>, seed: u64) -> TriangleSoup<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..soup.positions.len()).collect();
    perm.shuffle(&mut rng);
    let mut positions = soup.positions.clone();
    for (old, &new) in perm.iter().enumerate() {
        positions[new] = soup.positions[old];
    }
    let mut triangles: Vec<[usize; 3]> = soup.triangles.iter().map(|t| t.map(|v| perm[v])).collect();
    triangles.shuffle(&mut rng);
    TriangleSoup::new(positions, triangles)
}
