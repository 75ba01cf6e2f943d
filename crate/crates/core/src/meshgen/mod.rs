//! Deterministic mesh generators: platonic fixtures, flat-torus grids,
//! brick slabs with pits and tunnels, the bad-case sphere for the brute
//! force reducer, and 1-to-4 refinement.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dcel::MeshError;
use crate::meshio::TriangleSoup;
use crate::Scalar;

pub mod random;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generated surface failed validation: {0}")]
    Invalid(#[from] MeshError),
}

fn p<S: Scalar>(x: f64, y: f64, z: f64) -> [S; 3] {
    [S::lit(x), S::lit(y), S::lit(z)]
}

/// Boundary of a tetrahedron, the unique irreducible triangulation of the
/// sphere.
pub fn gen_tetrahedron<S: Scalar>() -> TriangleSoup<S> {
    TriangleSoup::new(
        vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(0.0, 0.0, 1.0)],
        vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    )
}

/// Octahedron with vertices `+x, -x, +y, -y, +z, -z`.
pub fn gen_octahedron<S: Scalar>() -> TriangleSoup<S> {
    let positions = vec![
        p(1.0, 0.0, 0.0),
        p(-1.0, 0.0, 0.0),
        p(0.0, 1.0, 0.0),
        p(0.0, -1.0, 0.0),
        p(0.0, 0.0, 1.0),
        p(0.0, 0.0, -1.0),
    ];
    let mut triangles = Vec::with_capacity(8);
    for (sx, x) in [(1, 0), (-1, 1)] {
        for (sy, y) in [(1, 2), (-1, 3)] {
            for (sz, z) in [(1, 4), (-1, 5)] {
                if sx * sy * sz > 0 {
                    triangles.push([x, y, z]);
                } else {
                    triangles.push([x, z, y]);
                }
            }
        }
    }
    TriangleSoup::new(positions, triangles)
}

/// Regular icosahedron; faces are the triples of mutually adjacent vertices.
pub fn gen_icosahedron<S: Scalar>() -> TriangleSoup<S> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::with_capacity(12);
    for a in [-1.0, 1.0] {
        for b in [-phi, phi] {
            pts.push([0.0, a, b]);
            pts.push([a, b, 0.0]);
            pts.push([b, 0.0, a]);
        }
    }
    let d2 = |i: usize, j: usize| (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum::<f64>();
    let adj = |i: usize, j: usize| (d2(i, j) - 4.0).abs() < 1e-9;
    let mut triangles = Vec::with_capacity(20);
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if adj(i, j) && adj(j, k) && adj(i, k) {
                    triangles.push([i, j, k]);
                }
            }
        }
    }
    let mut soup = TriangleSoup::new(pts.iter().map(|q| p(q[0], q[1], q[2])).collect(), triangles);
    orient(&mut soup).expect("icosahedron is orientable");
    soup
}

/// The 7-vertex torus: the embedding of K7 with triangles `{i, i+1, i+3}`
/// and `{i, i+2, i+3}` (mod 7). Irreducible.
pub fn gen_torus7<S: Scalar>() -> TriangleSoup<S> {
    let positions = (0..7)
        .map(|i| torus_point(i as f64 / 7.0, (3 * i) as f64 / 7.0, 2.0, 0.7))
        .collect();
    let mut triangles = Vec::with_capacity(14);
    for i in 0..7 {
        triangles.push([i, (i + 1) % 7, (i + 3) % 7]);
        triangles.push([i, (i + 3) % 7, (i + 2) % 7]);
    }
    TriangleSoup::new(positions, triangles)
}

fn torus_point<S: Scalar>(s: f64, t: f64, big: f64, small: f64) -> [S; 3] {
    let (a, b) = (TAU * s, TAU * t);
    p((big + small * b.cos()) * a.cos(), (big + small * b.cos()) * a.sin(), small * b.sin())
}

/// `p × q` flat-torus grid, each quad split along the `(i,j)–(i+1,j+1)`
/// diagonal.
pub fn gen_torus_grid<S: Scalar>(p_: usize, q: usize) -> Result<TriangleSoup<S>, GenError> {
    if p_ < 3 || q < 3 {
        return Err(GenError::InvalidParameter(format!("torus grid needs p, q >= 3, got {p_} x {q}")));
    }
    let idx = |i: usize, j: usize| (i % p_) * q + (j % q);
    let mut positions = Vec::with_capacity(p_ * q);
    for i in 0..p_ {
        for j in 0..q {
            positions.push(torus_point(i as f64 / p_ as f64, j as f64 / q as f64, 2.0, 0.7));
        }
    }
    let mut triangles = Vec::with_capacity(2 * p_ * q);
    for i in 0..p_ {
        for j in 0..q {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let soup = TriangleSoup::new(positions, triangles);
    soup.build()?;
    Ok(soup)
}

/// Brick grid cell kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Flat,
    /// A closed rectangular pit in the top face; genus unchanged.
    Cavity,
    /// A rectangular tunnel from top to bottom; adds one handle.
    Hole,
}

impl Cell {
    pub fn letter(self) -> char {
        match self {
            Cell::Flat => 'F',
            Cell::Cavity => 'C',
            Cell::Hole => 'H',
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Cell {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "F" | "f" => Ok(Cell::Flat),
            "C" | "c" => Ok(Cell::Cavity),
            "H" | "h" => Ok(Cell::Hole),
            _ => Err(GenError::InvalidParameter(format!("unknown cell kind {s:?}"))),
        }
    }
}

/// Parses a row-major string over `F`, `C`, `H`.
pub fn parse_cells(spec: &str) -> Result<Vec<Cell>, GenError> {
    spec.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| c.to_string().parse())
        .collect()
}

/// Rectangular slab whose `rows × cols` cells are flat, pitted or pierced.
///
/// Each cell owns a 3 × 3 block of quads on the top and bottom faces; the
/// centre quad is where a pit or tunnel opens. The genus equals the number
/// of `Hole` cells. Pit and tunnel cells both contribute 44 triangles, so
/// swapping one for the other changes the genus but not the face count.
pub fn gen_brick<S: Scalar>(rows: usize, cols: usize, cells: &[Cell]) -> Result<TriangleSoup<S>, GenError> {
    if rows == 0 || cols == 0 {
        return Err(GenError::InvalidParameter("brick needs at least one row and column".into()));
    }
    if cells.len() != rows * cols {
        return Err(GenError::InvalidParameter(format!(
            "brick {rows} x {cols} needs {} cells, got {}",
            rows * cols,
            cells.len()
        )));
    }
    let (ni, nj) = (3 * cols + 1, 3 * rows + 1);
    let mut positions = Vec::with_capacity(2 * ni * nj + 4 * cells.len());
    for z in [1.0, 0.0] {
        for j in 0..nj {
            for i in 0..ni {
                positions.push(p(i as f64 / 3.0, j as f64 / 3.0, z));
            }
        }
    }
    let top = |i: usize, j: usize| j * ni + i;
    let bottom = |i: usize, j: usize| ni * nj + j * ni + i;
    let cell_at = |i: usize, j: usize| -> Option<Cell> {
        // The quad with lower corner (i, j), if it is a cell centre.
        (i % 3 == 1 && j % 3 == 1).then(|| cells[(j / 3) * cols + i / 3])
    };

    let mut quads: Vec<[usize; 4]> = Vec::new();
    let mut fans: Vec<[usize; 3]> = Vec::new();
    for j in 0..nj - 1 {
        for i in 0..ni - 1 {
            let kind = cell_at(i, j);
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            if kind.is_none() || kind == Some(Cell::Flat) {
                quads.push(corners.map(|(a, b)| top(a, b)));
            }
            if kind != Some(Cell::Hole) {
                quads.push(corners.map(|(a, b)| bottom(a, b)));
            }
            match kind {
                Some(Cell::Cavity) => {
                    let base = positions.len();
                    for &(a, b) in &corners {
                        positions.push(p(a as f64 / 3.0, b as f64 / 3.0, 0.5));
                    }
                    for k in 0..4 {
                        let (a0, b0) = corners[k];
                        let (a1, b1) = corners[(k + 1) % 4];
                        quads.push([top(a0, b0), top(a1, b1), base + (k + 1) % 4, base + k]);
                    }
                    quads.push([base, base + 1, base + 2, base + 3]);
                }
                Some(Cell::Hole) => {
                    for k in 0..4 {
                        let (a0, b0) = corners[k];
                        let (a1, b1) = corners[(k + 1) % 4];
                        let wall = [top(a0, b0), top(a1, b1), bottom(a1, b1), bottom(a0, b0)];
                        if k % 2 == 1 {
                            quads.push(wall);
                            continue;
                        }
                        // Two opposite walls get a centre vertex so that a
                        // tunnel has as many triangles as a pit.
                        let c = positions.len();
                        positions.push(p((a0 + a1) as f64 / 6.0, (b0 + b1) as f64 / 6.0, 0.5));
                        for j in 0..4 {
                            fans.push([wall[j], wall[(j + 1) % 4], c]);
                        }
                    }
                }
                _ => {}
            }
        }
    }

    // Perimeter walls, walking the boundary of the grid rectangle.
    let mut ring = Vec::with_capacity(2 * (ni + nj));
    ring.extend((0..ni - 1).map(|i| (i, 0)));
    ring.extend((0..nj - 1).map(|j| (ni - 1, j)));
    ring.extend((1..ni).rev().map(|i| (i, nj - 1)));
    ring.extend((1..nj).rev().map(|j| (0, j)));
    for k in 0..ring.len() {
        let (a0, b0) = ring[k];
        let (a1, b1) = ring[(k + 1) % ring.len()];
        quads.push([top(a0, b0), top(a1, b1), bottom(a1, b1), bottom(a0, b0)]);
    }

    let triangles = quads
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .chain(fans)
        .collect();
    let mut soup = TriangleSoup::new(positions, triangles);
    orient(&mut soup)?;
    soup.build()?;
    Ok(soup)
}

/// Bipyramid over an `m`-ring with apexes `x = 0`, `y = 1`, ring vertices
/// `v_i = 2 + i`, and every face stacked with one extra vertex: `w_i` on
/// `(x, v_i, v_{i+1})` and `u_i` on `(y, v_i, v_{i+1})`.
///
/// The `3m` edges of the ring and the spokes to `x` and `y` all lie on
/// critical cycles, and every other edge is contractible, so a brute-force
/// pass that tests the critical edges first scans the high-degree apexes
/// `m` times each.
pub fn gen_badcase_sphere<S: Scalar>(m: usize) -> Result<TriangleSoup<S>, GenError> {
    if m < 3 {
        return Err(GenError::InvalidParameter(format!("bad-case sphere needs m >= 3, got {m}")));
    }
    let (x, y) = (0, 1);
    let v = |i: usize| 2 + i % m;
    let w = |i: usize| 2 + m + i;
    let u = |i: usize| 2 + 2 * m + i;
    let mut positions = vec![p(0.0, 0.0, 1.0), p(0.0, 0.0, -1.0)];
    for i in 0..m {
        let a = TAU * i as f64 / m as f64;
        positions.push(p(a.cos(), a.sin(), 0.0));
    }
    for z in [0.5, -0.5] {
        for i in 0..m {
            let a = TAU * (i as f64 + 0.5) / m as f64;
            positions.push(p(0.8 * a.cos(), 0.8 * a.sin(), z));
        }
    }
    let mut triangles = Vec::with_capacity(12 * m);
    for i in 0..m {
        for (apex, s) in [(x, w(i)), (y, u(i))] {
            let (a, b, c) = (apex, v(i), v(i + 1));
            triangles.push([a, b, s]);
            triangles.push([b, c, s]);
            triangles.push([c, a, s]);
        }
    }
    let mut soup = TriangleSoup::new(positions, triangles);
    orient(&mut soup)?;
    soup.build()?;
    Ok(soup)
}

/// Midpoint subdivision: every triangle becomes four.
pub fn refine_1to4<S: Scalar>(soup: &TriangleSoup<S>) -> TriangleSoup<S> {
    let mut positions = soup.positions.clone();
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::with_capacity(soup.triangles.len() * 2);
    let half = S::lit(0.5);
    let mut mid = |a: usize, b: usize, positions: &mut Vec<[S; 3]>| -> usize {
        *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
            let (pa, pb) = (positions[a], positions[b]);
            positions.push([0, 1, 2].map(|k| (pa[k] + pb[k]) * half));
            positions.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * soup.triangles.len());
    for &[a, b, c] in &soup.triangles {
        let ab = mid(a, b, &mut positions);
        let bc = mid(b, c, &mut positions);
        let ca = mid(c, a, &mut positions);
        triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
    }
    TriangleSoup::new(positions, triangles)
}

/// Applies [`refine_1to4`] `levels` times.
pub fn refine<S: Scalar>(soup: &TriangleSoup<S>, levels: u32) -> TriangleSoup<S> {
    let mut out = soup.clone();
    for _ in 0..levels {
        out = refine_1to4(&out);
    }
    out
}

/// Makes triangle orientations consistent by breadth-first propagation
/// across shared edges, then flips everything if the enclosed signed
/// volume is negative.
pub fn orient<S: Scalar>(soup: &mut TriangleSoup<S>) -> Result<(), GenError> {
    let n = soup.triangles.len();
    let mut incident: HashMap<(usize, usize), Vec<usize>> = HashMap::with_capacity(2 * n);
    for (t, tri) in soup.triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            incident.entry((a.min(b), a.max(b))).or_default().push(t);
        }
    }
    let has_directed = |tri: &[usize; 3], a: usize, b: usize| (0..3).any(|k| tri[k] == a && tri[(k + 1) % 3] == b);

    let mut done = vec![false; n];
    for seed in 0..n {
        if done[seed] {
            continue;
        }
        done[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(t) = queue.pop_front() {
            let tri = soup.triangles[t];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                for &o in &incident[&(a.min(b), a.max(b))] {
                    if o == t {
                        continue;
                    }
                    let same = has_directed(&soup.triangles[o], a, b);
                    if done[o] {
                        if same {
                            return Err(GenError::InvalidParameter("surface is not orientable".into()));
                        }
                        continue;
                    }
                    if same {
                        soup.triangles[o].swap(1, 2);
                    }
                    done[o] = true;
                    queue.push_back(o);
                }
            }
        }
    }
    if signed_volume(soup) < 0.0 {
        soup.flip();
    }
    Ok(())
}

/// Six times the signed volume enclosed by the triangles.
pub fn signed_volume<S: Scalar>(soup: &TriangleSoup<S>) -> f64 {
    let f = |s: S| s.to_f64().unwrap_or(0.0);
    soup.triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| soup.positions[i].map(f));
            a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
        })
        .sum()
}

/// Named meshes with at most 12 vertices, covering genus 0 and 1.
pub fn small_fixtures<S: Scalar>() -> Vec<(String, TriangleSoup<S>)> {
    let mut out: Vec<(String, TriangleSoup<S>)> = vec![
        ("tetrahedron".into(), gen_tetrahedron()),
        ("octahedron".into(), gen_octahedron()),
        ("icosahedron".into(), gen_icosahedron()),
        ("torus7".into(), gen_torus7()),
        ("t4-refined".into(), refine_1to4(&gen_tetrahedron())),
        ("badcase-3".into(), gen_badcase_sphere(3).expect("valid")),
        ("torus-3x4".into(), gen_torus_grid(3, 4).expect("valid")),
        ("torus-3x3".into(), gen_torus_grid(3, 3).expect("valid")),
        ("stacked-tet".into(), random::stack_face(&gen_tetrahedron(), 0)),
        ("stacked-octahedron".into(), random::stack_face(&gen_octahedron(), 3)),
    ];
    for seed in 0..24u64 {
        let nv = 5 + (seed as usize % 8);
        out.push((format!("random-sphere-{nv}-{seed}"), random::random_sphere(nv, seed)));
    }
    for seed in 0..8u64 {
        let torus = random::perturb(&gen_torus7(), 3, seed);
        if torus.n_vertices() <= 12 {
            out.push((format!("torus7-perturbed-{seed}"), torus));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topo::{certify_irreducible, euler_genus, is_t4};

    fn genus(soup: &TriangleSoup<f64>) -> u32 {
        euler_genus(&soup.build().unwrap()).unwrap().genus
    }

    #[test]
    fn tetrahedron_is_t4() {
        let m = gen_tetrahedron::<f64>().build().unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (4, 6, 4));
        assert!(is_t4(&m));
        assert!(certify_irreducible(&m));
    }

    #[test]
    fn platonic_counts() {
        let o = gen_octahedron::<f64>().build().unwrap();
        assert_eq!((o.n_vertices(), o.n_edges(), o.n_faces()), (6, 12, 8));
        let i = gen_icosahedron::<f64>().build().unwrap();
        assert_eq!((i.n_vertices(), i.n_edges(), i.n_faces()), (12, 30, 20));
        assert!(i.vertices().all(|v| i.degree(v) == 5));
        assert!(signed_volume(&gen_icosahedron::<f64>()) > 0.0);
        assert!(signed_volume(&gen_octahedron::<f64>()) > 0.0);
    }

    #[test]
    fn torus_grid_counts() {
        for (p_, q) in [(4, 4), (3, 5), (8, 8), (5, 7)] {
            let m = gen_torus_grid::<f64>(p_, q).unwrap().build().unwrap();
            assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (p_ * q, 3 * p_ * q, 2 * p_ * q));
            assert_eq!(euler_genus(&m).unwrap().genus, 1);
        }
        assert!(gen_torus_grid::<f64>(2, 5).is_err());
    }

    #[test]
    fn brick_genus_counts_holes() {
        assert_eq!(genus(&gen_brick(2, 2, &parse_cells("FFFF").unwrap()).unwrap()), 0);
        assert_eq!(genus(&gen_brick(2, 2, &parse_cells("FHFF").unwrap()).unwrap()), 1);
        assert_eq!(genus(&gen_brick(1, 1, &[Cell::Cavity]).unwrap()), 0);
        for k in 0..=25 {
            let cells: Vec<_> = (0..25).map(|i| if i < k { Cell::Hole } else { Cell::Cavity }).collect();
            let soup = gen_brick::<f64>(5, 5, &cells).unwrap();
            assert_eq!(genus(&soup), k as u32);
            assert!(signed_volume(&soup) > 0.0);
        }
    }

    #[test]
    fn pits_and_tunnels_have_equal_face_counts() {
        let faces = |k: usize| {
            let cells: Vec<_> = (0..9).map(|i| if i < k { Cell::Hole } else { Cell::Cavity }).collect();
            gen_brick::<f64>(3, 3, &cells).unwrap().n_faces()
        };
        assert!((0..=9).all(|k| faces(k) == faces(0)));
    }

    #[test]
    fn brick_rejects_bad_parameters() {
        assert!(gen_brick::<f64>(0, 2, &[]).is_err());
        assert!(gen_brick::<f64>(2, 2, &[Cell::Flat]).is_err());
        assert!(parse_cells("FXH").is_err());
    }

    #[test]
    fn badcase_structure() {
        let m = gen_badcase_sphere::<f64>(4).unwrap().build().unwrap();
        assert_eq!(m.n_vertices(), 14);
        assert_eq!(euler_genus(&m).unwrap().genus, 0);
        for mm in [3, 4, 8, 16] {
            let mesh = gen_badcase_sphere::<f64>(mm).unwrap().build().unwrap();
            let contractible = crate::topo::contractible_edges(&mesh).len();
            assert_eq!(mesh.n_vertices(), 3 * mm + 2);
            assert_eq!(contractible, 6 * mm);
            assert_eq!(mesh.n_edges() - contractible, 3 * mm);
            let x = crate::VertexId(0);
            for h in mesh.outgoing(x) {
                let e = mesh.edge_of(h);
                let other = mesh.other_end(e, x).index();
                if (2..2 + mm).contains(&other) {
                    assert!(!crate::topo::link_condition_oracle(&mesh, e));
                }
            }
        }
        assert!(gen_badcase_sphere::<f64>(2).is_err());
    }

    #[test]
    fn refinement_counts_and_genus() {
        let m = refine_1to4(&gen_tetrahedron::<f64>()).build().unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (10, 24, 16));
        let torus = gen_torus_grid::<f64>(4, 4).unwrap();
        let twice = refine(&torus, 2);
        assert_eq!(twice.n_faces(), 16 * torus.n_faces());
        assert_eq!(genus(&twice), 1);
        let brick = gen_brick::<f64>(2, 2, &parse_cells("HCFH").unwrap()).unwrap();
        assert_eq!(genus(&refine_1to4(&brick)), 2);
    }

    #[test]
    fn generators_are_deterministic() {
        let a = crate::meshio::write_off(&gen_brick::<f64>(3, 3, &parse_cells("HCFCHCFCH").unwrap()).unwrap());
        let b = crate::meshio::write_off(&gen_brick::<f64>(3, 3, &parse_cells("HCFCHCFCH").unwrap()).unwrap());
        assert_eq!(a, b);
        assert_eq!(
            crate::meshio::write_off(&random::random_sphere::<f64>(40, 9)),
            crate::meshio::write_off(&random::random_sphere::<f64>(40, 9))
        );
    }

    #[test]
    fn small_fixtures_are_small_and_valid() {
        let fixtures = small_fixtures::<f64>();
        assert!(fixtures.len() >= 30);
        for (name, soup) in fixtures {
            assert!(soup.n_vertices() <= 12, "{name}");
            soup.build().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
