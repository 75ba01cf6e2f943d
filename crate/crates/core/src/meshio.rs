//! ASCII OFF input/output and construction of meshes from triangle soup.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::dcel::{Mesh, MeshError};
use crate::Scalar;

/// Indexed triangles with opaque vertex positions.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleSoup<S> {
    pub positions: Vec<[S; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Error)]
pub enum OffError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: face with {sides} sides is not supported, only triangles")]
    UnsupportedFace { line: usize, sides: usize },
}

impl<S: Scalar> TriangleSoup<S> {
    pub fn new(positions: Vec<[S; 3]>, triangles: Vec<[usize; 3]>) -> Self {
        TriangleSoup { positions, triangles }
    }

    /// Validates the soup and builds its DCEL.
    pub fn build(&self) -> Result<Mesh<S>, MeshError> {
        build_mesh(self)
    }

    /// Extracts the live part of a mesh, renumbering vertices densely.
    pub fn from_mesh(mesh: &Mesh<S>) -> Self {
        let (positions, triangles) = mesh.to_triangles();
        TriangleSoup { positions, triangles }
    }

    pub fn n_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn n_faces(&self) -> usize {
        self.triangles.len()
    }

    /// Rotates every triangle so that its smallest index comes first and
    /// sorts the triangle list. Orientation is preserved.
    pub fn canonicalize(&mut self) {
        for t in &mut self.triangles {
            let k = (0..3).min_by_key(|&k| t[k]).unwrap();
            t.rotate_left(k);
        }
        self.triangles.sort_unstable();
    }

    /// Reverses the orientation of every triangle.
    pub fn flip(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
    }
}

pub fn build_mesh<S: Scalar>(soup: &TriangleSoup<S>) -> Result<Mesh<S>, MeshError> {
    Mesh::from_triangles(soup.positions.clone(), &soup.triangles)
}

/// Parses ASCII OFF. `#` starts a comment; blank lines are skipped; the
/// counts may share the header line; the edge count is ignored and so are
/// trailing tokens on face lines (per-face colors).
pub fn read_off<S: Scalar>(text: &str) -> Result<TriangleSoup<S>, OffError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let parse_err = |line: usize, message: String| OffError::Parse { line, message };

    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty input".into()))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("OFF") {
        return Err(parse_err(line, format!("expected OFF header, found {header:?}")));
    }
    let mut counts: Vec<&str> = head.collect();
    let mut counts_line = line;
    if counts.is_empty() {
        let (l, c) = lines.next().ok_or_else(|| parse_err(line, "missing counts line".into()))?;
        counts = c.split_whitespace().collect();
        counts_line = l;
    }
    if counts.len() < 2 {
        return Err(parse_err(counts_line, "counts line needs vertex and face counts".into()));
    }
    let parse_count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(counts_line, format!("invalid count {s:?}")))
    };
    let nv = parse_count(counts[0])?;
    let nf = parse_count(counts[1])?;

    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_err(counts_line, format!("expected {nv} vertices, file ended early")))?;
        let mut coords = [S::zero(); 3];
        let mut tokens = text.split_whitespace();
        for c in &mut coords {
            let tok = tokens
                .next()
                .ok_or_else(|| parse_err(line, "vertex needs three coordinates".into()))?;
            *c = tok
                .parse::<S>()
                .map_err(|_| parse_err(line, format!("invalid coordinate {tok:?}")))?;
        }
        positions.push(coords);
    }

    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_err(counts_line, format!("expected {nf} faces, file ended early")))?;
        let mut tokens = text.split_whitespace();
        let mut index = |what: &str| -> Result<usize, OffError> {
            let tok = tokens
                .next()
                .ok_or_else(|| parse_err(line, format!("face is missing its {what}")))?;
            tok.parse::<usize>()
                .map_err(|_| parse_err(line, format!("invalid {what} {tok:?}")))
        };
        let sides = index("vertex count")?;
        if sides != 3 {
            return Err(OffError::UnsupportedFace { line, sides });
        }
        let mut tri = [0usize; 3];
        for slot in &mut tri {
            *slot = index("vertex index")?;
            if *slot >= nv {
                return Err(parse_err(line, format!("vertex index {} out of range (nv = {nv})", *slot)));
            }
        }
        triangles.push(tri);
    }

    Ok(TriangleSoup { positions, triangles })
}

pub fn read_off_file<S: Scalar>(path: impl AsRef<Path>) -> Result<TriangleSoup<S>, OffError> {
    let text = std::fs::read_to_string(path)?;
    read_off(&text)
}

/// Canonical ASCII OFF; the counts line is `nv nf 0`.
pub fn write_off<S: Scalar>(soup: &TriangleSoup<S>) -> String {
    let mut out = String::with_capacity(32 * (soup.positions.len() + soup.triangles.len()));
    out.push_str("OFF\n");
    let _ = writeln!(out, "{} {} 0", soup.positions.len(), soup.triangles.len());
    for p in &soup.positions {
        let _ = writeln!(out, "{} {} {}", p[0], p[1], p[2]);
    }
    for t in &soup.triangles {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    out
}

/// Compacts the live part of `mesh` and writes it as OFF.
pub fn write_mesh_off<S: Scalar>(mesh: &Mesh<S>) -> String {
    write_off(&TriangleSoup::from_mesh(mesh))
}

pub fn write_off_file<S: Scalar>(soup: &TriangleSoup<S>, path: impl AsRef<Path>) -> io::Result<()> {
    std::fs::write(path, write_off(soup))
}
