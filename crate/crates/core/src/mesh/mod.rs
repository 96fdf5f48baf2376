//! Conforming triangulations of the unit square.
//!
//! Every face stores one fixed unit normal. The element on its `left` sees it
//! as the outward normal, the element on its `right` sees the opposite. Face
//! points are parameterized by `s in [0, 1]` running from `vertices[0]` to
//! `vertices[1]`; an element whose local edge runs the other way is marked
//! `flipped` for that face.

mod assumption;
mod geometry;
mod io;
mod streamline;

use std::collections::HashMap;

use thiserror::Error;

pub use assumption::{check_mesh_assumption, face_sup, AssumptionReport, AssumptionViolation, SUP_SAMPLE_POINTS};
pub use geometry::AffineTriangle;
pub use io::{read_text, write_text, write_vtk, VtkField};
pub use streamline::{streamline_mesh, StreamlineMesh, StreamlineOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("number of subdivisions must be at least 1")]
    ZeroSubdivisions,
    #[error("element {0} is degenerate")]
    DegenerateElement(usize),
    #[error("edge ({0}, {1}) is shared by more than two elements or inconsistently oriented")]
    NonConforming(usize, usize),
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("streamline mesher: {0}")]
    Streamline(String),
}

impl From<std::io::Error> for MeshError {
    fn from(e: std::io::Error) -> Self {
        MeshError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Diagonal {
    /// Slanted edges run from lower-left to upper-right.
    NE,
    /// Slanted edges run from lower-right to upper-left.
    NW,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Interior,
    Boundary,
    /// Interior face lying on an internal segment carrying Dirichlet data.
    Slit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    /// Counterclockwise.
    pub vertices: [usize; 3],
    /// `faces[i]` is the edge from `vertices[i]` to `vertices[(i+1)%3]`.
    pub faces: [usize; 3],
    /// True when the local edge runs against the face parameterization.
    pub flipped: [bool; 3],
    pub area: f64,
    pub h: f64,
}

impl Element {
    /// +1 if the face normal is outward for this element, -1 otherwise.
    pub fn sign(&self, local: usize) -> f64 {
        if self.flipped[local] {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub vertices: [usize; 2],
    pub length: f64,
    pub normal: [f64; 2],
    pub left: usize,
    pub right: Option<usize>,
    pub kind: FaceKind,
}

impl Face {
    pub fn h(&self) -> f64 {
        self.length
    }

    /// Adjacent elements, left first.
    pub fn neighbors(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.left).chain(self.right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub elements: Vec<Element>,
    pub faces: Vec<Face>,
    /// Internal segments whose faces are tagged [`FaceKind::Slit`].
    pub slits: Vec<[[f64; 2]; 2]>,
}

impl Mesh {
    /// Builds connectivity from a vertex list and triangles. Clockwise
    /// triangles are reoriented.
    pub fn from_triangles(vertices: Vec<[f64; 2]>, triangles: &[[usize; 3]]) -> Result<Self, MeshError> {
        let mut elements = Vec::with_capacity(triangles.len());
        let mut faces: Vec<Face> = Vec::with_capacity(triangles.len() * 3 / 2 + 4);
        let mut edge_map: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);

        for (e, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(MeshError::BadVertex(v));
                }
            }
            let mut tri = *tri;
            let geo = AffineTriangle::new(tri.map(|v| vertices[v]));
            if geo.det.abs() <= 1e-14 * geo.face_length(0).powi(2).max(f64::MIN_POSITIVE) {
                return Err(MeshError::DegenerateElement(e));
            }
            if geo.det < 0.0 {
                tri.swap(1, 2);
            }
            let geo = AffineTriangle::new(tri.map(|v| vertices[v]));
            let mut fids = [0; 3];
            let mut flipped = [false; 3];
            for i in 0..3 {
                let (p, q) = (tri[i], tri[(i + 1) % 3]);
                let key = (p.min(q), p.max(q));
                match edge_map.get(&key) {
                    None => {
                        let id = faces.len();
                        edge_map.insert(key, id);
                        faces.push(Face {
                            vertices: [p, q],
                            length: geo.face_length(i),
                            normal: geo.outward_normal(i),
                            left: e,
                            right: None,
                            kind: FaceKind::Boundary,
                        });
                        fids[i] = id;
                    }
                    Some(&id) => {
                        let f = &mut faces[id];
                        if f.right.is_some() || f.vertices != [q, p] {
                            return Err(MeshError::NonConforming(p, q));
                        }
                        f.right = Some(e);
                        f.kind = FaceKind::Interior;
                        fids[i] = id;
                        flipped[i] = true;
                    }
                }
            }
            elements.push(Element { vertices: tri, faces: fids, flipped, area: geo.area, h: geo.h });
        }
        Ok(Self { vertices, elements, faces, slits: Vec::new() })
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_interior_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.right.is_some()).count()
    }

    pub fn n_boundary_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.right.is_none()).count()
    }

    pub fn triangle(&self, e: usize) -> AffineTriangle {
        AffineTriangle::new(self.elements[e].vertices.map(|v| self.vertices[v]))
    }

    pub fn face_endpoints(&self, f: usize) -> [[f64; 2]; 2] {
        self.faces[f].vertices.map(|v| self.vertices[v])
    }

    /// Point on face `f` at parameter `s`.
    pub fn face_point(&self, f: usize, s: f64) -> [f64; 2] {
        let [a, b] = self.face_endpoints(f);
        [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
    }

    /// Local index of face `f` in element `e`.
    pub fn local_face(&self, e: usize, f: usize) -> Option<usize> {
        self.elements[e].faces.iter().position(|&g| g == f)
    }

    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|e| e.area).sum()
    }

    pub fn max_h(&self) -> f64 {
        self.elements.iter().map(|e| e.h).fold(0.0, f64::max)
    }

    pub fn min_h(&self) -> f64 {
        self.elements.iter().map(|e| e.h).fold(f64::INFINITY, f64::min)
    }

    /// Tags every interior face lying on the segment `[a, b]` as a slit face.
    /// Returns the number of faces tagged.
    pub fn add_slit(&mut self, a: [f64; 2], b: [f64; 2]) -> usize {
        self.slits.push([a, b]);
        self.retag_slits()
    }

    fn retag_slits(&mut self) -> usize {
        let mut count = 0;
        for fi in 0..self.faces.len() {
            if self.faces[fi].right.is_none() {
                continue;
            }
            let [p, q] = self.face_endpoints(fi);
            if self.slits.iter().any(|s| on_segment(p, *s) && on_segment(q, *s)) {
                self.faces[fi].kind = FaceKind::Slit;
                count += 1;
            }
        }
        count
    }

    /// Triangles as sorted coordinate triples on a fixed integer lattice,
    /// sorted. Two meshes of the same triangulation compare equal regardless
    /// of numbering.
    pub fn canonical_form(&self) -> Vec<[[i64; 2]; 3]> {
        let key = |p: [f64; 2]| [(p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64];
        let mut tris: Vec<[[i64; 2]; 3]> = self
            .elements
            .iter()
            .map(|el| {
                let mut t = el.vertices.map(|v| key(self.vertices[v]));
                t.sort();
                t
            })
            .collect();
        tris.sort();
        tris
    }

    /// Checks structural invariants. Returns a description of the first problem.
    pub fn validate(&self) -> Result<(), String> {
        for (fi, f) in self.faces.iter().enumerate() {
            let n = f.normal[0].hypot(f.normal[1]);
            if (n - 1.0).abs() > 1e-14 {
                return Err(format!("face {fi} normal has length {n}"));
            }
            let mut seen = 0;
            for e in f.neighbors() {
                let el = &self.elements[e];
                let Some(l) = self.local_face(e, fi) else {
                    return Err(format!("face {fi} not listed by element {e}"));
                };
                let outward = self.triangle(e).outward_normal(l);
                let s = el.sign(l);
                if (outward[0] - s * f.normal[0]).abs() > 1e-12 || (outward[1] - s * f.normal[1]).abs() > 1e-12 {
                    return Err(format!("face {fi} orientation mismatch in element {e}"));
                }
                seen += 1;
            }
            if let Some(r) = f.right {
                if r == f.left || seen != 2 {
                    return Err(format!("interior face {fi} must have two distinct elements"));
                }
                if self.elements[r].flipped[self.local_face(r, fi).unwrap()] == self.elements[f.left].flipped[self.local_face(f.left, fi).unwrap()] {
                    return Err(format!("face {fi} has equal orientation on both sides"));
                }
            }
        }
        for (e, el) in self.elements.iter().enumerate() {
            if el.area <= 0.0 {
                return Err(format!("element {e} has nonpositive area"));
            }
        }
        Ok(())
    }

    /// `V - E + T`.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_faces() as i64 + self.n_elements() as i64
    }
}

pub(crate) fn on_segment(p: [f64; 2], seg: [[f64; 2]; 2]) -> bool {
    let [a, b] = seg;
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2;
    let cross = (p[0] - a[0]) * dy - (p[1] - a[1]) * dx;
    let tol = 1e-10;
    cross.abs() <= tol * len2.sqrt() && t >= -tol && t <= 1.0 + tol
}

/// Uniform `n x n` grid of the unit square, each cell cut into two triangles.
pub fn structured_unit_square(n: usize, diagonal: Diagonal) -> Result<Mesh, MeshError> {
    if n == 0 {
        return Err(MeshError::ZeroSubdivisions);
    }
    let m = n + 1;
    let mut vertices = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let id = |i: usize, j: usize| j * m + i;
    let mut tris = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            match diagonal {
                Diagonal::NE => {
                    tris.push([v00, v10, v11]);
                    tris.push([v00, v11, v01]);
                }
                Diagonal::NW => {
                    tris.push([v00, v10, v01]);
                    tris.push([v10, v11, v01]);
                }
            }
        }
    }
    Mesh::from_triangles(vertices, &tris)
}

/// Splits every triangle into four through its edge midpoints.
pub fn uniform_refine(mesh: &Mesh) -> Mesh {
    let nv = mesh.vertices.len();
    let mut vertices = mesh.vertices.clone();
    vertices.extend((0..mesh.faces.len()).map(|f| mesh.face_point(f, 0.5)));
    let mut tris = Vec::with_capacity(4 * mesh.elements.len());
    for el in &mesh.elements {
        let [v0, v1, v2] = el.vertices;
        let [m01, m12, m20] = el.faces.map(|f| nv + f);
        tris.push([v0, m01, m20]);
        tris.push([m01, v1, m12]);
        tris.push([m20, m12, v2]);
        tris.push([m01, m12, m20]);
    }
    let mut out = Mesh::from_triangles(vertices, &tris).expect("refinement of a valid mesh is valid");
    out.slits = mesh.slits.clone();
    out.retag_slits();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_counts() {
        let m = structured_unit_square(1, Diagonal::NE).unwrap();
        assert_eq!(m.n_elements(), 2);
        assert_eq!(m.n_faces(), 5);
        assert_eq!(m.n_interior_faces(), 1);
        m.validate().unwrap();
    }

    #[test]
    fn zero_subdivisions_rejected() {
        assert_eq!(structured_unit_square(0, Diagonal::NE), Err(MeshError::ZeroSubdivisions));
    }

    #[test]
    fn counts_and_euler() {
        for n in 1..7 {
            for d in [Diagonal::NE, Diagonal::NW] {
                let m = structured_unit_square(n, d).unwrap();
                assert_eq!(m.n_vertices(), (n + 1) * (n + 1));
                assert_eq!(m.n_faces(), 3 * n * n + 2 * n);
                assert_eq!(m.n_elements(), 2 * n * n);
                assert_eq!(m.euler_characteristic(), 1);
                assert!((m.total_area() - 1.0).abs() < 1e-12);
                m.validate().unwrap();
            }
        }
    }

    #[test]
    fn ne_slanted_faces_point_northeast() {
        let m = structured_unit_square(5, Diagonal::NE).unwrap();
        let mut slanted = 0;
        for f in m.faces.iter().filter(|f| f.kind == FaceKind::Interior) {
            let n = f.normal;
            if n[0].abs() > 1e-12 && n[1].abs() > 1e-12 {
                assert!((n[0] + n[1]).abs() < 1e-14);
                slanted += 1;
            }
        }
        assert_eq!(slanted, 25);
    }

    #[test]
    fn refinement_children() {
        let m = structured_unit_square(1, Diagonal::NE).unwrap();
        let r = uniform_refine(&m);
        assert_eq!(r.n_elements(), 8);
        for (c, el) in r.elements.iter().enumerate() {
            assert!((el.area - m.elements[c / 4].area / 4.0).abs() < 1e-15);
        }
        r.validate().unwrap();
    }

    #[test]
    fn refine_matches_finer_structured() {
        for d in [Diagonal::NE, Diagonal::NW] {
            let coarse = structured_unit_square(5, d).unwrap();
            let fine = structured_unit_square(10, d).unwrap();
            assert_eq!(uniform_refine(&coarse).canonical_form(), fine.canonical_form());
        }
    }

    #[test]
    fn slit_tagging_survives_refinement() {
        let mut m = structured_unit_square(2, Diagonal::NE).unwrap();
        assert_eq!(m.add_slit([0.5, 0.0], [0.5, 0.5]), 1);
        let r = uniform_refine(&m);
        assert_eq!(r.faces.iter().filter(|f| f.kind == FaceKind::Slit).count(), 2);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let m = Mesh::from_triangles(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &[[0, 2, 1]]).unwrap();
        assert!(m.triangle(0).det > 0.0);
        m.validate().unwrap();
    }
}
