use super::condense::CondensedElement;
use crate::basis::project_face;
use crate::linalg::SparseRowMatrix;
use crate::mesh::{on_segment, FaceKind, Mesh};
use crate::problems::ProblemSpec;

/// Numbering of trace unknowns. Faces on the outer boundary or on a slit
/// carry prescribed values and have no unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    /// Unknown-face index of every face, `None` on Dirichlet faces.
    pub face_dof: Vec<Option<usize>>,
    /// Faces in unknown order.
    pub unknown_faces: Vec<usize>,
    /// Coefficients per face, `k + 1`.
    pub per_face: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, problem: &ProblemSpec, k: usize) -> Self {
        let slit = problem.slit.as_ref().map(|s| [s.from, s.to]);
        let mut face_dof = vec![None; mesh.n_faces()];
        let mut unknown_faces = Vec::new();
        for f in 0..mesh.n_faces() {
            if !is_dirichlet(mesh, f, slit) {
                face_dof[f] = Some(unknown_faces.len());
                unknown_faces.push(f);
            }
        }
        Self { face_dof, unknown_faces, per_face: k + 1 }
    }

    pub fn n_dofs(&self) -> usize {
        self.unknown_faces.len() * self.per_face
    }

    /// First global index of face `f`, if it carries unknowns.
    pub fn offset(&self, f: usize) -> Option<usize> {
        self.face_dof[f].map(|d| d * self.per_face)
    }
}

fn is_dirichlet(mesh: &Mesh, f: usize, slit: Option<[[f64; 2]; 2]>) -> bool {
    let face = &mesh.faces[f];
    if face.kind != FaceKind::Interior {
        return true;
    }
    match slit {
        Some(seg) => {
            let [a, b] = mesh.face_endpoints(f);
            on_segment(a, seg) && on_segment(b, seg)
        }
        None => false,
    }
}

/// Face projections of the prescribed data; empty on faces with unknowns.
pub fn dirichlet_values(mesh: &Mesh, problem: &ProblemSpec, dofs: &DofMap, k: usize) -> Vec<Vec<f64>> {
    let points = k + 3;
    (0..mesh.n_faces())
        .map(|f| {
            if dofs.face_dof[f].is_some() {
                return Vec::new();
            }
            let [a, b] = mesh.face_endpoints(f);
            match (&problem.slit, mesh.faces[f].right) {
                (Some(slit), Some(_)) => project_face(a, b, k, points, |x| (slit.value)(x)),
                _ => project_face(a, b, k, points, |x| (problem.dirichlet)(x)),
            }
        })
        .collect()
}

/// Global trace system `A lambda = b` over the unknown faces.
#[derive(Debug, Clone)]
pub struct TraceSystem {
    pub matrix: SparseRowMatrix,
    pub rhs: Vec<f64>,
    /// Diagonal `D` when the system holds `D^-1 A D^-1` and `D^-1 b`.
    pub scaling: Option<Vec<f64>>,
}

impl TraceSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// Converts a solution of the stored system back to trace values.
    pub fn unscale(&self, mut x: Vec<f64>) -> Vec<f64> {
        if let Some(d) = &self.scaling {
            for (xi, di) in x.iter_mut().zip(d) {
                *xi /= di;
            }
        }
        x
    }

    /// Replaces the system with `D^-1 A D^-1`, `D^-1 b`.
    pub fn apply_scaling(&mut self, d: Vec<f64>) {
        assert!(self.scaling.is_none(), "system already scaled");
        self.matrix = self.matrix.scaled_inverse(&d, &d);
        for (b, di) in self.rhs.iter_mut().zip(&d) {
            *b /= di;
        }
        self.scaling = Some(d);
    }
}

/// Sums element contributions into the trace system. Columns of Dirichlet
/// faces are moved to the right-hand side.
pub fn assemble_trace_system(mesh: &Mesh, condensed: &[CondensedElement], dofs: &DofMap, dirichlet: &[Vec<f64>]) -> TraceSystem {
    let nf = dofs.per_face;
    let n = dofs.n_dofs();
    let mut triplets = Vec::with_capacity(mesh.n_elements() * 9 * nf * nf);
    let mut rhs = vec![0.0; n];
    for (e, ce) in condensed.iter().enumerate() {
        let faces = mesh.elements[e].faces;
        for (la, &fa) in faces.iter().enumerate() {
            let Some(ra) = dofs.offset(fa) else { continue };
            for m in 0..nf {
                let row = la * nf + m;
                rhs[ra + m] += ce.g[row];
                for (lb, &fb) in faces.iter().enumerate() {
                    match dofs.offset(fb) {
                        Some(rb) => {
                            for p in 0..nf {
                                triplets.push((ra + m, rb + p, ce.s[(row, lb * nf + p)]));
                            }
                        }
                        None => {
                            for p in 0..nf {
                                rhs[ra + m] -= ce.s[(row, lb * nf + p)] * dirichlet[fb][p];
                            }
                        }
                    }
                }
            }
        }
    }
    TraceSystem { matrix: SparseRowMatrix::from_triplets(n, n, &triplets), rhs, scaling: None }
}

/// `Lambda_F = (sup_F |beta.n| + min(eps / h_F, 1))^(1/2)` on every face.
pub fn face_weights(mesh: &Mesh, problem: &ProblemSpec) -> Vec<f64> {
    (0..mesh.n_faces())
        .map(|f| {
            let face = &mesh.faces[f];
            let [a, b] = mesh.face_endpoints(f);
            let sup = crate::mesh::face_sup(a, b, |x| problem.beta.normal_component(x, face.normal).abs());
            (sup + (problem.epsilon / face.length).min(1.0)).sqrt()
        })
        .collect()
}

/// Face weights repeated over the coefficients of each unknown face.
pub fn scaling_weights(dofs: &DofMap, face_weights: &[f64]) -> Vec<f64> {
    dofs.unknown_faces.iter().flat_map(|&f| std::iter::repeat_n(face_weights[f], dofs.per_face)).collect()
}

/// Trace operator over all faces, numbered `face * (k + 1) + m`. Rows of
/// faces with unknowns hold the condensed element contributions, including
/// the columns of prescribed faces; rows of prescribed faces are identity
/// rows. With `face_weights`, the rows and columns of faces with unknowns
/// are scaled by `1 / Lambda_F` and prescribed columns by their own weights,
/// i.e. the system in the unknowns `Lambda lambda`.
pub fn all_face_matrix(mesh: &Mesh, condensed: &[CondensedElement], dofs: &DofMap, face_weights: Option<&[f64]>) -> SparseRowMatrix {
    let nf = dofs.per_face;
    let n = mesh.n_faces() * nf;
    let w = |f: usize| face_weights.map_or(1.0, |w| w[f]);
    let mut triplets = Vec::with_capacity(mesh.n_elements() * 9 * nf * nf + n);
    for (e, ce) in condensed.iter().enumerate() {
        let faces = mesh.elements[e].faces;
        for (la, &fa) in faces.iter().enumerate() {
            if dofs.face_dof[fa].is_none() {
                continue;
            }
            for (lb, &fb) in faces.iter().enumerate() {
                let s = 1.0 / (w(fa) * w(fb));
                for m in 0..nf {
                    for p in 0..nf {
                        triplets.push((fa * nf + m, fb * nf + p, s * ce.s[(la * nf + m, lb * nf + p)]));
                    }
                }
            }
        }
    }
    for f in (0..mesh.n_faces()).filter(|&f| dofs.face_dof[f].is_none()) {
        for m in 0..nf {
            triplets.push((f * nf + m, f * nf + m, 1.0));
        }
    }
    SparseRowMatrix::from_triplets(n, n, &triplets)
}
