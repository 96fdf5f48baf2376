use crate::basis::{eval_vector_basis, scalar_dim, vector_dim, ReferenceTables, VectorSpace};
use crate::linalg::DenseMatrix;
use crate::mesh::{AffineTriangle, Mesh};
use crate::problems::ProblemSpec;

/// Geometry and stabilization of one element as seen by the local solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementSetup {
    pub geo: AffineTriangle,
    pub flipped: [bool; 3],
    pub taus: [f64; 3],
}

impl ElementSetup {
    pub fn new(mesh: &Mesh, e: usize, taus: [f64; 3]) -> Self {
        Self { geo: mesh.triangle(e), flipped: mesh.elements[e].flipped, taus }
    }
}

/// Element system in the unknowns `z = [q; u]`:
///
/// `A z = E lambda + load`, together with the maps needed to form the
/// element contribution to the trace equation
/// `-<q.n + tau (u - lambda), mu>_{dK}`.
#[derive(Debug, Clone)]
pub struct LocalMatrices {
    pub nv: usize,
    pub nw: usize,
    /// `3 (k + 1)` trace coefficients, face by face.
    pub nl: usize,
    pub a: DenseMatrix,
    pub e: DenseMatrix,
    pub load: Vec<f64>,
    /// `cq[c][i] = <r_i . n, mu_c>`.
    pub cq: DenseMatrix,
    /// `cu[c][i] = <tau phi_i, mu_c>`.
    pub cu: DenseMatrix,
    /// `<tau mu_c, mu_c> = tau_F |F|`.
    pub t_diag: Vec<f64>,
}

impl LocalMatrices {
    pub fn n(&self) -> usize {
        self.nv + self.nw
    }
}

/// Physical basis values at one point.
pub(crate) struct PointBasis {
    pub phi: Vec<f64>,
    pub grad: Vec<[f64; 2]>,
    pub r: Vec<[f64; 2]>,
    pub div: Vec<f64>,
}

impl PointBasis {
    pub fn new(k: usize, space: VectorSpace) -> Self {
        let nw = scalar_dim(k);
        let nv = vector_dim(k, space);
        Self { phi: vec![0.0; nw], grad: vec![[0.0; 2]; nw], r: vec![[0.0; 2]; nv], div: vec![0.0; nv] }
    }

    /// Fills values from reference tables at physical point `x`.
    pub fn fill(&mut self, k: usize, space: VectorSpace, geo: &AffineTriangle, x: [f64; 2], phi: &[f64], dphi: Option<&[[f64; 2]]>) {
        self.phi.copy_from_slice(phi);
        match dphi {
            Some(d) => {
                for (g, r) in self.grad.iter_mut().zip(d) {
                    *g = geo.grad_to_physical(*r);
                }
                eval_vector_basis(k, space, geo, x, &self.phi, &self.grad, &mut self.r, &mut self.div);
            }
            None => eval_vector_basis(k, space, geo, x, &self.phi, &self.grad, &mut self.r, &mut []),
        }
    }
}

/// Assembles the element system by quadrature on the mapped reference
/// element.
pub fn assemble_local(setup: &ElementSetup, problem: &ProblemSpec, tables: &ReferenceTables, space: VectorSpace) -> LocalMatrices {
    let k = tables.k;
    let nw = scalar_dim(k);
    let nv = vector_dim(k, space);
    let nf = k + 1;
    let nl = 3 * nf;
    let n = nv + nw;
    let geo = &setup.geo;
    let eps_inv = 1.0 / problem.epsilon;
    let beta = &problem.beta;

    let mut a = DenseMatrix::zeros(n, n);
    let mut e = DenseMatrix::zeros(n, nl);
    let mut load = vec![0.0; n];
    let mut cq = DenseMatrix::zeros(nl, nv);
    let mut cu = DenseMatrix::zeros(nl, nw);
    let mut pb = PointBasis::new(k, space);

    let jac = 2.0 * geo.area;
    for (q, (&xi, &w)) in tables.quad.points.iter().zip(&tables.quad.weights).enumerate() {
        let x = geo.map(xi);
        let wj = w * jac;
        pb.fill(k, space, geo, x, &tables.phi[q], Some(&tables.dphi[q]));
        let b = beta.eval(x);
        let divb = beta.div(x);
        let f = (problem.source)(x);
        for i in 0..nv {
            let ri = pb.r[i];
            for j in 0..nv {
                let rj = pb.r[j];
                a[(i, j)] += wj * eps_inv * (ri[0] * rj[0] + ri[1] * rj[1]);
            }
            for j in 0..nw {
                a[(i, nv + j)] -= wj * pb.phi[j] * pb.div[i];
            }
        }
        for i in 0..nw {
            let phii = pb.phi[i];
            let adv = divb * phii + b[0] * pb.grad[i][0] + b[1] * pb.grad[i][1];
            for j in 0..nv {
                a[(nv + i, j)] += wj * pb.div[j] * phii;
            }
            for j in 0..nw {
                a[(nv + i, nv + j)] -= wj * pb.phi[j] * adv;
            }
            load[nv + i] += wj * f * phii;
        }
    }

    let mut t_diag = vec![0.0; nl];
    for l in 0..3 {
        let o = setup.flipped[l] as usize;
        let nrm = geo.outward_normal(l);
        let len = geo.face_length(l);
        let tau = setup.taus[l];
        for c in 0..nf {
            t_diag[l * nf + c] = tau * len;
        }
        for (q, &w) in tables.face_w.iter().enumerate() {
            let x = geo.map(tables.face_xi[l][o][q]);
            let wl = w * len;
            pb.fill(k, space, geo, x, &tables.face_phi[l][o][q], None);
            let mu = &tables.mu[q];
            let bn = beta.normal_component(x, nrm);
            for i in 0..nw {
                for j in 0..nw {
                    a[(nv + i, nv + j)] += wl * tau * pb.phi[j] * pb.phi[i];
                }
            }
            for m in 0..nf {
                let c = l * nf + m;
                for i in 0..nv {
                    let rn = pb.r[i][0] * nrm[0] + pb.r[i][1] * nrm[1];
                    e[(i, c)] -= wl * mu[m] * rn;
                    cq[(c, i)] += wl * rn * mu[m];
                }
                for i in 0..nw {
                    e[(nv + i, c)] += wl * (tau - bn) * mu[m] * pb.phi[i];
                    cu[(c, i)] += wl * tau * pb.phi[i] * mu[m];
                }
            }
        }
    }

    LocalMatrices { nv, nw, nl, a, e, load, cq, cu, t_diag }
}
