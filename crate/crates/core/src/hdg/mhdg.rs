//! Mixed-hybrid DG with upwind convective flux, assembled as one global
//! system and condensed densely onto the trace. Used to check that the
//! hybridized method with enriched fluxes and `tau = max(beta.n, 0)`
//! produces the same trace operator.

use serde::Serialize;

use super::{assemble, DofMap, HdgConfig, HdgError};
use crate::basis::{eval_vector_basis, face_basis, gauss_legendre, scalar_dim, triangle_quadrature, vector_dim, ScalarBasis, VectorSpace};
use crate::linalg::DenseMatrix;
use crate::mesh::Mesh;
use crate::problems::{ProblemSpec, Stabilization};

pub const MHDG_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct MhdgReport {
    pub k: usize,
    pub space: VectorSpace,
    pub n_elements: usize,
    /// `max |A_hdg - A_mhdg| / max |A_mhdg|`.
    pub matrix_diff: f64,
    /// Same for the right-hand sides.
    pub rhs_diff: f64,
    pub equivalent: bool,
}

/// Compares the trace system of the hybridized method (flux space `space`,
/// `tau = max(sup beta.n, 0)`, unscaled) with the condensed mixed-hybrid
/// DG system, which always uses the enriched flux space.
pub fn mhdg_equivalence(mesh: &Mesh, problem: &ProblemSpec, k: usize, space: VectorSpace) -> Result<MhdgReport, HdgError> {
    let config = HdgConfig { k, space, stabilization: Stabilization::Tau1, scaled: false };
    let hdg = assemble(mesh, problem, &config)?;
    let a_hdg = hdg.system.matrix.to_dense();
    let (a_mh, b_mh) = mhdg_trace_system(mesh, problem, k, &hdg.dofs, &hdg.dirichlet)?;

    let scale_a = a_mh.max_abs().max(f64::MIN_POSITIVE);
    let matrix_diff = a_hdg.sub(&a_mh).max_abs() / scale_a;
    let scale_b = b_mh.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let rhs_diff = hdg.system.rhs.iter().zip(&b_mh).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale_b;
    Ok(MhdgReport {
        k,
        space,
        n_elements: mesh.n_elements(),
        matrix_diff,
        rhs_diff,
        equivalent: matrix_diff <= MHDG_TOLERANCE && rhs_diff <= MHDG_TOLERANCE,
    })
}

/// Condensed mixed-hybrid system in the numbering of `dofs`.
///
/// Element unknowns `z = (q, u)` satisfy
/// `(q/eps, r) - (u, div r) + <lambda, r.n> = 0` and
/// `(div q, w) - (beta u, grad w) + <(beta.n)^+ u + (beta.n)^- lambda, w> = (f, w)`;
/// trace rows are `-sum_K <q.n + (beta.n)^+ u + (beta.n)^- lambda, mu> = 0`.
fn mhdg_trace_system(mesh: &Mesh, problem: &ProblemSpec, k: usize, dofs: &DofMap, dirichlet: &[Vec<f64>]) -> Result<(DenseMatrix, Vec<f64>), HdgError> {
    let space = VectorSpace::RtEnriched;
    let nw = scalar_dim(k);
    let nv = vector_dim(k, space);
    let nz = nv + nw;
    let ne = mesh.n_elements();
    let nf = k + 1;
    let nt = mesh.n_faces() * nf;
    let basis = ScalarBasis::new(k);
    let quad = triangle_quadrature(2 * k + 4)?;
    let (fs, fw) = gauss_legendre(k + 3);
    let eps_inv = 1.0 / problem.epsilon;

    let mut a_zz = DenseMatrix::zeros(ne * nz, ne * nz);
    let mut a_zl = DenseMatrix::zeros(ne * nz, nt);
    let mut c_z = DenseMatrix::zeros(nt, ne * nz);
    let mut c_l = DenseMatrix::zeros(nt, nt);
    let mut f_z = vec![0.0; ne * nz];

    let mut grad = vec![[0.0; 2]; nw];
    let mut r = vec![[0.0; 2]; nv];
    let mut div = vec![0.0; nv];
    for e in 0..ne {
        let geo = mesh.triangle(e);
        let z0 = e * nz;
        for (xi, w) in quad.points.iter().zip(&quad.weights) {
            let x = geo.map(*xi);
            let wj = w * 2.0 * geo.area;
            let phi = basis.eval(*xi);
            for (g, gr) in grad.iter_mut().zip(basis.grad(*xi)) {
                *g = geo.grad_to_physical(gr);
            }
            eval_vector_basis(k, space, &geo, x, &phi, &grad, &mut r, &mut div);
            let b = problem.beta.eval(x);
            let f = (problem.source)(x);
            for i in 0..nv {
                for j in 0..nv {
                    a_zz[(z0 + i, z0 + j)] += wj * eps_inv * (r[i][0] * r[j][0] + r[i][1] * r[j][1]);
                }
                for j in 0..nw {
                    a_zz[(z0 + i, z0 + nv + j)] -= wj * phi[j] * div[i];
                }
            }
            for i in 0..nw {
                let bgrad = b[0] * grad[i][0] + b[1] * grad[i][1];
                for j in 0..nv {
                    a_zz[(z0 + nv + i, z0 + j)] += wj * div[j] * phi[i];
                }
                for j in 0..nw {
                    a_zz[(z0 + nv + i, z0 + nv + j)] -= wj * phi[j] * bgrad;
                }
                f_z[z0 + nv + i] += wj * f * phi[i];
            }
        }

        for (l, &fid) in mesh.elements[e].faces.iter().enumerate() {
            let n = geo.outward_normal(l);
            let [pa, pb] = mesh.face_endpoints(fid);
            let len = mesh.faces[fid].length;
            let t0 = fid * nf;
            for (s, w) in fs.iter().zip(&fw) {
                let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
                let xi = geo.to_reference(x);
                let phi = basis.eval(xi);
                eval_vector_basis(k, space, &geo, x, &phi, &grad, &mut r, &mut []);
                let mu = face_basis(k, *s);
                let bn = problem.beta.normal_component(x, n);
                let (up, down) = (bn.max(0.0), bn.min(0.0));
                let wl = w * len;
                for i in 0..nw {
                    for j in 0..nw {
                        a_zz[(z0 + nv + i, z0 + nv + j)] += wl * up * phi[j] * phi[i];
                    }
                }
                for m in 0..nf {
                    for i in 0..nv {
                        let rn = r[i][0] * n[0] + r[i][1] * n[1];
                        a_zl[(z0 + i, t0 + m)] += wl * mu[m] * rn;
                        c_z[(t0 + m, z0 + i)] += wl * rn * mu[m];
                    }
                    for i in 0..nw {
                        a_zl[(z0 + nv + i, t0 + m)] += wl * down * mu[m] * phi[i];
                        c_z[(t0 + m, z0 + nv + i)] += wl * up * phi[i] * mu[m];
                    }
                    for p in 0..nf {
                        c_l[(t0 + m, t0 + p)] += wl * down * mu[p] * mu[m];
                    }
                }
            }
        }
    }

    // Trace rows: -(c_z z + c_l lambda) with z = A^-1 (f - A_zl lambda).
    let lu = a_zz.lu()?;
    let y_l = lu.solve_matrix(&a_zl);
    let y_f = lu.solve(&f_z);
    let full = c_z.matmul(&y_l).sub(&c_l);
    let full_rhs = c_z.matvec(&y_f);

    let n = dofs.n_dofs();
    let mut a = DenseMatrix::zeros(n, n);
    let mut b = vec![0.0; n];
    for (fa, da) in dofs.face_dof.iter().enumerate() {
        let Some(da) = da else { continue };
        for m in 0..nf {
            let (row, grow) = (da * nf + m, fa * nf + m);
            b[row] = full_rhs[grow];
            for (fb, db) in dofs.face_dof.iter().enumerate() {
                for p in 0..nf {
                    let v = full[(grow, fb * nf + p)];
                    match db {
                        Some(db) => a[(row, db * nf + p)] = v,
                        None => b[row] -= v * dirichlet[fb][p],
                    }
                }
            }
        }
    }
    Ok((a, b))
}
