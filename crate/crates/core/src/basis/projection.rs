use super::{face_basis, gauss_legendre, scalar_dim, BasisError, ReferenceTables};
use crate::linalg::DenseMatrix;
use crate::mesh::AffineTriangle;

/// Face L2 projection onto `P_k`: coefficients `c_m = (1/|F|) <g, mu_m>_F`
/// in the face basis, parameterized from `a` to `b`.
pub fn project_face(a: [f64; 2], b: [f64; 2], k: usize, points: usize, g: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
    let (s, w) = gauss_legendre(points);
    let mut c = vec![0.0; k + 1];
    let mut mu = vec![0.0; k + 1];
    for (s, w) in s.iter().zip(&w) {
        super::face_basis_into(k, *s, &mut mu);
        let v = g([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        for m in 0..=k {
            c[m] += w * v * mu[m];
        }
    }
    c
}

/// Evaluates a face expansion at parameter `s`.
pub fn eval_face(coeffs: &[f64], s: f64) -> f64 {
    let mu = face_basis(coeffs.len() - 1, s);
    crate::linalg::dot(coeffs, &mu)
}

fn solve_moments(m: DenseMatrix, rhs: Vec<f64>) -> Result<Vec<f64>, BasisError> {
    m.lu().map(|lu| lu.solve(&rhs)).map_err(|e| BasisError::SingularMoments(e.to_string()))
}

/// Scalar projection determined by moments against `P_{k-1}(K)` and by the
/// moments against `P_k(F)` on local face `face_star`. Returns coefficients
/// in the scalar basis of `tables`.
pub fn project_elem_scalar(
    geo: &AffineTriangle,
    tables: &ReferenceTables,
    face_star: usize,
    u: impl Fn([f64; 2]) -> f64,
) -> Result<Vec<f64>, BasisError> {
    let k = tables.k;
    let nw = scalar_dim(k);
    let ni = if k == 0 { 0 } else { scalar_dim(k - 1) };
    let mut m = DenseMatrix::zeros(nw, nw);
    let mut rhs = vec![0.0; nw];
    let jw = 2.0 * geo.area;
    for (q, w) in tables.quad.weights.iter().enumerate() {
        let phi = &tables.phi[q];
        let uq = u(geo.map(tables.quad.points[q]));
        for i in 0..ni {
            rhs[i] += w * jw * uq * phi[i];
            for j in 0..nw {
                m[(i, j)] += w * jw * phi[i] * phi[j];
            }
        }
    }
    let len = geo.face_length(face_star);
    for (q, w) in tables.face_w.iter().enumerate() {
        let phi = &tables.face_phi[face_star][0][q];
        let mu = &tables.mu[q];
        let uq = u(geo.map(tables.face_xi[face_star][0][q]));
        for mm in 0..=k {
            rhs[ni + mm] += w * len * uq * mu[mm];
            for j in 0..nw {
                m[(ni + mm, j)] += w * len * phi[j] * mu[mm];
            }
        }
    }
    solve_moments(m, rhs)
}

/// Vector projection into `P_k(K)^2` determined by moments against
/// `P_{k-1}(K)^2` and by normal moments against `P_k(F)` on the two faces
/// other than `face_skip`. Coefficients follow the plain vector basis
/// ordering `(phi_j, 0)` then `(0, phi_j)`.
pub fn project_elem_vector(
    geo: &AffineTriangle,
    tables: &ReferenceTables,
    face_skip: usize,
    qf: impl Fn([f64; 2]) -> [f64; 2],
) -> Result<Vec<f64>, BasisError> {
    let k = tables.k;
    let nw = scalar_dim(k);
    let ni = if k == 0 { 0 } else { scalar_dim(k - 1) };
    let n = 2 * nw;
    let mut m = DenseMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    let jw = 2.0 * geo.area;
    for (q, w) in tables.quad.weights.iter().enumerate() {
        let phi = &tables.phi[q];
        let v = qf(geo.map(tables.quad.points[q]));
        for d in 0..2 {
            for i in 0..ni {
                let row = d * ni + i;
                rhs[row] += w * jw * v[d] * phi[i];
                for j in 0..nw {
                    m[(row, d * nw + j)] += w * jw * phi[i] * phi[j];
                }
            }
        }
    }
    let mut row0 = 2 * ni;
    for f in (0..3).filter(|&f| f != face_skip) {
        let n_out = geo.outward_normal(f);
        let len = geo.face_length(f);
        for (q, w) in tables.face_w.iter().enumerate() {
            let phi = &tables.face_phi[f][0][q];
            let mu = &tables.mu[q];
            let v = qf(geo.map(tables.face_xi[f][0][q]));
            let vn = v[0] * n_out[0] + v[1] * n_out[1];
            for mm in 0..=k {
                rhs[row0 + mm] += w * len * vn * mu[mm];
                for j in 0..nw {
                    m[(row0 + mm, j)] += w * len * phi[j] * n_out[0] * mu[mm];
                    m[(row0 + mm, nw + j)] += w * len * phi[j] * n_out[1] * mu[mm];
                }
            }
        }
        row0 += k + 1;
    }
    solve_moments(m, rhs)
}
