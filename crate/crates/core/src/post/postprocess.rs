use rayon::prelude::*;

use crate::basis::{triangle_quadrature, BasisError, ScalarBasis};
use crate::hdg::HdgSolution;
use crate::linalg::DenseMatrix;
use crate::mesh::Mesh;

use super::FieldEvaluator;

/// Element-wise `P_{k+1}` reconstruction of the scalar.
#[derive(Debug, Clone)]
pub struct PostprocessedField {
    /// Polynomial degree, `k + 1`.
    pub degree: usize,
    pub coeffs: Vec<Vec<f64>>,
}

/// Solves `(grad u*, grad w)_K = -(q / eps, grad w)_K` for `w` in
/// `P_{k+1}(K)` with `(u*, 1)_K = (u_h, 1)_K`, the mean condition entering
/// through a Lagrange multiplier.
pub fn postprocess(mesh: &Mesh, sol: &HdgSolution, epsilon: f64) -> Result<PostprocessedField, BasisError> {
    let k = sol.k;
    let basis = ScalarBasis::new(k + 1);
    let n = basis.dim();
    let quad = triangle_quadrature(2 * k + 4)?;
    let ev = FieldEvaluator::new(k, sol.space);
    let tab: Vec<(Vec<f64>, Vec<[f64; 2]>)> = quad.points.iter().map(|&xi| (basis.eval(xi), basis.grad(xi))).collect();

    let coeffs = (0..mesh.n_elements())
        .into_par_iter()
        .map(|e| {
            let geo = mesh.triangle(e);
            let jw = 2.0 * geo.area;
            let mut m = DenseMatrix::zeros(n + 1, n + 1);
            let mut rhs = vec![0.0; n + 1];
            for (q, (&xi, &w)) in quad.points.iter().zip(&quad.weights).enumerate() {
                let wj = w * jw;
                let (phi, dphi) = &tab[q];
                let grads: Vec<[f64; 2]> = dphi.iter().map(|&g| geo.grad_to_physical(g)).collect();
                let qh = ev.vector(&geo, &sol.q[e], xi);
                let uh = ev.scalar(&sol.u[e], xi);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] += wj * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                    }
                    rhs[i] -= wj * (qh[0] * grads[i][0] + qh[1] * grads[i][1]) / epsilon;
                    m[(i, n)] += wj * phi[i];
                    m[(n, i)] += wj * phi[i];
                }
                rhs[n] += wj * uh;
            }
            let lu = m.lu().map_err(|err| BasisError::SingularMoments(format!("element {e}: {err}")))?;
            let mut c = lu.solve(&rhs);
            c.truncate(n);
            Ok(c)
        })
        .collect::<Result<Vec<_>, BasisError>>()?;
    Ok(PostprocessedField { degree: k + 1, coeffs })
}
