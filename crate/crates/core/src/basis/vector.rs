use super::scalar_dim;
use crate::mesh::AffineTriangle;

/// Flux space on each element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorSpace {
    /// `P_k(K)^2`.
    Pk,
    /// `P_k(K)^2 + x P_k(K)`.
    RtEnriched,
}

pub const fn vector_dim(k: usize, space: VectorSpace) -> usize {
    match space {
        VectorSpace::Pk => 2 * scalar_dim(k),
        VectorSpace::RtEnriched => (k + 1) * (k + 3),
    }
}

/// Evaluates the vector basis at one physical point.
///
/// `phi` and `grad` are the scalar `P_k` basis values and physical gradients
/// at `x`. Ordering: `(phi_j, 0)`, then `(0, phi_j)`, then for the enriched
/// space `(x - x_c) phi_j / h_K` over the degree-`k` part of the scalar basis.
/// `div` may be empty when divergences are not needed.
pub fn eval_vector_basis(
    k: usize,
    space: VectorSpace,
    geo: &AffineTriangle,
    x: [f64; 2],
    phi: &[f64],
    grad: &[[f64; 2]],
    val: &mut [[f64; 2]],
    div: &mut [f64],
) {
    let nw = scalar_dim(k);
    let want_div = !div.is_empty();
    for j in 0..nw {
        val[j] = [phi[j], 0.0];
        val[nw + j] = [0.0, phi[j]];
        if want_div {
            div[j] = grad[j][0];
            div[nw + j] = grad[j][1];
        }
    }
    if space == VectorSpace::RtEnriched {
        let lo = if k == 0 { 0 } else { scalar_dim(k - 1) };
        let d = [(x[0] - geo.centroid[0]) / geo.h, (x[1] - geo.centroid[1]) / geo.h];
        for (m, j) in (lo..nw).enumerate() {
            val[2 * nw + m] = [d[0] * phi[j], d[1] * phi[j]];
            if want_div {
                div[2 * nw + m] = 2.0 * phi[j] / geo.h + d[0] * grad[j][0] + d[1] * grad[j][1];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{triangle_quadrature, ScalarBasis};

    #[test]
    fn dimensions() {
        for k in 0..5 {
            assert_eq!(vector_dim(k, VectorSpace::Pk), (k + 1) * (k + 2));
            assert_eq!(vector_dim(k, VectorSpace::RtEnriched), vector_dim(k, VectorSpace::Pk) + k + 1);
        }
    }

    /// Gram matrix of the enriched basis on a physical triangle has full rank
    /// and a modest condition number.
    #[test]
    fn enriched_basis_is_independent() {
        let geo = AffineTriangle::new([[0.1, 0.2], [0.6, 0.25], [0.3, 0.7]]);
        for k in 0..=3 {
            let basis = ScalarBasis::new(k);
            let n = vector_dim(k, VectorSpace::RtEnriched);
            let q = triangle_quadrature(2 * k + 2).unwrap();
            let mut g = crate::linalg::DenseMatrix::zeros(n, n);
            let mut val = vec![[0.0; 2]; n];
            for (p, w) in q.points.iter().zip(&q.weights) {
                let x = geo.map(*p);
                let phi = basis.eval(*p);
                let grad: Vec<[f64; 2]> = basis.grad(*p).into_iter().map(|g| geo.grad_to_physical(g)).collect();
                eval_vector_basis(k, VectorSpace::RtEnriched, &geo, x, &phi, &grad, &mut val, &mut []);
                for i in 0..n {
                    for j in 0..n {
                        g[(i, j)] += w * 2.0 * geo.area * (val[i][0] * val[j][0] + val[i][1] * val[j][1]);
                    }
                }
            }
            let c = crate::linalg::cond2_dense(&g).unwrap().value;
            assert!(c < 1e8, "k={k} cond={c}");
        }
    }

    #[test]
    fn enriched_divergence_matches_finite_difference() {
        let geo = AffineTriangle::new([[0.0, 0.0], [0.5, 0.1], [0.2, 0.4]]);
        let k = 2;
        let basis = ScalarBasis::new(k);
        let n = vector_dim(k, VectorSpace::RtEnriched);
        let eval = |x: [f64; 2]| {
            let xi = geo.to_reference(x);
            let phi = basis.eval(xi);
            let grad: Vec<[f64; 2]> = basis.grad(xi).into_iter().map(|g| geo.grad_to_physical(g)).collect();
            let mut val = vec![[0.0; 2]; n];
            let mut div = vec![0.0; n];
            eval_vector_basis(k, VectorSpace::RtEnriched, &geo, x, &phi, &grad, &mut val, &mut div);
            (val, div)
        };
        let x = [0.22, 0.15];
        let d = 1e-6;
        let (_, div) = eval(x);
        let (xp, _) = eval([x[0] + d, x[1]]);
        let (xm, _) = eval([x[0] - d, x[1]]);
        let (yp, _) = eval([x[0], x[1] + d]);
        let (ym, _) = eval([x[0], x[1] - d]);
        for i in 0..n {
            let fd = (xp[i][0] - xm[i][0] + yp[i][1] - ym[i][1]) / (2.0 * d);
            assert!((fd - div[i]).abs() < 1e-5 * (1.0 + div[i].abs()), "{i}: {fd} vs {}", div[i]);
        }
    }
}
