//! Postprocessing, error norms and residual checks of the discrete scheme.

mod error;
mod identities;
mod postprocess;
mod projection;

pub use error::{convergence_orders, l2_error_flux, l2_error_scalar, region_area, solution_triple_error, triple_norm, ErrorReport, Region};
pub use identities::{identity_residuals, IdentityResiduals};
pub use postprocess::{postprocess, PostprocessedField};
pub use projection::projection_errors;

use crate::basis::{eval_vector_basis, scalar_dim, vector_dim, ScalarBasis, VectorSpace};
use crate::linalg::dot;
use crate::mesh::AffineTriangle;

/// Evaluates element expansions at reference points.
#[derive(Debug, Clone)]
pub struct FieldEvaluator {
    pub k: usize,
    pub space: VectorSpace,
    basis: ScalarBasis,
}

impl FieldEvaluator {
    pub fn new(k: usize, space: VectorSpace) -> Self {
        Self { k, space, basis: ScalarBasis::new(k) }
    }

    pub fn scalar(&self, coeffs: &[f64], xi: [f64; 2]) -> f64 {
        debug_assert_eq!(coeffs.len(), scalar_dim(self.k));
        dot(coeffs, &self.basis.eval(xi))
    }

    pub fn scalar_grad(&self, geo: &AffineTriangle, coeffs: &[f64], xi: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (c, d) in coeffs.iter().zip(self.basis.grad(xi)) {
            let d = geo.grad_to_physical(d);
            g[0] += c * d[0];
            g[1] += c * d[1];
        }
        g
    }

    pub fn vector(&self, geo: &AffineTriangle, coeffs: &[f64], xi: [f64; 2]) -> [f64; 2] {
        let nv = vector_dim(self.k, self.space);
        debug_assert_eq!(coeffs.len(), nv);
        let phi = self.basis.eval(xi);
        let mut val = vec![[0.0; 2]; nv];
        eval_vector_basis(self.k, self.space, geo, geo.map(xi), &phi, &[], &mut val, &mut []);
        let mut v = [0.0; 2];
        for (c, r) in coeffs.iter().zip(&val) {
            v[0] += c * r[0];
            v[1] += c * r[1];
        }
        v
    }
}
