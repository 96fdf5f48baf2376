//! Polynomial spaces, quadrature, and L2-type projections on triangles.

mod face;
mod projection;
mod quadrature;
mod scalar;
mod tables;
mod vector;

pub use face::{face_basis, face_basis_into};
pub use projection::{eval_face, project_elem_scalar, project_elem_vector, project_face};
pub use quadrature::{gauss_legendre, triangle_quadrature, QuadratureRule, MAX_TRIANGLE_DEGREE};
pub use scalar::{scalar_dim, ScalarBasis};
pub use tables::{face_reference_point, ReferenceTables};
pub use vector::{eval_vector_basis, vector_dim, VectorSpace};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("quadrature degree {degree} unsupported (max {max})")]
    UnsupportedDegree { degree: usize, max: usize },
    #[error("moment system is singular: {0}")]
    SingularMoments(String),
}
