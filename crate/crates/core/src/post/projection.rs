use rayon::prelude::*;

use super::{l2_error_flux, l2_error_scalar, Region};
use crate::basis::{project_elem_scalar, project_elem_vector, BasisError, ReferenceTables, VectorSpace};
use crate::mesh::Mesh;
use crate::problems::{element_taus, select_face_s, select_face_star, ProblemSpec, Stabilization};

/// `|| Pi u - u ||` and `|| Pi q - q ||` for the moment projections whose
/// face conditions sit on the faces selected by `stab`. `None` without an
/// exact solution.
pub fn projection_errors(mesh: &Mesh, problem: &ProblemSpec, stab: &Stabilization, k: usize) -> Result<Option<(f64, f64)>, BasisError> {
    let Some(exact) = problem.exact.as_ref() else { return Ok(None) };
    let tables = ReferenceTables::for_solver(k)?;
    let coeffs = (0..mesh.n_elements())
        .into_par_iter()
        .map(|e| {
            let geo = mesh.triangle(e);
            let taus = element_taus(mesh, e, stab, &problem.beta, problem.epsilon);
            let star = select_face_star(&taus);
            let s = select_face_s(mesh, e, &taus, &problem.beta);
            let pu = project_elem_scalar(&geo, &tables, star, |x| (exact.u)(x))?;
            let pq = project_elem_vector(&geo, &tables, s, |x| problem.exact_flux(x).unwrap_or([0.0; 2]))?;
            Ok((pu, pq))
        })
        .collect::<Result<Vec<_>, BasisError>>()?;
    let (pu, pq): (Vec<_>, Vec<_>) = coeffs.into_iter().unzip();
    let eu = l2_error_scalar(mesh, k, &pu, |x| (exact.u)(x), &Region::Full)?;
    let eq = l2_error_flux(mesh, k, VectorSpace::Pk, &pq, |x| problem.exact_flux(x).unwrap_or([0.0; 2]), &Region::Full)?;
    Ok(Some((eu, eq)))
}
