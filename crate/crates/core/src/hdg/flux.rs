use super::{HdgSolution, PointBasis};
use crate::basis::{eval_face, face_reference_point, ReferenceTables, ScalarBasis};
use crate::linalg::dot;
use crate::mesh::Mesh;
use crate::problems::ProblemSpec;

fn flux_value(
    problem: &ProblemSpec,
    sol: &HdgSolution,
    pb: &PointBasis,
    e: usize,
    local: usize,
    x: [f64; 2],
    n: [f64; 2],
    lambda: f64,
) -> f64 {
    let q = &sol.q[e];
    let qn: f64 = pb.r.iter().zip(q).map(|(r, c)| c * (r[0] * n[0] + r[1] * n[1])).sum();
    let u = dot(&sol.u[e], &pb.phi);
    qn + problem.beta.normal_component(x, n) * lambda + sol.taus[e][local] * (u - lambda)
}

/// Total flux `q.n + beta.n lambda + tau (u - lambda)` out of element `e`
/// through local face `local`, at face parameter `s`.
pub fn numerical_flux_at(mesh: &Mesh, problem: &ProblemSpec, sol: &HdgSolution, basis: &ScalarBasis, e: usize, local: usize, s: f64) -> f64 {
    let el = &mesh.elements[e];
    let geo = mesh.triangle(e);
    let t = if el.flipped[local] { 1.0 - s } else { s };
    let xi = face_reference_point(local, t);
    let x = geo.map(xi);
    let mut pb = PointBasis::new(sol.k, sol.space);
    pb.fill(sol.k, sol.space, &geo, x, &basis.eval(xi), None);
    let lambda = eval_face(&sol.trace[el.faces[local]], s);
    flux_value(problem, sol, &pb, e, local, x, geo.outward_normal(local), lambda)
}

/// Moments `<flux, mu_m>_F` of the outward total flux on each local face of
/// element `e`, in the face parameterization.
pub fn element_flux_moments(mesh: &Mesh, problem: &ProblemSpec, sol: &HdgSolution, tables: &ReferenceTables, e: usize) -> [Vec<f64>; 3] {
    let el = &mesh.elements[e];
    let geo = mesh.triangle(e);
    let mut pb = PointBasis::new(sol.k, sol.space);
    std::array::from_fn(|l| {
        let o = el.flipped[l] as usize;
        let n = geo.outward_normal(l);
        let len = geo.face_length(l);
        let lam = &sol.trace[el.faces[l]];
        let mut out = vec![0.0; sol.k + 1];
        for (q, &w) in tables.face_w.iter().enumerate() {
            let x = geo.map(tables.face_xi[l][o][q]);
            pb.fill(sol.k, sol.space, &geo, x, &tables.face_phi[l][o][q], None);
            let mu = &tables.mu[q];
            let v = flux_value(problem, sol, &pb, e, l, x, n, dot(lam, mu));
            for (m, om) in out.iter_mut().enumerate() {
                *om += w * len * v * mu[m];
            }
        }
        out
    })
}
