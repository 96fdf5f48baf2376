use serde::Serialize;

use super::FieldEvaluator;
use crate::basis::{eval_face, face_basis, gauss_legendre, triangle_quadrature, BasisError, ReferenceTables};
use crate::hdg::{element_flux_moments, DofMap, HdgSolution};
use crate::mesh::Mesh;
use crate::problems::ProblemSpec;

/// Relative residuals of identities satisfied exactly by the discrete
/// solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `(q/eps, q) + sum <(tau - beta.n/2)(u - lambda), u - lambda> - ((div beta) u, u)/2 = (f, u)`.
    /// Only defined for homogeneous prescribed data.
    pub energy: Option<f64>,
    /// Largest moment of the jump of the total flux across faces with
    /// unknowns, relative to the largest single-side moment.
    pub conservation: f64,
    /// Largest `|<lambda - g, mu>|` over prescribed faces, relative to
    /// `max(1, max |<g, mu>|)`.
    pub boundary: f64,
}

/// Prescribed data whose face moments are below this count as zero.
const HOMOGENEOUS_TOL: f64 = 1e-14;

pub fn identity_residuals(mesh: &Mesh, problem: &ProblemSpec, sol: &HdgSolution) -> Result<IdentityResiduals, BasisError> {
    let k = sol.k;
    let dofs = DofMap::new(mesh, problem, k);
    let tables = ReferenceTables::for_solver(k)?;

    // Conservation.
    let mut sums = vec![vec![0.0; k + 1]; mesh.n_faces()];
    let mut scale: f64 = 0.0;
    for e in 0..mesh.n_elements() {
        let mom = element_flux_moments(mesh, problem, sol, &tables, e);
        for (l, &f) in mesh.elements[e].faces.iter().enumerate() {
            for (s, m) in sums[f].iter_mut().zip(&mom[l]) {
                *s += m;
                scale = scale.max(m.abs());
            }
        }
    }
    let jump = dofs.unknown_faces.iter().flat_map(|&f| sums[f].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    let conservation = jump / scale.max(f64::MIN_POSITIVE);

    // Prescribed faces.
    let (fs, fw) = gauss_legendre(k + 3);
    let mut bmax: f64 = 0.0;
    let mut gmax: f64 = 1.0;
    let mut homogeneous = true;
    for f in (0..mesh.n_faces()).filter(|&f| dofs.face_dof[f].is_none()) {
        let [a, b] = mesh.face_endpoints(f);
        let len = mesh.faces[f].length;
        let data = |x: [f64; 2]| match (&problem.slit, mesh.faces[f].right) {
            (Some(slit), Some(_)) => (slit.value)(x),
            _ => (problem.dirichlet)(x),
        };
        let mut d = vec![0.0; k + 1];
        let mut g = vec![0.0; k + 1];
        for (&s, &w) in fs.iter().zip(&fw) {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let gx = data(x);
            let lam = eval_face(&sol.trace[f], s);
            for (m, mu) in face_basis(k, s).into_iter().enumerate() {
                d[m] += w * len * (lam - gx) * mu;
                g[m] += w * len * gx * mu;
            }
        }
        homogeneous &= g.iter().all(|v| v.abs() <= HOMOGENEOUS_TOL);
        bmax = d.iter().fold(bmax, |m, v| m.max(v.abs()));
        gmax = g.iter().fold(gmax, |m, v| m.max(v.abs()));
    }
    let boundary = bmax / gmax;

    let energy = if homogeneous { Some(energy_residual(mesh, problem, sol)?) } else { None };
    Ok(IdentityResiduals { energy, conservation, boundary })
}

fn energy_residual(mesh: &Mesh, problem: &ProblemSpec, sol: &HdgSolution) -> Result<f64, BasisError> {
    let k = sol.k;
    let ev = FieldEvaluator::new(k, sol.space);
    let quad = triangle_quadrature(2 * k + 4)?;
    let (fs, fw) = gauss_legendre(k + 3);
    let (mut flux, mut jump, mut react, mut load) = (0.0, 0.0, 0.0, 0.0);
    // Sums of absolute integrands, so that cancellation in `(f, u)` does not
    // inflate the relative residual.
    let (mut jump_abs, mut react_abs, mut load_abs) = (0.0, 0.0, 0.0);
    for e in 0..mesh.n_elements() {
        let geo = mesh.triangle(e);
        for (&xi, &w) in quad.points.iter().zip(&quad.weights) {
            let x = geo.map(xi);
            let wj = w * 2.0 * geo.area;
            let q = ev.vector(&geo, &sol.q[e], xi);
            let u = ev.scalar(&sol.u[e], xi);
            flux += wj * (q[0] * q[0] + q[1] * q[1]) / problem.epsilon;
            let r = wj * problem.beta.div(x) * u * u;
            let l = wj * (problem.source)(x) * u;
            react += r;
            react_abs += r.abs();
            load += l;
            load_abs += l.abs();
        }
        let el = &mesh.elements[e];
        for l in 0..3 {
            let [a, b] = geo.face_endpoints(l);
            let n = geo.outward_normal(l);
            let len = geo.face_length(l);
            for (&t, &w) in fs.iter().zip(&fw) {
                let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                let s = if el.flipped[l] { 1.0 - t } else { t };
                let d = ev.scalar(&sol.u[e], geo.to_reference(x)) - eval_face(&sol.trace[el.faces[l]], s);
                let j = w * len * (sol.taus[e][l] - 0.5 * problem.beta.normal_component(x, n)) * d * d;
                jump += j;
                jump_abs += j.abs();
            }
        }
    }
    let lhs = flux + jump - 0.5 * react;
    let scale = flux + jump_abs + 0.5 * react_abs + load_abs;
    Ok((lhs - load).abs() / scale.max(f64::MIN_POSITIVE))
}
