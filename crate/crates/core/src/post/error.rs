use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FieldEvaluator;
use crate::basis::{eval_face, gauss_legendre, scalar_dim, triangle_quadrature, BasisError, VectorSpace};
use crate::hdg::HdgSolution;
use crate::mesh::Mesh;
use crate::problems::ProblemSpec;

/// Part of the domain over which an error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    #[default]
    Full,
    /// Elements lying entirely inside `[lo, hi]`.
    Box { lo: [f64; 2], hi: [f64; 2] },
}

impl Region {
    pub fn reduced_unit_square() -> Self {
        Region::Box { lo: [0.0, 0.0], hi: [0.9, 0.9] }
    }

    pub fn contains_element(&self, mesh: &Mesh, e: usize) -> bool {
        match self {
            Region::Full => true,
            Region::Box { lo, hi } => {
                let tol = 1e-12;
                mesh.elements[e].vertices.iter().all(|&v| {
                    let p = mesh.vertices[v];
                    p[0] >= lo[0] - tol && p[0] <= hi[0] + tol && p[1] >= lo[1] - tol && p[1] <= hi[1] + tol
                })
            }
        }
    }
}

/// Area of the elements selected by `region`. For a box this equals the box
/// area exactly when the mesh tiles it.
pub fn region_area(mesh: &Mesh, region: &Region) -> f64 {
    (0..mesh.n_elements()).filter(|&e| region.contains_element(mesh, e)).map(|e| mesh.elements[e].area).sum()
}

fn error_quadrature(k: usize) -> Result<crate::basis::QuadratureRule, BasisError> {
    triangle_quadrature(2 * (k + 1) + 4)
}

/// `|| u - u_h ||` over `region` for element expansions of degree `k` in the
/// scalar basis (`u_h` or a postprocessed field).
pub fn l2_error_scalar(mesh: &Mesh, k: usize, coeffs: &[Vec<f64>], exact: impl Fn([f64; 2]) -> f64 + Sync, region: &Region) -> Result<f64, BasisError> {
    debug_assert!(coeffs.iter().all(|c| c.len() == scalar_dim(k)));
    let quad = error_quadrature(k)?;
    let ev = FieldEvaluator::new(k, VectorSpace::Pk);
    let sq: Vec<f64> = (0..mesh.n_elements())
        .into_par_iter()
        .map(|e| {
            if !region.contains_element(mesh, e) {
                return 0.0;
            }
            let geo = mesh.triangle(e);
            quad.points
                .iter()
                .zip(&quad.weights)
                .map(|(&xi, &w)| {
                    let d = exact(geo.map(xi)) - ev.scalar(&coeffs[e], xi);
                    w * 2.0 * geo.area * d * d
                })
                .sum()
        })
        .collect();
    Ok(sq.iter().sum::<f64>().sqrt())
}

/// `|| q - q_h ||` over `region`.
pub fn l2_error_flux(
    mesh: &Mesh,
    k: usize,
    space: VectorSpace,
    coeffs: &[Vec<f64>],
    exact: impl Fn([f64; 2]) -> [f64; 2] + Sync,
    region: &Region,
) -> Result<f64, BasisError> {
    let quad = error_quadrature(k)?;
    let ev = FieldEvaluator::new(k, space);
    let sq: Vec<f64> = (0..mesh.n_elements())
        .into_par_iter()
        .map(|e| {
            if !region.contains_element(mesh, e) {
                return 0.0;
            }
            let geo = mesh.triangle(e);
            quad.points
                .iter()
                .zip(&quad.weights)
                .map(|(&xi, &w)| {
                    let q = exact(geo.map(xi));
                    let qh = ev.vector(&geo, &coeffs[e], xi);
                    let (dx, dy) = (q[0] - qh[0], q[1] - qh[1]);
                    w * 2.0 * geo.area * (dx * dx + dy * dy)
                })
                .sum()
        })
        .collect();
    Ok(sq.iter().sum::<f64>().sqrt())
}

/// `( ||eps^-1/2 r||^2 + ||w||^2 + sum_K || |tau - beta.n/2|^1/2 (w - mu) ||^2_dK )^1/2`
/// with `r`, `w` given per element and `mu` per face. `degree` sets the
/// quadrature as for polynomial degree `degree`.
pub fn triple_norm(
    mesh: &Mesh,
    problem: &ProblemSpec,
    taus: &[[f64; 3]],
    degree: usize,
    r: impl Fn(usize, [f64; 2]) -> [f64; 2] + Sync,
    w: impl Fn(usize, [f64; 2]) -> f64 + Sync,
    mu: impl Fn(usize, [f64; 2]) -> f64 + Sync,
) -> Result<f64, BasisError> {
    let quad = error_quadrature(degree)?;
    let (fs, fw) = gauss_legendre(degree + 4);
    let eps_inv = 1.0 / problem.epsilon;
    let sq: Vec<f64> = (0..mesh.n_elements())
        .into_par_iter()
        .map(|e| {
            let geo = mesh.triangle(e);
            let mut acc = 0.0;
            for (&xi, &wq) in quad.points.iter().zip(&quad.weights) {
                let x = geo.map(xi);
                let rv = r(e, x);
                let wv = w(e, x);
                acc += wq * 2.0 * geo.area * (eps_inv * (rv[0] * rv[0] + rv[1] * rv[1]) + wv * wv);
            }
            for (l, &f) in mesh.elements[e].faces.iter().enumerate() {
                let [a, b] = geo.face_endpoints(l);
                let n = geo.outward_normal(l);
                let len = geo.face_length(l);
                for (&t, &wt) in fs.iter().zip(&fw) {
                    let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                    let weight = (taus[e][l] - 0.5 * problem.beta.normal_component(x, n)).abs();
                    let d = w(e, x) - mu(f, x);
                    acc += wt * len * weight * d * d;
                }
            }
            acc
        })
        .collect();
    Ok(sq.iter().sum::<f64>().sqrt())
}

/// Triple norm of `(q - q_h, u - u_h, u - lambda_h)`, if the exact solution
/// is known.
pub fn solution_triple_error(mesh: &Mesh, problem: &ProblemSpec, sol: &HdgSolution) -> Result<Option<f64>, BasisError> {
    let Some(exact) = problem.exact.as_ref() else { return Ok(None) };
    let ev = FieldEvaluator::new(sol.k, sol.space);
    let geos: Vec<_> = (0..mesh.n_elements()).map(|e| mesh.triangle(e)).collect();
    let r = |e: usize, x: [f64; 2]| {
        let q = problem.exact_flux(x).unwrap_or([0.0; 2]);
        let qh = ev.vector(&geos[e], &sol.q[e], geos[e].to_reference(x));
        [q[0] - qh[0], q[1] - qh[1]]
    };
    let w = |e: usize, x: [f64; 2]| (exact.u)(x) - ev.scalar(&sol.u[e], geos[e].to_reference(x));
    let mu = |f: usize, x: [f64; 2]| (exact.u)(x) - eval_face(&sol.trace[f], face_parameter(mesh, f, x));
    triple_norm(mesh, problem, &sol.taus, sol.k, r, w, mu).map(Some)
}

fn face_parameter(mesh: &Mesh, f: usize, x: [f64; 2]) -> f64 {
    let [a, b] = mesh.face_endpoints(f);
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    ((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / (dx * dx + dy * dy)
}

/// Observed orders `log(e_{i-1} / e_i) / log(h_{i-1} / h_i)`; `None` where
/// an error vanishes.
pub fn convergence_orders(errors: &[f64], hs: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(errors.len(), hs.len(), "one mesh size per error");
    errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| {
            if e[0] > 0.0 && e[1] > 0.0 {
                Some((e[0] / e[1]).ln() / (h[0] / h[1]).ln())
            } else {
                None
            }
        })
        .collect()
}

/// One error column over a refinement history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub quantity: String,
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    pub orders: Vec<Option<f64>>,
}

impl ErrorReport {
    pub fn new(quantity: impl Into<String>, h: Vec<f64>, errors: Vec<f64>) -> Self {
        let orders = convergence_orders(&errors, &h);
        Self { quantity: quantity.into(), h, errors, orders }
    }

    /// Writes `h,error,order` rows; the first level has an empty order.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["h", "error", "order"])?;
        for (i, (h, e)) in self.h.iter().zip(&self.errors).enumerate() {
            let order = match i.checked_sub(1).and_then(|j| self.orders[j]) {
                Some(o) => format!("{o:.4}"),
                None => String::new(),
            };
            out.write_record([format!("{h:.6e}"), format!("{e:.6e}"), order])?;
        }
        out.flush()?;
        Ok(())
    }
}
