use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{create_file, eps_tag, HarnessError, RunConfig};
use crate::basis::VectorSpace;
use crate::hdg::{solve_hdg, HdgSolution};
use crate::mesh::{write_vtk, Mesh, VtkField};
use crate::post::{postprocess, FieldEvaluator, PostprocessedField};

/// Element fields sampled on a discontinuous sub-triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub points: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub u: Vec<f64>,
    pub ustar: Option<Vec<f64>>,
}

/// Splits every element into `4^k` similar triangles and samples `u_h` (and
/// the postprocessed field, if given) at their vertices. Vertices are not
/// shared between elements.
pub fn sample_fields(mesh: &Mesh, sol: &HdgSolution, pp: Option<&PostprocessedField>) -> FieldSamples {
    let m = 1usize << sol.k;
    let mut local = Vec::new();
    for j in 0..=m {
        for i in 0..=m - j {
            local.push([i as f64 / m as f64, j as f64 / m as f64]);
        }
    }
    let start: Vec<usize> = (0..=m)
        .scan(0, |s, j| {
            let row = *s;
            *s += m + 1 - j;
            Some(row)
        })
        .collect();
    let at = |i: usize, j: usize| start[j] + i;
    let mut local_tris = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m - j {
            local_tris.push([at(i, j), at(i + 1, j), at(i, j + 1)]);
            if i + j + 1 < m {
                local_tris.push([at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
    }
    let ev = FieldEvaluator::new(sol.k, VectorSpace::Pk);
    let ev_star = pp.map(|p| FieldEvaluator::new(p.degree, VectorSpace::Pk));
    let np = local.len();
    let mut samples = FieldSamples {
        points: Vec::with_capacity(np * mesh.n_elements()),
        triangles: Vec::with_capacity(local_tris.len() * mesh.n_elements()),
        u: Vec::with_capacity(np * mesh.n_elements()),
        ustar: pp.map(|_| Vec::with_capacity(np * mesh.n_elements())),
    };
    for e in 0..mesh.n_elements() {
        let geo = mesh.triangle(e);
        let base = samples.points.len();
        for &xi in &local {
            samples.points.push(geo.map(xi));
            samples.u.push(ev.scalar(&sol.u[e], xi));
            if let (Some(p), Some(es), Some(out)) = (pp, &ev_star, samples.ustar.as_mut()) {
                out.push(es.scalar(&p.coeffs[e], xi));
            }
        }
        samples.triangles.extend(local_tris.iter().map(|t| [base + t[0], base + t[1], base + t[2]]));
    }
    samples
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldArtifact {
    pub path: PathBuf,
    pub k: usize,
    pub n: usize,
    pub epsilon: f64,
    pub min: f64,
    pub max: f64,
    pub all_finite: bool,
}

/// Writes one VTK file per (method, epsilon, k, n).
pub fn run_fields(config: &RunConfig, out_dir: &Path) -> Result<Vec<FieldArtifact>, HarnessError> {
    config.validate()?;
    let mut out = Vec::new();
    for &epsilon in &config.epsilons {
        let problem = config.build_problem(epsilon)?;
        for &method in &config.methods {
            for &k in &config.ks {
                for &n in &config.levels {
                    let mesh = config.build_mesh(n, &problem)?;
                    let sol = solve_hdg(&mesh, &problem, &method.config(k))?;
                    let pp = if config.postprocess { Some(postprocess(&mesh, &sol, epsilon)?) } else { None };
                    let s = sample_fields(&mesh, &sol, pp.as_ref());
                    let mut fields = vec![VtkField { name: "u_h", values: &s.u }];
                    if let Some(us) = &s.ustar {
                        fields.push(VtkField { name: "u_star", values: us });
                    }
                    let name = format!("fields_{}_{}_eps{}_k{k}_n{n}.vtk", config.problem_name(), method.name().to_lowercase(), eps_tag(epsilon));
                    let path = out_dir.join(name);
                    let title = format!("{} {} eps={epsilon:e} k={k} n={n}", config.problem_name(), method);
                    write_vtk(create_file(&path)?, &title, &s.points, &s.triangles, &fields)?;
                    out.push(FieldArtifact {
                        path,
                        k,
                        n,
                        epsilon,
                        min: s.u.iter().copied().fold(f64::INFINITY, f64::min),
                        max: s.u.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                        all_finite: s.u.iter().all(|v| v.is_finite()),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hdg::Method;
    use crate::mesh::{structured_unit_square, Diagonal};
    use crate::problems::smooth;

    #[test]
    fn subdivision_counts_and_area() {
        let mesh = structured_unit_square(2, Diagonal::NE).unwrap();
        let p = smooth(1.0).unwrap();
        for k in 0..3 {
            let sol = solve_hdg(&mesh, &p, &Method::Hdg1.config(k)).unwrap();
            let s = sample_fields(&mesh, &sol, None);
            assert_eq!(s.triangles.len(), mesh.n_elements() << (2 * k));
            let area: f64 = s
                .triangles
                .iter()
                .map(|t| {
                    let [a, b, c] = t.map(|i| s.points[i]);
                    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
                })
                .sum();
            assert!((area - 1.0).abs() < 1e-12, "k={k}: area {area}");
        }
    }
}
