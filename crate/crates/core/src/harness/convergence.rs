use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{create_file, eps_tag, fmt_opt, HarnessError, RunConfig};
use crate::hdg::{assemble, Method};
use crate::post::{convergence_orders, identity_residuals, l2_error_flux, l2_error_scalar, postprocess, IdentityResiduals};
use crate::problems::ProblemSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub n: usize,
    pub h: f64,
    pub n_elements: usize,
    pub n_dofs: usize,
    pub u_error: Option<f64>,
    pub u_order: Option<f64>,
    pub q_error: Option<f64>,
    pub q_order: Option<f64>,
    pub ustar_error: Option<f64>,
    pub ustar_order: Option<f64>,
    pub identities: Option<IdentityResiduals>,
    /// `ok`, or why this level has no result.
    pub status: String,
}

/// Refinement history for one method and one diffusion coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub problem: String,
    pub method: Method,
    pub epsilon: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn row(&self, k: usize, n: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.k == k && r.n == n)
    }

    pub fn file_name(&self) -> String {
        format!("convergence_{}_{}_eps{}.csv", self.problem, self.method.name().to_lowercase(), eps_tag(self.epsilon))
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "method", "epsilon", "k", "n", "h", "elements", "dofs", "u_error", "u_order", "q_error", "q_order", "ustar_error", "ustar_order",
            "energy_residual", "conservation_residual", "boundary_residual", "status",
        ])?;
        let ord = |o: Option<f64>| o.map(|v| format!("{v:.4}")).unwrap_or_default();
        for r in &self.rows {
            let id = r.identities;
            out.write_record([
                self.method.name().to_string(),
                format!("{:e}", self.epsilon),
                r.k.to_string(),
                r.n.to_string(),
                format!("{:.6e}", r.h),
                r.n_elements.to_string(),
                r.n_dofs.to_string(),
                fmt_opt(r.u_error, 6),
                ord(r.u_order),
                fmt_opt(r.q_error, 6),
                ord(r.q_order),
                fmt_opt(r.ustar_error, 6),
                ord(r.ustar_order),
                fmt_opt(id.and_then(|i| i.energy), 3),
                fmt_opt(id.map(|i| i.conservation), 3),
                fmt_opt(id.map(|i| i.boundary), 3),
                r.status.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_to_dir(&self, dir: &Path) -> Result<PathBuf, HarnessError> {
        let path = dir.join(self.file_name());
        self.write_csv(create_file(&path)?).map_err(|e| HarnessError::io(&path, e))?;
        Ok(path)
    }
}

struct Level {
    n_elements: usize,
    n_dofs: usize,
    u: f64,
    q: f64,
    ustar: Option<f64>,
    identities: Option<IdentityResiduals>,
}

fn run_level(config: &RunConfig, problem: &ProblemSpec, method: Method, k: usize, n: usize) -> Result<Level, HarnessError> {
    let exact = problem.exact.as_ref().expect("checked by caller");
    let mesh = config.build_mesh(n, problem)?;
    let mut hc = method.config(k);
    hc.scaled = config.scaling == super::ScalingMode::Scaled;
    let assembly = assemble(&mesh, problem, &hc)?;
    let sol = assembly.solve(&mesh)?;
    let u = l2_error_scalar(&mesh, k, &sol.u, |x| (exact.u)(x), &config.region)?;
    let q = l2_error_flux(&mesh, k, sol.space, &sol.q, |x| problem.exact_flux(x).unwrap_or([0.0; 2]), &config.region)?;
    let ustar = if config.postprocess {
        let pp = postprocess(&mesh, &sol, problem.epsilon)?;
        Some(l2_error_scalar(&mesh, pp.degree, &pp.coeffs, |x| (exact.u)(x), &config.region)?)
    } else {
        None
    };
    let identities = if config.identities { Some(identity_residuals(&mesh, problem, &sol)?) } else { None };
    Ok(Level { n_elements: mesh.n_elements(), n_dofs: sol.n_dofs, u, q, ustar, identities })
}

fn orders_for(errors: &[Option<f64>], hs: &[f64]) -> Vec<Option<f64>> {
    let mut out = vec![None; errors.len()];
    for i in 1..errors.len() {
        if let (Some(a), Some(b)) = (errors[i - 1], errors[i]) {
            out[i] = convergence_orders(&[a, b], &hs[i - 1..=i])[0];
        }
    }
    out
}

/// One table per (method, epsilon), in config order. Independent levels run
/// concurrently. A failed level ends its `k` column; later levels of that
/// column are reported as skipped.
pub fn run_convergence(config: &RunConfig) -> Result<Vec<ConvergenceTable>, HarnessError> {
    config.validate()?;
    let mut tables = Vec::new();
    for &epsilon in &config.epsilons {
        let problem = config.build_problem(epsilon)?;
        if problem.exact.is_none() {
            return Err(HarnessError::Config(format!("problem {:?} has no exact solution", problem.name)));
        }
        for &method in &config.methods {
            let jobs: Vec<(usize, usize)> = config.ks.iter().flat_map(|&k| config.levels.iter().map(move |&n| (k, n))).collect();
            let results: Vec<_> = jobs.par_iter().map(|&(k, n)| run_level(config, &problem, method, k, n)).collect();
            let mut rows = Vec::with_capacity(jobs.len());
            for (ki, &k) in config.ks.iter().enumerate() {
                let nl = config.levels.len();
                let hs: Vec<f64> = config.levels.iter().map(|&n| 1.0 / n as f64).collect();
                let mut failed: Option<usize> = None;
                let mut col = Vec::with_capacity(nl);
                for (li, &n) in config.levels.iter().enumerate() {
                    let mut row = ConvergenceRow {
                        k,
                        n,
                        h: hs[li],
                        n_elements: 0,
                        n_dofs: 0,
                        u_error: None,
                        u_order: None,
                        q_error: None,
                        q_order: None,
                        ustar_error: None,
                        ustar_order: None,
                        identities: None,
                        status: "ok".into(),
                    };
                    match (&results[ki * nl + li], failed) {
                        (_, Some(at)) => row.status = format!("skipped after failure at n={at}"),
                        (Ok(l), None) => {
                            row.n_elements = l.n_elements;
                            row.n_dofs = l.n_dofs;
                            row.u_error = Some(l.u);
                            row.q_error = Some(l.q);
                            row.ustar_error = l.ustar;
                            row.identities = l.identities;
                        }
                        (Err(e), None) => {
                            row.status = format!("failed: {e}");
                            failed = Some(n);
                        }
                    }
                    col.push(row);
                }
                let get = |f: fn(&ConvergenceRow) -> Option<f64>| col.iter().map(f).collect::<Vec<_>>();
                let (ou, oq, os) = (orders_for(&get(|r| r.u_error), &hs), orders_for(&get(|r| r.q_error), &hs), orders_for(&get(|r| r.ustar_error), &hs));
                for (i, r) in col.iter_mut().enumerate() {
                    r.u_order = ou[i];
                    r.q_order = oq[i];
                    r.ustar_order = os[i];
                }
                rows.extend(col);
            }
            tables.push(ConvergenceTable { problem: config.problem_name(), method, epsilon, rows });
        }
    }
    Ok(tables)
}
