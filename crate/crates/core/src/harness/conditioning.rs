use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{create_file, HarnessError, RunConfig};
use crate::hdg::{assemble, scaling_weights, Method};
use crate::linalg::{cond2, CondEstimate, CondMethod};

/// Which matrix the condition number is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// Trace operator on every face, with identity rows for prescribed
    /// faces. Used for the reported trends.
    AllFaces,
    /// Trace system on the faces carrying unknowns only.
    Interior,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::AllFaces => "all_faces",
            Representation::Interior => "interior",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondRow {
    pub epsilon: f64,
    pub k: usize,
    pub n: usize,
    pub representation: Representation,
    pub scaled: bool,
    pub dim: usize,
    pub kappa: Option<CondEstimate>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditioningTable {
    pub problem: String,
    pub method: Method,
    pub rows: Vec<CondRow>,
}

impl ConditioningTable {
    pub fn kappa(&self, epsilon: f64, k: usize, n: usize, representation: Representation, scaled: bool) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.epsilon == epsilon && r.k == k && r.n == n && r.representation == representation && r.scaled == scaled)
            .and_then(|r| r.kappa.map(|c| c.value))
    }

    pub fn file_name(&self) -> String {
        format!("conditioning_{}_{}.csv", self.problem, self.method.name().to_lowercase())
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["method", "epsilon", "k", "n", "matrix", "scaled", "dim", "kappa", "sigma_max", "sigma_min", "estimator", "converged", "status"])?;
        for r in &self.rows {
            let (kappa, smax, smin, est, conv) = match r.kappa {
                Some(c) => (
                    format!("{:.6e}", c.value),
                    format!("{:.6e}", c.sigma_max),
                    format!("{:.6e}", c.sigma_min),
                    match c.method {
                        CondMethod::Dense => "dense",
                        CondMethod::Iterative => "iterative",
                    }
                    .to_string(),
                    c.converged.to_string(),
                ),
                None => Default::default(),
            };
            out.write_record([
                self.method.name().to_string(),
                format!("{:e}", r.epsilon),
                r.k.to_string(),
                r.n.to_string(),
                r.representation.name().to_string(),
                r.scaled.to_string(),
                r.dim.to_string(),
                kappa,
                smax,
                smin,
                est,
                conv,
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

fn level_rows(config: &RunConfig, method: Method, epsilon: f64, k: usize, n: usize) -> Result<Vec<CondRow>, HarnessError> {
    let problem = config.build_problem(epsilon)?;
    let mesh = config.build_mesh(n, &problem)?;
    let assembly = assemble(&mesh, &problem, &method.config(k))?;
    let mut rows = Vec::new();
    for representation in [Representation::AllFaces, Representation::Interior] {
        for &scaled in config.scaling.variants() {
            let matrix = match (representation, scaled) {
                (Representation::AllFaces, s) => crate::hdg::all_face_matrix(&mesh, &assembly.condensed, &assembly.dofs, s.then_some(assembly.face_weights.as_slice())),
                (Representation::Interior, false) => assembly.system.matrix.clone(),
                (Representation::Interior, true) => {
                    let d = scaling_weights(&assembly.dofs, &assembly.face_weights);
                    assembly.system.matrix.scaled_inverse(&d, &d)
                }
            };
            let (kappa, status) = match cond2(&matrix) {
                Ok(c) if c.converged => (Some(c), "ok".to_string()),
                Ok(c) => (Some(c), "estimate not converged".to_string()),
                Err(e) => (None, format!("failed: {e}")),
            };
            rows.push(CondRow { epsilon, k, n, representation, scaled, dim: matrix.nrows(), kappa, status });
        }
    }
    Ok(rows)
}

/// Condition numbers of the trace operator per (epsilon, k, n), one table per
/// method. Both matrix representations are reported for every scaling
/// variant requested.
pub fn run_conditioning(config: &RunConfig) -> Result<Vec<ConditioningTable>, HarnessError> {
    config.validate()?;
    for &eps in &config.epsilons {
        config.build_problem(eps)?;
    }
    let mut tables = Vec::new();
    for &method in &config.methods {
        let jobs: Vec<(f64, usize, usize)> = config
            .epsilons
            .iter()
            .flat_map(|&e| config.ks.iter().flat_map(move |&k| config.levels.iter().map(move |&n| (e, k, n))))
            .collect();
        let results: Vec<_> = jobs.par_iter().map(|&(e, k, n)| level_rows(config, method, e, k, n)).collect();
        let mut rows = Vec::new();
        for (r, &(epsilon, k, n)) in results.into_iter().zip(&jobs) {
            match r {
                Ok(rs) => rows.extend(rs),
                Err(e) => rows.push(CondRow {
                    epsilon,
                    k,
                    n,
                    representation: Representation::AllFaces,
                    scaled: false,
                    dim: 0,
                    kappa: None,
                    status: format!("failed: {e}"),
                }),
            }
        }
        tables.push(ConditioningTable { problem: config.problem_name(), method, rows });
    }
    Ok(tables)
}
