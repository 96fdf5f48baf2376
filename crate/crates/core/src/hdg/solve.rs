use rayon::prelude::*;

use super::condense::{condense, CondensedElement};
use super::global::{all_face_matrix, assemble_trace_system, dirichlet_values, face_weights, scaling_weights, DofMap, TraceSystem};
use crate::linalg::SparseRowMatrix;
use super::local::{assemble_local, ElementSetup};
use super::{HdgConfig, HdgError};
use crate::basis::{vector_dim, ReferenceTables, VectorSpace};
use crate::mesh::Mesh;
use crate::problems::{element_taus, validate_tau, ProblemSpec};

/// Everything produced before the trace solve.
#[derive(Debug, Clone)]
pub struct HdgAssembly {
    pub config: HdgConfig,
    pub tables: ReferenceTables,
    pub taus: Vec<[f64; 3]>,
    pub condensed: Vec<CondensedElement>,
    pub dofs: DofMap,
    /// Prescribed face coefficients, empty on faces with unknowns.
    pub dirichlet: Vec<Vec<f64>>,
    /// `Lambda_F` per face.
    pub face_weights: Vec<f64>,
    pub system: TraceSystem,
}

/// Discrete solution: flux and scalar coefficients per element, trace
/// coefficients per face in the face parameterization.
#[derive(Debug, Clone)]
pub struct HdgSolution {
    pub k: usize,
    pub space: VectorSpace,
    pub q: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub trace: Vec<Vec<f64>>,
    pub taus: Vec<[f64; 3]>,
    pub n_dofs: usize,
}

impl HdgSolution {
    /// Trace coefficients of the three faces of element `e`, concatenated.
    pub fn element_trace(&self, mesh: &Mesh, e: usize) -> Vec<f64> {
        mesh.elements[e].faces.iter().flat_map(|&f| self.trace[f].iter().copied()).collect()
    }
}

/// Builds the condensed trace system.
pub fn assemble(mesh: &Mesh, problem: &ProblemSpec, config: &HdgConfig) -> Result<HdgAssembly, HdgError> {
    let report = validate_tau(mesh, &config.stabilization, &problem.beta, problem.epsilon);
    if !report.pass {
        return Err(HdgError::Stabilization(Box::new(report)));
    }
    let tables = ReferenceTables::for_solver(config.k)?;
    let per_element: Vec<_> = (0..mesh.n_elements())
        .into_par_iter()
        .map(|e| {
            let taus = element_taus(mesh, e, &config.stabilization, &problem.beta, problem.epsilon);
            let lm = assemble_local(&ElementSetup::new(mesh, e, taus), problem, &tables, config.space);
            condense(&lm).map(|c| (taus, c)).map_err(|source| HdgError::Element { element: e, source })
        })
        .collect();
    let mut taus = Vec::with_capacity(mesh.n_elements());
    let mut condensed = Vec::with_capacity(mesh.n_elements());
    for r in per_element {
        let (t, c) = r?;
        taus.push(t);
        condensed.push(c);
    }
    let dofs = DofMap::new(mesh, problem, config.k);
    let dirichlet = dirichlet_values(mesh, problem, &dofs, config.k);
    let mut system = assemble_trace_system(mesh, &condensed, &dofs, &dirichlet);
    let face_weights = face_weights(mesh, problem);
    if config.scaled {
        system.apply_scaling(scaling_weights(&dofs, &face_weights));
    }
    Ok(HdgAssembly { config: config.clone(), tables, taus, condensed, dofs, dirichlet, face_weights, system })
}

impl HdgAssembly {
    /// Trace operator over all faces with identity rows on prescribed faces,
    /// scaled like the trace system.
    pub fn all_face_matrix(&self, mesh: &Mesh) -> SparseRowMatrix {
        let w = self.config.scaled.then_some(self.face_weights.as_slice());
        all_face_matrix(mesh, &self.condensed, &self.dofs, w)
    }

    /// Solves the trace system and recovers the element unknowns.
    pub fn solve(&self, mesh: &Mesh) -> Result<HdgSolution, HdgError> {
        let x = if self.system.dim() == 0 {
            Vec::new()
        } else {
            let lu = self.system.matrix.lu()?;
            self.system.unscale(lu.solve(&self.system.rhs)?)
        };
        self.recover(mesh, &x)
    }

    /// Recovers element unknowns from the unscaled trace unknowns `x`.
    pub fn recover(&self, mesh: &Mesh, x: &[f64]) -> Result<HdgSolution, HdgError> {
        let nf = self.dofs.per_face;
        let trace: Vec<Vec<f64>> = (0..mesh.n_faces())
            .map(|f| match self.dofs.offset(f) {
                Some(o) => x[o..o + nf].to_vec(),
                None => self.dirichlet[f].clone(),
            })
            .collect();
        let k = self.config.k;
        let nv = vector_dim(k, self.config.space);
        let (q, u): (Vec<_>, Vec<_>) = self
            .condensed
            .par_iter()
            .enumerate()
            .map(|(e, ce)| {
                let lam: Vec<f64> = mesh.elements[e].faces.iter().flat_map(|&f| trace[f].iter().copied()).collect();
                let mut z = ce.recover(&lam);
                let u = z.split_off(nv);
                (z, u)
            })
            .unzip();
        Ok(HdgSolution { k, space: self.config.space, q, u, trace, taus: self.taus.clone(), n_dofs: self.dofs.n_dofs() })
    }
}

pub fn solve_hdg(mesh: &Mesh, problem: &ProblemSpec, config: &HdgConfig) -> Result<HdgSolution, HdgError> {
    assemble(mesh, problem, config)?.solve(mesh)
}
