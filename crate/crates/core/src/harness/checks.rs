use serde::Serialize;

use super::{HarnessError, RunConfig};
use crate::basis::VectorSpace;
use crate::hdg::{mhdg_equivalence, solve_hdg, HdgConfig, HdgError};
use crate::mesh::check_mesh_assumption;
use crate::post::identity_residuals;
use crate::problems::{validate_tau, Stabilization};

/// Largest mesh on which the dense MH-DG comparison is run.
const MHDG_MAX_ELEMENTS: usize = 128;

pub const CONSERVATION_TOL: f64 = 1e-10;
pub const ENERGY_TOL: f64 = 1e-10;
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    /// Informational checks do not count towards the aggregate.
    pub required: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChecksReport {
    pub outcomes: Vec<CheckOutcome>,
    pub all_pass: bool,
}

impl ChecksReport {
    pub fn find(&self, prefix: &str) -> impl Iterator<Item = &CheckOutcome> {
        let prefix = prefix.to_string();
        self.outcomes.iter().filter(move |o| o.name.starts_with(&prefix))
    }
}

/// Runs the stabilization validator, the mesh-assumption checker, the MH-DG
/// comparison and the discrete identities over every configured case.
pub fn run_checks(config: &RunConfig) -> Result<ChecksReport, HarnessError> {
    config.validate()?;
    let mut out = Vec::new();
    let mut push = |name: String, pass: bool, required: bool, detail: String| out.push(CheckOutcome { name, pass, required, detail });
    for &eps in &config.epsilons {
        let problem = config.build_problem(eps)?;
        for &n in &config.levels {
            let mesh = config.build_mesh(n, &problem)?;
            let tag = format!("eps={eps:e} n={n}");

            // The validator must reject tau = 0 before any solve.
            let zero = Stabilization::Constant { c: 0.0 };
            let rep = validate_tau(&mesh, &zero, &problem.beta, eps);
            let solve = solve_hdg(&mesh, &problem, &HdgConfig { k: 0, space: VectorSpace::Pk, stabilization: zero, scaled: false });
            let rejected = !rep.pass && matches!(solve, Err(HdgError::Stabilization(_)));
            push(format!("tau_zero_rejected {tag}"), rejected, true, format!("{} faces violate", rep.negative.len() + rep.no_strict_face.len()));

            let beta = problem.beta.clone();
            let rep = check_mesh_assumption(&mesh, &move |x| beta.eval(x), 1.0);
            push(format!("mesh_assumption {tag}"), rep.pass, false, format!("{} violations with C=1", rep.violations.len()));

            for &k in &config.ks {
                if problem.beta.is_piecewise_constant() && mesh.n_elements() <= MHDG_MAX_ELEMENTS {
                    for (space, expect) in [(VectorSpace::RtEnriched, true), (VectorSpace::Pk, false)] {
                        let r = mhdg_equivalence(&mesh, &problem, k, space)?;
                        push(
                            format!("mhdg_{} {tag} k={k}", if expect { "equivalent" } else { "differs" }),
                            r.equivalent == expect,
                            true,
                            format!("matrix {:.3e}, rhs {:.3e}, space {space:?}", r.matrix_diff, r.rhs_diff),
                        );
                    }
                }
                for &method in &config.methods {
                    let hc = method.config(k);
                    let rep = validate_tau(&mesh, &hc.stabilization, &problem.beta, eps);
                    push(format!("tau_valid {method} {tag} k={k}"), rep.pass, true, String::new());
                    if !rep.pass {
                        continue;
                    }
                    let sol = solve_hdg(&mesh, &problem, &hc)?;
                    let id = identity_residuals(&mesh, &problem, &sol)?;
                    let pass = id.conservation <= CONSERVATION_TOL && id.boundary <= BOUNDARY_TOL && id.energy.is_none_or(|v| v <= ENERGY_TOL);
                    push(
                        format!("identities {method} {tag} k={k}"),
                        pass,
                        true,
                        format!("energy {:?}, conservation {:.3e}, boundary {:.3e}", id.energy, id.conservation, id.boundary),
                    );
                }
            }
        }
    }
    let all_pass = out.iter().all(|o| o.pass || !o.required);
    Ok(ChecksReport { outcomes: out, all_pass })
}
