//! Hybridized discretization: element solvers, static condensation and the
//! global trace system.

mod condense;
mod flux;
mod global;
mod local;
mod mhdg;
mod solve;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use condense::{condense, CondensedElement};
pub use flux::{element_flux_moments, numerical_flux_at};
pub use global::{all_face_matrix, assemble_trace_system, dirichlet_values, face_weights, scaling_weights, DofMap, TraceSystem};
pub use local::{assemble_local, ElementSetup, LocalMatrices};
pub use mhdg::{mhdg_equivalence, MhdgReport, MHDG_TOLERANCE};
pub use solve::{assemble, solve_hdg, HdgAssembly, HdgSolution};

pub(crate) use local::PointBasis;

use crate::basis::{BasisError, VectorSpace};
use crate::linalg::LinalgError;
use crate::problems::{Stabilization, TauReport};

#[derive(Debug, Error)]
pub enum HdgError {
    #[error("stabilization violates the positivity condition on {} faces", .0.negative.len() + .0.no_strict_face.len())]
    Stabilization(Box<TauReport>),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("local solver on element {element}: {source}")]
    Element { element: usize, source: LinalgError },
    #[error("trace system: {0}")]
    Linalg(#[from] LinalgError),
}

/// Discretization choices for one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HdgConfig {
    pub k: usize,
    pub space: VectorSpace,
    pub stabilization: Stabilization,
    /// Solve the diagonally scaled trace system.
    #[serde(default)]
    pub scaled: bool,
}

/// Named combinations of flux space and stabilization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// `P_k` fluxes with `tau = max(sup beta.n, 0)`.
    Hdg1,
    /// `P_k` fluxes with the diffusion-augmented `tau`.
    Hdg2,
    /// Enriched fluxes with `tau = max(sup beta.n, 0)`.
    Hdg3,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Hdg1, Method::Hdg2, Method::Hdg3];

    pub fn config(self, k: usize) -> HdgConfig {
        let (space, stabilization) = match self {
            Method::Hdg1 => (VectorSpace::Pk, Stabilization::Tau1),
            Method::Hdg2 => (VectorSpace::Pk, Stabilization::tau2_default()),
            Method::Hdg3 => (VectorSpace::RtEnriched, Stabilization::Tau1),
        };
        HdgConfig { k, space, stabilization, scaled: false }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Hdg1 => "HDG1",
            Method::Hdg2 => "HDG2",
            Method::Hdg3 => "HDG3",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hdg1" => Ok(Method::Hdg1),
            "hdg2" => Ok(Method::Hdg2),
            "hdg3" => Ok(Method::Hdg3),
            _ => Err(format!("unknown method {s:?}, expected HDG1, HDG2 or HDG3")),
        }
    }
}
