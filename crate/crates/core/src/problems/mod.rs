//! Model problems `-eps Lap u + beta . grad u = f` on the unit square.

mod builtin;
mod expr;
mod stabilization;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use builtin::{boundary_layer, builtin_problem, interior_layer, rotating, smooth, smooth_with_beta, BUILTIN_NAMES};
pub use expr::{CompiledExpr, CustomProblem};
pub use stabilization::{element_taus, face_inf, select_face_s, select_face_star, tau_eval, validate_tau, LengthScale, Stabilization, TauReport, TauViolation};

pub type ScalarFn = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("unknown problem {0:?}")]
    UnknownProblem(String),
    #[error("diffusion coefficient must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("expression {expr:?}: {message}")]
    Expression { expr: String, message: String },
}

#[derive(Clone)]
pub enum VelocityField {
    Constant([f64; 2]),
    /// `(y - 1/2, 1/2 - x)`.
    Rotating,
    Custom { value: VectorFn, div: ScalarFn, piecewise_constant: bool },
}

impl fmt::Debug for VelocityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(b) => write!(f, "Constant({b:?})"),
            Self::Rotating => write!(f, "Rotating"),
            Self::Custom { piecewise_constant, .. } => write!(f, "Custom {{ piecewise_constant: {piecewise_constant} }}"),
        }
    }
}

impl VelocityField {
    #[inline]
    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        match self {
            Self::Constant(b) => *b,
            Self::Rotating => [x[1] - 0.5, 0.5 - x[0]],
            Self::Custom { value, .. } => value(x),
        }
    }

    #[inline]
    pub fn div(&self, x: [f64; 2]) -> f64 {
        match self {
            Self::Constant(_) | Self::Rotating => 0.0,
            Self::Custom { div, .. } => div(x),
        }
    }

    pub fn is_piecewise_constant(&self) -> bool {
        match self {
            Self::Constant(_) => true,
            Self::Rotating => false,
            Self::Custom { piecewise_constant, .. } => *piecewise_constant,
        }
    }

    /// `beta . n` at `x`.
    #[inline]
    pub fn normal_component(&self, x: [f64; 2], n: [f64; 2]) -> f64 {
        let b = self.eval(x);
        b[0] * n[0] + b[1] * n[1]
    }

    /// Samples an `m x m` grid of the unit square and returns the largest
    /// `div beta` and the smallest `|beta|` seen.
    pub fn sample_assumptions(&self, m: usize) -> (f64, f64) {
        let mut max_div = f64::NEG_INFINITY;
        let mut min_norm = f64::INFINITY;
        for i in 0..=m {
            for j in 0..=m {
                let x = [i as f64 / m as f64, j as f64 / m as f64];
                let b = self.eval(x);
                max_div = max_div.max(self.div(x));
                min_norm = min_norm.min(b[0].hypot(b[1]));
            }
        }
        (max_div, min_norm)
    }
}

#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarFn,
    pub grad: VectorFn,
}

/// Internal segment carrying Dirichlet data on both sides.
#[derive(Clone)]
pub struct Slit {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub value: ScalarFn,
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub epsilon: f64,
    pub beta: VelocityField,
    pub source: ScalarFn,
    /// Dirichlet data on the outer boundary.
    pub dirichlet: ScalarFn,
    pub exact: Option<ExactSolution>,
    pub slit: Option<Slit>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("epsilon", &self.epsilon)
            .field("beta", &self.beta)
            .field("has_exact", &self.exact.is_some())
            .field("has_slit", &self.slit.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// Exact flux `q = -eps grad u`, if an exact solution is known.
    pub fn exact_flux(&self, x: [f64; 2]) -> Option<[f64; 2]> {
        self.exact.as_ref().map(|e| {
            let g = (e.grad)(x);
            [-self.epsilon * g[0], -self.epsilon * g[1]]
        })
    }

    /// Largest relative mismatch between `f` and `-eps Lap u + beta . grad u`
    /// at the given points, with derivatives of `u` taken by fourth-order
    /// central differences of step `step`. Returns `None` without an exact
    /// solution.
    pub fn manufactured_residual(&self, points: &[[f64; 2]], step: f64) -> Option<f64> {
        let ex = self.exact.as_ref()?;
        let u = &ex.u;
        let d1 = |x: [f64; 2], e: [f64; 2]| {
            let p = |t: f64| u([x[0] + t * e[0], x[1] + t * e[1]]);
            (-p(2.0 * step) + 8.0 * p(step) - 8.0 * p(-step) + p(-2.0 * step)) / (12.0 * step)
        };
        let d2 = |x: [f64; 2], e: [f64; 2]| {
            let p = |t: f64| u([x[0] + t * e[0], x[1] + t * e[1]]);
            (-p(2.0 * step) + 16.0 * p(step) - 30.0 * p(0.0) + 16.0 * p(-step) - p(-2.0 * step)) / (12.0 * step * step)
        };
        let mut worst: f64 = 0.0;
        for &x in points {
            let (ex_, ey) = ([1.0, 0.0], [0.0, 1.0]);
            let b = self.beta.eval(x);
            let lap = d2(x, ex_) + d2(x, ey);
            let conv = b[0] * d1(x, ex_) + b[1] * d1(x, ey);
            let lhs = -self.epsilon * lap + conv;
            let f = (self.source)(x);
            let scale = (self.epsilon * lap).abs() + conv.abs() + f.abs() + 1e-300;
            worst = worst.max((lhs - f).abs() / scale.max(1.0));
        }
        Some(worst)
    }
}
