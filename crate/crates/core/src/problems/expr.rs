use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ExactSolution, ProblemError, ProblemSpec, VelocityField};

thread_local! {
    static BUILTINS: meval::Context<'static> = meval::Context::new();
}

/// Arithmetic expression in `x` and `y`, e.g. `sin(pi*x)*exp(-y)`.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    source: String,
    expr: meval::Expr,
}

impl CompiledExpr {
    pub fn parse(source: &str) -> Result<Self, ProblemError> {
        let err = |message: String| ProblemError::Expression { expr: source.to_string(), message };
        let expr: meval::Expr = source.parse().map_err(|e: meval::Error| err(e.to_string()))?;
        let compiled = Self { source: source.to_string(), expr };
        // Catches unknown variables and functions up front.
        compiled.try_eval([0.5, 0.5]).map_err(err)?;
        Ok(compiled)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    fn try_eval(&self, p: [f64; 2]) -> Result<f64, String> {
        BUILTINS.with(|ctx| {
            self.expr
                .eval_with_context(([("x", p[0]), ("y", p[1])], ctx))
                .map_err(|e| e.to_string())
        })
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.try_eval(p).unwrap_or(f64::NAN)
    }
}

const FD_STEP: f64 = 1e-5;

fn central_gradient(f: &CompiledExpr, p: [f64; 2]) -> [f64; 2] {
    let h = FD_STEP;
    [
        (f.eval([p[0] + h, p[1]]) - f.eval([p[0] - h, p[1]])) / (2.0 * h),
        (f.eval([p[0], p[1] + h]) - f.eval([p[0], p[1] - h])) / (2.0 * h),
    ]
}

/// Problem defined by expression strings. Divergence of `beta` and the
/// gradient of an exact solution are taken by central differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomProblem {
    #[serde(default = "default_name")]
    pub name: String,
    pub beta: [String; 2],
    #[serde(default = "zero_expr")]
    pub source: String,
    #[serde(default = "zero_expr")]
    pub dirichlet: String,
    #[serde(default)]
    pub exact: Option<String>,
}

fn default_name() -> String {
    "custom".into()
}

fn zero_expr() -> String {
    "0".into()
}

impl CustomProblem {
    pub fn build(&self, epsilon: f64) -> Result<ProblemSpec, ProblemError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(ProblemError::BadEpsilon(epsilon));
        }
        let bx = Arc::new(CompiledExpr::parse(&self.beta[0])?);
        let by = Arc::new(CompiledExpr::parse(&self.beta[1])?);
        let f = Arc::new(CompiledExpr::parse(&self.source)?);
        let g = Arc::new(CompiledExpr::parse(&self.dirichlet)?);
        let constant = |e: &CompiledExpr| e.source().parse::<f64>().is_ok();
        let beta = if constant(&bx) && constant(&by) {
            VelocityField::Constant([bx.eval([0.0, 0.0]), by.eval([0.0, 0.0])])
        } else {
            let (vx, vy) = (bx.clone(), by.clone());
            VelocityField::Custom {
                value: Arc::new(move |p| [vx.eval(p), vy.eval(p)]),
                div: Arc::new(move |p| central_gradient(&bx, p)[0] + central_gradient(&by, p)[1]),
                piecewise_constant: false,
            }
        };
        let exact = match &self.exact {
            None => None,
            Some(src) => {
                let u = Arc::new(CompiledExpr::parse(src)?);
                let ug = u.clone();
                Some(ExactSolution { u: Arc::new(move |p| u.eval(p)), grad: Arc::new(move |p| central_gradient(&ug, p)) })
            }
        };
        Ok(ProblemSpec {
            name: self.name.clone(),
            epsilon,
            beta,
            source: Arc::new(move |p| f.eval(p)),
            dirichlet: Arc::new(move |p| g.eval(p)),
            exact,
            slit: None,
        })
    }
}
