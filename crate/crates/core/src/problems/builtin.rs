use std::f64::consts::PI;
use std::sync::Arc;

use super::{ExactSolution, ProblemError, ProblemSpec, Slit, VelocityField};

pub const BUILTIN_NAMES: [&str; 4] = ["smooth", "rotating", "interior_layer", "boundary_layer"];

fn check_epsilon(eps: f64) -> Result<(), ProblemError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(ProblemError::BadEpsilon(eps))
    }
}

pub fn builtin_problem(name: &str, epsilon: f64) -> Result<ProblemSpec, ProblemError> {
    match name {
        "smooth" => smooth(epsilon),
        "rotating" => rotating(epsilon),
        "interior_layer" => interior_layer(epsilon),
        "boundary_layer" => boundary_layer(epsilon),
        other => Err(ProblemError::UnknownProblem(other.to_string())),
    }
}

/// `u = sin(2 pi x) sin(2 pi y)` with `beta = (1, 2)`.
pub fn smooth(epsilon: f64) -> Result<ProblemSpec, ProblemError> {
    smooth_with_beta(epsilon, [1.0, 2.0])
}

/// `u = sin(2 pi x) sin(2 pi y)` with an arbitrary constant velocity.
pub fn smooth_with_beta(epsilon: f64, beta: [f64; 2]) -> Result<ProblemSpec, ProblemError> {
    check_epsilon(epsilon)?;
    let tp = 2.0 * PI;
    let u = Arc::new(move |x: [f64; 2]| (tp * x[0]).sin() * (tp * x[1]).sin());
    let grad = Arc::new(move |x: [f64; 2]| {
        let (sx, cx) = (tp * x[0]).sin_cos();
        let (sy, cy) = (tp * x[1]).sin_cos();
        [tp * cx * sy, tp * sx * cy]
    });
    let source = Arc::new(move |x: [f64; 2]| {
        let (sx, cx) = (tp * x[0]).sin_cos();
        let (sy, cy) = (tp * x[1]).sin_cos();
        2.0 * tp * tp * epsilon * sx * sy + beta[0] * tp * cx * sy + beta[1] * tp * sx * cy
    });
    Ok(ProblemSpec {
        name: "smooth".into(),
        epsilon,
        beta: VelocityField::Constant(beta),
        source,
        dirichlet: u.clone(),
        exact: Some(ExactSolution { u, grad }),
        slit: None,
    })
}

/// Rotating flow around the center with data `sin^2(2 pi y)` prescribed on
/// the slit `{1/2} x [0, 1/2]` and zero on the outer boundary.
pub fn rotating(epsilon: f64) -> Result<ProblemSpec, ProblemError> {
    check_epsilon(epsilon)?;
    Ok(ProblemSpec {
        name: "rotating".into(),
        epsilon,
        beta: VelocityField::Rotating,
        source: Arc::new(|_| 0.0),
        dirichlet: Arc::new(|_| 0.0),
        exact: None,
        slit: Some(Slit {
            from: [0.5, 0.0],
            to: [0.5, 0.5],
            value: Arc::new(|x| (2.0 * PI * x[1]).sin().powi(2)),
        }),
    })
}

/// Transport at 60 degrees with data 1 on the bottom edge and on the lower
/// fifth of the left edge, 0 elsewhere.
pub fn interior_layer(epsilon: f64) -> Result<ProblemSpec, ProblemError> {
    check_epsilon(epsilon)?;
    let tol = 1e-12;
    Ok(ProblemSpec {
        name: "interior_layer".into(),
        epsilon,
        beta: VelocityField::Constant([0.5, 3f64.sqrt() / 2.0]),
        source: Arc::new(|_| 0.0),
        dirichlet: Arc::new(move |x| {
            if x[1] <= tol || (x[0] <= tol && x[1] <= 0.2) {
                1.0
            } else {
                0.0
            }
        }),
        exact: None,
        slit: None,
    })
}

/// Solution with outflow layers along `x = 1` and `y = 1`, `beta = (1, 1)`.
pub fn boundary_layer(epsilon: f64) -> Result<ProblemSpec, ProblemError> {
    check_epsilon(epsilon)?;
    let hp = PI / 2.0;
    let d = -(-1.0 / epsilon).exp_m1();
    let e_inf = (-1.0 / epsilon).exp();
    let layer = move |x: [f64; 2]| (-(1.0 - x[0]) * (1.0 - x[1]) / epsilon).exp();
    let u = Arc::new(move |x: [f64; 2]| {
        let (a, b) = ((hp * x[0]).sin(), (hp * x[1]).sin());
        a + b * (1.0 - a) + (e_inf - layer(x)) / d
    });
    let grad = Arc::new(move |x: [f64; 2]| {
        let (a, ca) = (hp * x[0]).sin_cos();
        let (b, cb) = (hp * x[1]).sin_cos();
        let e = layer(x) / (epsilon * d);
        [hp * ca * (1.0 - b) - e * (1.0 - x[1]), hp * cb * (1.0 - a) - e * (1.0 - x[0])]
    });
    let source = Arc::new(move |x: [f64; 2]| {
        let (a, ca) = (hp * x[0]).sin_cos();
        let (b, cb) = (hp * x[1]).sin_cos();
        let (a1, b1) = (hp * ca, hp * cb);
        let (a2, b2) = (-hp * hp * a, -hp * hp * b);
        let (sx, sy) = (1.0 - x[0], 1.0 - x[1]);
        let e = layer(x) / (epsilon * d);
        -epsilon * (a2 * (1.0 - b) + b2 * (1.0 - a)) + a1 * (1.0 - b) + b1 * (1.0 - a) + e * (sx * sx + sy * sy - (sx + sy))
    });
    Ok(ProblemSpec {
        name: "boundary_layer".into(),
        epsilon,
        beta: VelocityField::Constant([1.0, 1.0]),
        source,
        dirichlet: u.clone(),
        exact: Some(ExactSolution { u, grad }),
        slit: None,
    })
}
