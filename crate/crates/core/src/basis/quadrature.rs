use super::BasisError;

/// Highest total degree for which [`triangle_quadrature`] builds a rule.
pub const MAX_TRIANGLE_DEGREE: usize = 30;

/// Gauss-Legendre rule with `n` points on `[0, 1]`, ascending. Weights sum
/// to 1 and the rule is exact to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one Gauss point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        // Newton from the i-th guess converges to the i-th largest root.
        x[n - 1 - i] = 0.5 * (z + 1.0);
        w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// `P_n(z)` and `P_n'(z)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Quadrature rule on the reference triangle `(0,0), (1,0), (0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    /// Sum to the reference area 1/2.
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn([f64; 2]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }
}

/// Collapsed-coordinate Gauss product rule exact for total degree `degree`.
pub fn triangle_quadrature(degree: usize) -> Result<QuadratureRule, BasisError> {
    if degree > MAX_TRIANGLE_DEGREE {
        return Err(BasisError::UnsupportedDegree { degree, max: MAX_TRIANGLE_DEGREE });
    }
    // The Jacobian of the collapse adds one degree in the first direction.
    let m = (degree + 2).div_ceil(2).max(1);
    let (x, w) = gauss_legendre(m);
    let mut points = Vec::with_capacity(m * m);
    let mut weights = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            points.push([x[i], x[j] * (1.0 - x[i])]);
            weights.push(w[i] * w[j] * (1.0 - x[i]));
        }
    }
    Ok(QuadratureRule { points, weights, degree })
}
