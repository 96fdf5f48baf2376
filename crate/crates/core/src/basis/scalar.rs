use super::triangle_quadrature;

/// Number of polynomials of total degree at most `k` in two variables.
pub const fn scalar_dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

const CENTER: f64 = 1.0 / 3.0;

/// L2-orthonormal basis of `P_k` on the reference triangle.
///
/// Built by Gram-Schmidt on centroid-shifted monomials ordered by total
/// degree, so the first `scalar_dim(m)` functions span `P_m` for every
/// `m <= k`. Orthonormality is with respect to the reference measure (area
/// 1/2); on a physical element `K` the mass matrix is `2|K| I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarBasis {
    k: usize,
    exponents: Vec<(u32, u32)>,
    /// Row `i` holds the monomial coefficients of basis function `i`.
    coeffs: Vec<Vec<f64>>,
}

impl ScalarBasis {
    pub fn new(k: usize) -> Self {
        let mut exponents = Vec::with_capacity(scalar_dim(k));
        for d in 0..=k as u32 {
            for b in 0..=d {
                exponents.push((d - b, b));
            }
        }
        let n = exponents.len();
        let quad = triangle_quadrature(2 * k).expect("degree within quadrature range");
        let mut gram = vec![vec![0.0; n]; n];
        for (p, w) in quad.points.iter().zip(&quad.weights) {
            let m: Vec<f64> = exponents.iter().map(|&(a, b)| monomial(*p, a, b)).collect();
            for i in 0..n {
                for j in 0..n {
                    gram[i][j] += w * m[i] * m[j];
                }
            }
        }
        let inner = |u: &[f64], v: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                if u[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += u[i] * gram[i][j] * v[j];
                }
            }
            s
        };
        let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            for _ in 0..2 {
                for c in &coeffs {
                    let p = inner(&v, c);
                    v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
                }
            }
            let norm = inner(&v, &v).sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            coeffs.push(v);
        }
        Self { k, exponents, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Values of all basis functions at reference point `xi`.
    pub fn eval_into(&self, xi: [f64; 2], out: &mut [f64]) {
        let m: Vec<f64> = self.exponents.iter().map(|&(a, b)| monomial(xi, a, b)).collect();
        for (o, c) in out.iter_mut().zip(&self.coeffs) {
            *o = crate::linalg::dot(c, &m);
        }
    }

    pub fn eval(&self, xi: [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(xi, &mut out);
        out
    }

    /// Reference gradients of all basis functions at `xi`.
    pub fn grad_into(&self, xi: [f64; 2], out: &mut [[f64; 2]]) {
        let (x, y) = (xi[0] - CENTER, xi[1] - CENTER);
        let pw = |t: f64, e: u32| if e == 0 { 0.0 } else { e as f64 * t.powi(e as i32 - 1) };
        let dm: Vec<[f64; 2]> = self
            .exponents
            .iter()
            .map(|&(a, b)| [pw(x, a) * y.powi(b as i32), x.powi(a as i32) * pw(y, b)])
            .collect();
        for (o, c) in out.iter_mut().zip(&self.coeffs) {
            let mut g = [0.0; 2];
            for (ci, d) in c.iter().zip(&dm) {
                g[0] += ci * d[0];
                g[1] += ci * d[1];
            }
            *o = g;
        }
    }

    pub fn grad(&self, xi: [f64; 2]) -> Vec<[f64; 2]> {
        let mut out = vec![[0.0; 2]; self.dim()];
        self.grad_into(xi, &mut out);
        out
    }
}

#[inline]
fn monomial(xi: [f64; 2], a: u32, b: u32) -> f64 {
    (xi[0] - CENTER).powi(a as i32) * (xi[1] - CENTER).powi(b as i32)
}
