use faer::Mat;

use super::{norm2, DenseMatrix, LinalgError, SparseRowMatrix};

/// Matrices up to this dimension get an exact SVD-based condition number.
pub const DENSE_SVD_LIMIT: usize = 2000;

const ITER_TOL: f64 = 1e-6;
const ITER_MAX: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CondMethod {
    Dense,
    Iterative,
}

/// Spectral condition number together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CondEstimate {
    pub value: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub method: CondMethod,
    /// False when an iterative estimate stopped at the iteration cap.
    pub converged: bool,
}

/// 2-norm condition number of a dense matrix from its singular values.
pub fn cond2_dense(a: &DenseMatrix) -> Result<CondEstimate, LinalgError> {
    let m = Mat::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)]);
    let sv = m
        .singular_values()
        .map_err(|e| LinalgError::Factorization(format!("svd: {e:?}")))?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    let value = if smin > 0.0 && smin > smax * f64::EPSILON * 1e-2 { smax / smin } else { f64::INFINITY };
    Ok(CondEstimate { value, sigma_max: smax, sigma_min: smin, method: CondMethod::Dense, converged: true })
}

fn start_vector(n: usize) -> Vec<f64> {
    // Deterministic, not aligned with any coordinate direction.
    let v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).fract()).collect();
    let s = norm2(&v);
    v.into_iter().map(|x| x / s).collect()
}

/// Runs power iteration with operator `op`, returning the dominant
/// eigenvalue estimate and whether it converged.
fn power_iterate(n: usize, mut op: impl FnMut(&[f64]) -> Result<Vec<f64>, LinalgError>) -> Result<(f64, bool), LinalgError> {
    let mut x = start_vector(n);
    let mut lambda = 0.0;
    for _ in 0..ITER_MAX {
        let y = op(&x)?;
        let next = super::dot(&x, &y);
        let ny = norm2(&y);
        if ny == 0.0 {
            return Ok((0.0, true));
        }
        x = y.into_iter().map(|v| v / ny).collect();
        if (next - lambda).abs() <= ITER_TOL * next.abs() {
            return Ok((next, true));
        }
        lambda = next;
    }
    Ok((lambda, false))
}

/// Condition number estimate for a large sparse matrix: power iteration on
/// `A^T A` for the largest singular value and inverse iteration through the
/// sparse LU factors for the smallest.
pub fn cond2_sparse(a: &SparseRowMatrix) -> Result<CondEstimate, LinalgError> {
    let n = a.nrows();
    let (lmax, c1) = power_iterate(n, |x| Ok(a.matvec_transpose(&a.matvec(x))))?;
    let lu = match a.lu() {
        Ok(lu) => lu,
        Err(_) => {
            return Ok(CondEstimate {
                value: f64::INFINITY,
                sigma_max: lmax.sqrt(),
                sigma_min: 0.0,
                method: CondMethod::Iterative,
                converged: c1,
            })
        }
    };
    let inv = power_iterate(n, |x| {
        let y = lu.solve_transpose(x)?;
        lu.solve(&y)
    });
    let (linv, c2) = match inv {
        Ok(v) => v,
        Err(LinalgError::Singular { .. }) => (f64::INFINITY, true),
        Err(e) => return Err(e),
    };
    let smax = lmax.sqrt();
    let smin = if linv.is_finite() && linv > 0.0 { 1.0 / linv.sqrt() } else { 0.0 };
    let value = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok(CondEstimate { value, sigma_max: smax, sigma_min: smin, method: CondMethod::Iterative, converged: c1 && c2 })
}

/// Picks the dense SVD for dimensions up to [`DENSE_SVD_LIMIT`] and the
/// iterative estimate beyond.
pub fn cond2(a: &SparseRowMatrix) -> Result<CondEstimate, LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    if a.nrows() <= DENSE_SVD_LIMIT {
        cond2_dense(&a.to_dense())
    } else {
        cond2_sparse(a)
    }
}
