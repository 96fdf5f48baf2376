use super::local::LocalMatrices;
use crate::linalg::{DenseMatrix, LinalgError};

/// Element contribution after eliminating `(q, u)`.
///
/// `s` and `g` give the element part of the trace equation
/// `s lambda_K = g`, rows and columns ordered face by face. The local
/// solution is recovered as `z = x_lambda lambda_K + x_f`.
#[derive(Debug, Clone)]
pub struct CondensedElement {
    pub s: DenseMatrix,
    pub g: Vec<f64>,
    pub x_lambda: DenseMatrix,
    pub x_f: Vec<f64>,
}

impl CondensedElement {
    /// Local `[q; u]` coefficients for the given element trace values.
    pub fn recover(&self, lambda: &[f64]) -> Vec<f64> {
        let mut z = self.x_lambda.matvec(lambda);
        for (zi, fi) in z.iter_mut().zip(&self.x_f) {
            *zi += fi;
        }
        z
    }
}

pub fn condense(lm: &LocalMatrices) -> Result<CondensedElement, LinalgError> {
    let (nv, n, nl) = (lm.nv, lm.n(), lm.nl);
    let lu = lm.a.lu()?;
    let rhs = DenseMatrix::from_fn(n, nl + 1, |i, j| if j < nl { lm.e[(i, j)] } else { lm.load[i] });
    let x = lu.solve_matrix(&rhs);
    if !x.is_finite() {
        return Err(LinalgError::Factorization("non-finite local solution".into()));
    }

    // Trace flux operator applied to the local solution maps.
    let mut s = DenseMatrix::zeros(nl, nl);
    let mut g = vec![0.0; nl];
    for c in 0..nl {
        for col in 0..=nl {
            let mut acc = 0.0;
            for i in 0..nv {
                acc += lm.cq[(c, i)] * x[(i, col)];
            }
            for i in 0..lm.nw {
                acc += lm.cu[(c, i)] * x[(nv + i, col)];
            }
            if col < nl {
                s[(c, col)] = -acc;
            } else {
                g[c] = acc;
            }
        }
        s[(c, c)] += lm.t_diag[c];
    }

    Ok(CondensedElement {
        s,
        g,
        x_lambda: x.block(0, 0, n, nl),
        x_f: x.column(nl),
    })
}
