use super::{face_basis, gauss_legendre, triangle_quadrature, BasisError, QuadratureRule, ScalarBasis};

/// Reference coordinates of local face `i` at its own parameter `t`, running
/// from vertex `i` to vertex `i+1`.
pub fn face_reference_point(local: usize, t: f64) -> [f64; 2] {
    match local {
        0 => [t, 0.0],
        1 => [1.0 - t, t],
        2 => [0.0, 1.0 - t],
        _ => panic!("local face index {local} out of range"),
    }
}

/// Basis values tabulated at the element and face quadrature points.
///
/// Face tables are indexed `[local face][flipped]` and ordered by the
/// global face parameter `s`, so both neighbours of a face visit the same
/// physical points in the same order.
#[derive(Debug, Clone)]
pub struct ReferenceTables {
    pub k: usize,
    pub basis: ScalarBasis,
    pub quad: QuadratureRule,
    /// `phi[q][i]` at element point `q`.
    pub phi: Vec<Vec<f64>>,
    /// Reference gradients.
    pub dphi: Vec<Vec<[f64; 2]>>,
    pub face_s: Vec<f64>,
    /// Weights on `[0, 1]`, summing to 1.
    pub face_w: Vec<f64>,
    /// `mu[q][m]` face basis at `face_s[q]`.
    pub mu: Vec<Vec<f64>>,
    pub face_xi: [[Vec<[f64; 2]>; 2]; 3],
    pub face_phi: [[Vec<Vec<f64>>; 2]; 3],
    pub face_dphi: [[Vec<Vec<[f64; 2]>>; 2]; 3],
}

impl ReferenceTables {
    pub fn new(k: usize, element_degree: usize, face_points: usize) -> Result<Self, BasisError> {
        let basis = ScalarBasis::new(k);
        let quad = triangle_quadrature(element_degree)?;
        let phi = quad.points.iter().map(|p| basis.eval(*p)).collect();
        let dphi = quad.points.iter().map(|p| basis.grad(*p)).collect();
        let (face_s, face_w) = gauss_legendre(face_points);
        let mu = face_s.iter().map(|&s| face_basis(k, s)).collect();
        let face_xi: [[Vec<[f64; 2]>; 2]; 3] = std::array::from_fn(|i| {
            std::array::from_fn(|o| {
                face_s
                    .iter()
                    .map(|&s| face_reference_point(i, if o == 1 { 1.0 - s } else { s }))
                    .collect()
            })
        });
        let face_phi = std::array::from_fn(|i| std::array::from_fn(|o| face_xi[i][o].iter().map(|p| basis.eval(*p)).collect()));
        let face_dphi = std::array::from_fn(|i| std::array::from_fn(|o| face_xi[i][o].iter().map(|p| basis.grad(*p)).collect()));
        Ok(Self { k, basis, quad, phi, dphi, face_s, face_w, mu, face_xi, face_phi, face_dphi })
    }

    /// Element rule of degree `2k+4` and `k+3` Gauss points per face.
    pub fn for_solver(k: usize) -> Result<Self, BasisError> {
        Self::new(k, 2 * k + 4, k + 3)
    }

    pub fn n_scalar(&self) -> usize {
        self.basis.dim()
    }

    pub fn n_face(&self) -> usize {
        self.k + 1
    }
}
