use super::Mesh;
use crate::basis::gauss_legendre;

/// Number of interior Gauss points used (with the endpoints) to estimate a
/// supremum over a face.
pub const SUP_SAMPLE_POINTS: usize = 5;

/// Offset of the near-endpoint samples, so that a velocity that jumps across
/// element edges is read from the face itself and not from its neighbour.
const ENDPOINT_OFFSET: f64 = 1e-10;

/// Maximum of `g` over the segment `[a, b]`, sampled at Gauss points and next
/// to the endpoints.
pub fn face_sup(a: [f64; 2], b: [f64; 2], g: impl Fn([f64; 2]) -> f64) -> f64 {
    let (s, _) = gauss_legendre(SUP_SAMPLE_POINTS);
    s.iter()
        .copied()
        .chain([ENDPOINT_OFFSET, 1.0 - ENDPOINT_OFFSET])
        .map(|t| g([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AssumptionViolation {
    pub element: usize,
    pub local_face: usize,
    pub face: usize,
    /// `max(sup_F beta.n, 0)` on the offending face.
    pub value: f64,
    /// `C h_K` for the element.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AssumptionReport {
    pub pass: bool,
    pub violations: Vec<AssumptionViolation>,
    /// Local index of the outflow face `F_K^+` of every element.
    pub outflow_face: Vec<usize>,
}

/// Checks that on every element all faces other than the one with the largest
/// outflow `sup_F beta.n` have `max(sup_F beta.n, 0) <= c h_K`.
pub fn check_mesh_assumption(mesh: &Mesh, beta: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync), c: f64) -> AssumptionReport {
    let mut violations = Vec::new();
    let mut outflow_face = Vec::with_capacity(mesh.n_elements());
    for (e, el) in mesh.elements.iter().enumerate() {
        let tri = mesh.triangle(e);
        let sups: [f64; 3] = std::array::from_fn(|i| {
            let n = tri.outward_normal(i);
            let [a, b] = tri.face_endpoints(i);
            face_sup(a, b, |x| {
                let bx = beta(x);
                bx[0] * n[0] + bx[1] * n[1]
            })
        });
        let mut star = 0;
        for i in 1..3 {
            if sups[i] > sups[star] {
                star = i;
            }
        }
        outflow_face.push(star);
        let bound = c * el.h;
        for i in (0..3).filter(|&i| i != star) {
            let value = sups[i].max(0.0);
            if value > bound {
                violations.push(AssumptionViolation { element: e, local_face: i, face: el.faces[i], value, bound });
            }
        }
    }
    AssumptionReport { pass: violations.is_empty(), violations, outflow_face }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{structured_unit_square, Diagonal};

    #[test]
    fn diagonal_flow_on_ne_mesh_passes_for_zero_constant() {
        let m = structured_unit_square(8, Diagonal::NE).unwrap();
        let r = check_mesh_assumption(&m, &|_| [1.0, 1.0], 0.0);
        assert!(r.pass, "{:?}", r.violations.first());
    }

    #[test]
    fn steep_flow_on_ne_mesh_fails() {
        let m = structured_unit_square(20, Diagonal::NE).unwrap();
        let r = check_mesh_assumption(&m, &|_| [1.0, 2.0], 1.0);
        assert!(!r.pass);
    }

    #[test]
    fn monotone_in_constant() {
        let m = structured_unit_square(4, Diagonal::NW).unwrap();
        let beta = |x: [f64; 2]| [x[1] - 0.5, 0.5 - x[0]];
        let cs = [0.0, 0.5, 1.0, 2.0, 5.0, 50.0];
        let passes: Vec<bool> = cs.iter().map(|&c| check_mesh_assumption(&m, &beta, c).pass).collect();
        for w in passes.windows(2) {
            assert!(!w[0] || w[1]);
        }
        assert!(passes[cs.len() - 1]);
    }
}
