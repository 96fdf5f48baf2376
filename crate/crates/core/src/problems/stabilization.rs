use serde::{Deserialize, Serialize};

use super::VelocityField;
use crate::mesh::{face_sup, Mesh};

/// Length used in the diffusive part of [`Stabilization::Tau2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LengthScale {
    /// Face length.
    Face,
    /// `|K|^{1/2}`.
    #[default]
    Element,
}

/// Rule producing the constant `tau` on each (element, face) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stabilization {
    /// `max(sup_F beta.n, 0)`.
    Tau1,
    /// `max(sup_F beta.n, 0) + min(rho0 eps / h, 1)`.
    Tau2 { rho0: f64, length: LengthScale },
    /// `sup_F |beta.n|`.
    Abs,
    Constant { c: f64 },
}

impl Stabilization {
    pub fn tau2_default() -> Self {
        Stabilization::Tau2 { rho0: 0.1, length: LengthScale::Element }
    }
}

/// Minimum of `g` over `[a, b]` sampled like [`face_sup`].
pub fn face_inf(a: [f64; 2], b: [f64; 2], g: impl Fn([f64; 2]) -> f64) -> f64 {
    -face_sup(a, b, |x| -g(x))
}

/// `tau` on the face `[a, b]` of an element with outward normal `n`.
#[allow(clippy::too_many_arguments)]
pub fn tau_eval(stab: &Stabilization, beta: &VelocityField, a: [f64; 2], b: [f64; 2], n: [f64; 2], h_k: f64, h_f: f64, epsilon: f64) -> f64 {
    let sup_bn = || face_sup(a, b, |x| beta.normal_component(x, n));
    let tau = match *stab {
        Stabilization::Tau1 => sup_bn().max(0.0),
        Stabilization::Tau2 { rho0, length } => {
            let h = match length {
                LengthScale::Face => h_f,
                LengthScale::Element => h_k,
            };
            sup_bn().max(0.0) + (rho0 * epsilon / h).min(1.0)
        }
        Stabilization::Abs => face_sup(a, b, |x| beta.normal_component(x, n).abs()),
        Stabilization::Constant { c } => c,
    };
    debug_assert!(tau >= 0.0, "negative stabilization {tau}");
    tau
}

/// `tau` on the three local faces of element `e`.
pub fn element_taus(mesh: &Mesh, e: usize, stab: &Stabilization, beta: &VelocityField, epsilon: f64) -> [f64; 3] {
    let geo = mesh.triangle(e);
    std::array::from_fn(|i| {
        let [a, b] = geo.face_endpoints(i);
        tau_eval(stab, beta, a, b, geo.outward_normal(i), geo.h, geo.face_length(i), epsilon)
    })
}

/// Local face with the largest `tau`; lowest index wins ties.
pub fn select_face_star(taus: &[f64; 3]) -> usize {
    (1..3).fold(0, |s, i| if taus[i] > taus[s] { i } else { s })
}

/// Local face with the largest `inf_F (tau - beta.n / 2)`; lowest index wins
/// ties.
pub fn select_face_s(mesh: &Mesh, e: usize, taus: &[f64; 3], beta: &VelocityField) -> usize {
    let geo = mesh.triangle(e);
    let vals: [f64; 3] = std::array::from_fn(|i| {
        let [a, b] = geo.face_endpoints(i);
        let n = geo.outward_normal(i);
        face_inf(a, b, |x| taus[i] - 0.5 * beta.normal_component(x, n))
    });
    (1..3).fold(0, |s, i| if vals[i] > vals[s] { i } else { s })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauViolation {
    pub element: usize,
    pub local_face: usize,
    /// `inf_F (tau - beta.n / 2)`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauReport {
    pub pass: bool,
    /// Faces where `inf_F (tau - beta.n / 2) < 0`.
    pub negative: Vec<TauViolation>,
    /// Elements with no face where the inequality is strict.
    pub no_strict_face: Vec<usize>,
}

/// Checks `inf_F (tau - beta.n / 2) >= 0` on every face of every element with
/// strict inequality on at least one face per element.
pub fn validate_tau(mesh: &Mesh, stab: &Stabilization, beta: &VelocityField, epsilon: f64) -> TauReport {
    let mut negative = Vec::new();
    let mut no_strict_face = Vec::new();
    for e in 0..mesh.n_elements() {
        let geo = mesh.triangle(e);
        let taus = element_taus(mesh, e, stab, beta, epsilon);
        let mut strict = false;
        for i in 0..3 {
            let [a, b] = geo.face_endpoints(i);
            let n = geo.outward_normal(i);
            let scale = face_sup(a, b, |x| beta.normal_component(x, n).abs()) + taus[i] + f64::MIN_POSITIVE;
            let tol = 1e-12 * scale;
            let value = face_inf(a, b, |x| taus[i] - 0.5 * beta.normal_component(x, n));
            if value < -tol {
                negative.push(TauViolation { element: e, local_face: i, value });
            }
            if value > tol {
                strict = true;
            }
        }
        if !strict {
            no_strict_face.push(e);
        }
    }
    TauReport { pass: negative.is_empty() && no_strict_face.is_empty(), negative, no_strict_face }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{structured_unit_square, Diagonal};

    const B12: VelocityField = VelocityField::Constant([1.0, 2.0]);

    fn tau_at(stab: Stabilization, n: [f64; 2], eps: f64, h: f64) -> f64 {
        tau_eval(&stab, &B12, [0.0, 0.0], [h, 0.0], n, h, h, eps)
    }

    #[test]
    fn formula_examples() {
        assert_eq!(tau_at(Stabilization::Tau1, [0.0, 1.0], 1.0, 0.1), 2.0);
        assert_eq!(tau_at(Stabilization::Tau1, [0.0, -1.0], 1.0, 0.1), 0.0);
        let t = tau_at(Stabilization::tau2_default(), [1.0, 0.0], 1e-3, 0.1);
        assert!((t - 1.001).abs() < 1e-15);
        assert_eq!(tau_at(Stabilization::Abs, [0.0, -1.0], 1.0, 0.1), 2.0);
    }

    #[test]
    fn tau1_passes_and_zero_fails() {
        let m = structured_unit_square(4, Diagonal::NE).unwrap();
        assert!(validate_tau(&m, &Stabilization::Tau1, &B12, 1.0).pass);
        let r = validate_tau(&m, &Stabilization::Constant { c: 0.0 }, &B12, 1.0);
        assert!(!r.pass && !r.negative.is_empty());
        assert!(validate_tau(&m, &Stabilization::tau2_default(), &VelocityField::Constant([1.0, 1.0]), 1e-9).pass);
    }

    #[test]
    fn tie_break_is_lowest_index() {
        assert_eq!(select_face_star(&[1.0, 1.0, 0.5]), 0);
        assert_eq!(select_face_star(&[0.0, 2.0, 2.0]), 1);
    }
}
