/// Values of the face basis `sqrt(2j+1) P_j(2s-1)`, `j = 0..=k`, at `s`.
///
/// Orthonormal on `[0, 1]`, so on a face of length `|F|` the mass matrix is
/// `|F| I`.
pub fn face_basis_into(k: usize, s: f64, out: &mut [f64]) {
    let z = 2.0 * s - 1.0;
    let (mut p0, mut p1) = (1.0, z);
    out[0] = 1.0;
    if k >= 1 {
        out[1] = 3f64.sqrt() * z;
    }
    for j in 2..=k {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        out[j] = ((2 * j + 1) as f64).sqrt() * p2;
        p0 = p1;
        p1 = p2;
    }
}

pub fn face_basis(k: usize, s: f64) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    face_basis_into(k, s, &mut out);
    out
}
