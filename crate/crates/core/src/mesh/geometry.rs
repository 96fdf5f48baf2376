/// Affine image of the reference triangle `(0,0), (1,0), (0,1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineTriangle {
    pub vertices: [[f64; 2]; 3],
    /// Columns are `v1 - v0` and `v2 - v0`.
    pub jac: [[f64; 2]; 2],
    pub inv_jac: [[f64; 2]; 2],
    pub det: f64,
    pub area: f64,
    /// `|K|^{1/2}`.
    pub h: f64,
    pub centroid: [f64; 2],
}

impl AffineTriangle {
    pub fn new(v: [[f64; 2]; 3]) -> Self {
        let jac = [[v[1][0] - v[0][0], v[2][0] - v[0][0]], [v[1][1] - v[0][1], v[2][1] - v[0][1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_jac = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        let area = 0.5 * det.abs();
        let centroid = [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0];
        Self { vertices: v, jac, inv_jac, det, area, h: area.sqrt(), centroid }
    }

    #[inline]
    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        let v0 = self.vertices[0];
        [
            v0[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            v0[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    #[inline]
    pub fn to_reference(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.vertices[0][0], x[1] - self.vertices[0][1]];
        [
            self.inv_jac[0][0] * d[0] + self.inv_jac[0][1] * d[1],
            self.inv_jac[1][0] * d[0] + self.inv_jac[1][1] * d[1],
        ]
    }

    /// Maps a reference gradient to physical coordinates, `J^{-T} g`.
    #[inline]
    pub fn grad_to_physical(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_jac[0][0] * g[0] + self.inv_jac[1][0] * g[1],
            self.inv_jac[0][1] * g[0] + self.inv_jac[1][1] * g[1],
        ]
    }

    /// Endpoints of local face `i`, the edge from vertex `i` to vertex `i+1`.
    pub fn face_endpoints(&self, i: usize) -> [[f64; 2]; 2] {
        [self.vertices[i], self.vertices[(i + 1) % 3]]
    }

    pub fn face_length(&self, i: usize) -> f64 {
        let [a, b] = self.face_endpoints(i);
        (b[0] - a[0]).hypot(b[1] - a[1])
    }

    /// Outward unit normal on local face `i` (vertices counterclockwise).
    pub fn outward_normal(&self, i: usize) -> [f64; 2] {
        let [a, b] = self.face_endpoints(i);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let l = dx.hypot(dy);
        let s = self.det.signum();
        [s * dy / l, -s * dx / l]
    }

    pub fn contains(&self, x: [f64; 2], tol: f64) -> bool {
        let xi = self.to_reference(x);
        xi[0] >= -tol && xi[1] >= -tol && xi[0] + xi[1] <= 1.0 + tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_geometry() {
        let t = AffineTriangle::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(t.area, 0.5);
        assert_eq!(t.outward_normal(0), [0.0, -1.0]);
        let n1 = t.outward_normal(1);
        assert!((n1[0] - 0.5f64.sqrt()).abs() < 1e-15 && (n1[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(t.outward_normal(2), [-1.0, 0.0]);
    }

    #[test]
    fn map_roundtrip() {
        let t = AffineTriangle::new([[0.2, 0.1], [0.9, 0.3], [0.4, 0.8]]);
        let x = t.map([0.25, 0.5]);
        let xi = t.to_reference(x);
        assert!((xi[0] - 0.25).abs() < 1e-14 && (xi[1] - 0.5).abs() < 1e-14);
    }
}
