//! Test-side reference implementations that share no numerics with the
//! library: quadrature, a monomial basis in physical coordinates, a dense
//! elimination, and a monolithic (uncondensed) assembly of the hybridized
//! equations.

#![allow(dead_code)]

use std::sync::Arc;

use cdhdg::hdg::HdgSolution;
use cdhdg::mesh::{Diagonal, Mesh};
use cdhdg::post::FieldEvaluator;
use cdhdg::problems::{ProblemSpec, VelocityField};
use rand::Rng;

/// Gauss-Legendre nodes and weights on `[0, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            let dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                x[i] = 0.5 * (1.0 - z);
                w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
                break;
            }
        }
    }
    (x, w)
}

/// Collapsed tensor rule on the reference triangle, weights summing to 1/2.
pub fn triangle_rule(n: usize) -> Vec<([f64; 2], f64)> {
    let (x, w) = gauss01(n);
    let mut out = Vec::with_capacity(n * n);
    for (&a, &wa) in x.iter().zip(&w) {
        for (&b, &wb) in x.iter().zip(&w) {
            out.push(([a, b * (1.0 - a)], wa * wb * (1.0 - a)));
        }
    }
    out
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        assert!(a[p][c].abs() > 1e-300, "singular oracle system");
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            if m != 0.0 {
                for j in c..n {
                    a[r][j] -= m * a[c][j];
                }
                b[r] -= m * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|j| a[r][j] * x[j]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Pk,
    Rt,
}

/// Monomials `xi^i eta^j` in coordinates centred at the element centroid and
/// scaled by `sqrt(area)`.
#[derive(Debug, Clone)]
pub struct LocalBasis {
    pub k: usize,
    pub space: Space,
    center: [f64; 2],
    scale: f64,
    powers: Vec<(i32, i32)>,
}

impl LocalBasis {
    pub fn new(k: usize, space: Space, v: [[f64; 2]; 3]) -> Self {
        let center = [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0];
        let scale = area(v).sqrt();
        let mut powers = Vec::new();
        for d in 0..=k as i32 {
            for j in 0..=d {
                powers.push((d - j, j));
            }
        }
        Self { k, space, center, scale, powers }
    }

    pub fn nw(&self) -> usize {
        self.powers.len()
    }

    pub fn nv(&self) -> usize {
        2 * self.nw() + if self.space == Space::Rt { self.k + 1 } else { 0 }
    }

    fn local(&self, x: [f64; 2]) -> [f64; 2] {
        [(x[0] - self.center[0]) / self.scale, (x[1] - self.center[1]) / self.scale]
    }

    fn mono(xi: [f64; 2], p: (i32, i32)) -> f64 {
        xi[0].powi(p.0) * xi[1].powi(p.1)
    }

    fn mono_grad(&self, xi: [f64; 2], p: (i32, i32)) -> [f64; 2] {
        let dx = if p.0 > 0 { p.0 as f64 * xi[0].powi(p.0 - 1) * xi[1].powi(p.1) } else { 0.0 };
        let dy = if p.1 > 0 { p.1 as f64 * xi[0].powi(p.0) * xi[1].powi(p.1 - 1) } else { 0.0 };
        [dx / self.scale, dy / self.scale]
    }

    pub fn scalar(&self, x: [f64; 2]) -> Vec<f64> {
        let xi = self.local(x);
        self.powers.iter().map(|&p| Self::mono(xi, p)).collect()
    }

    pub fn scalar_grad(&self, x: [f64; 2]) -> Vec<[f64; 2]> {
        let xi = self.local(x);
        self.powers.iter().map(|&p| self.mono_grad(xi, p)).collect()
    }

    /// Vector basis values and divergences: `(m, 0)`, `(0, m)`, then for the
    /// enriched space `xi * m` with `m` homogeneous of degree `k`.
    pub fn vector(&self, x: [f64; 2]) -> (Vec<[f64; 2]>, Vec<f64>) {
        let xi = self.local(x);
        let mut val = Vec::with_capacity(self.nv());
        let mut div = Vec::with_capacity(self.nv());
        for &p in &self.powers {
            val.push([Self::mono(xi, p), 0.0]);
            div.push(self.mono_grad(xi, p)[0]);
        }
        for &p in &self.powers {
            val.push([0.0, Self::mono(xi, p)]);
            div.push(self.mono_grad(xi, p)[1]);
        }
        if self.space == Space::Rt {
            for &p in self.powers.iter().filter(|p| (p.0 + p.1) as usize == self.k) {
                let m = Self::mono(xi, p);
                val.push([xi[0] * m, xi[1] * m]);
                div.push((2 + p.0 + p.1) as f64 * m / self.scale);
            }
        }
        (val, div)
    }
}

pub fn area(v: [[f64; 2]; 3]) -> f64 {
    0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0])).abs()
}

fn element_vertices(mesh: &Mesh, e: usize) -> [[f64; 2]; 3] {
    mesh.elements[e].vertices.map(|v| mesh.vertices[v])
}

/// Face endpoints in the stored order and the unit normal pointing away from
/// element `e`.
fn face_geometry(mesh: &Mesh, e: usize, f: usize) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let [ia, ib] = mesh.faces[f].vertices;
    let (a, b) = (mesh.vertices[ia], mesh.vertices[ib]);
    let third = mesh.elements[e].vertices.into_iter().find(|&v| v != ia && v != ib).unwrap();
    let c = mesh.vertices[third];
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let mut n = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
    if (c[0] - a[0]) * n[0] + (c[1] - a[1]) * n[1] > 0.0 {
        n = [-n[0], -n[1]];
    }
    (a, b, n)
}

/// Oracle data: constant velocity, polynomial-friendly data, and the
/// stabilization as a function of `(beta.n, eps, |K|)`.
pub struct OracleProblem {
    pub eps: f64,
    pub beta: [f64; 2],
    pub f: Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>,
    pub g: Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>,
    pub tau: fn(f64, f64, f64) -> f64,
}

pub fn tau1(bn: f64, _eps: f64, _area: f64) -> f64 {
    bn.max(0.0)
}

pub fn tau2(bn: f64, eps: f64, area: f64) -> f64 {
    bn.max(0.0) + (0.1 * eps / area.sqrt()).min(1.0)
}

impl OracleProblem {
    pub fn spec(&self) -> ProblemSpec {
        ProblemSpec {
            name: "oracle".into(),
            epsilon: self.eps,
            beta: VelocityField::Constant(self.beta),
            source: self.f.clone(),
            dirichlet: self.g.clone(),
            exact: None,
            slit: None,
        }
    }
}

pub struct OracleSolution {
    pub k: usize,
    pub bases: Vec<LocalBasis>,
    pub q: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    /// Monomials in the face parameter `t` from the first stored vertex.
    pub lambda: Vec<Vec<f64>>,
}

impl OracleSolution {
    pub fn u_at(&self, e: usize, x: [f64; 2]) -> f64 {
        self.bases[e].scalar(x).iter().zip(&self.u[e]).map(|(a, b)| a * b).sum()
    }

    pub fn q_at(&self, e: usize, x: [f64; 2]) -> [f64; 2] {
        let (val, _) = self.bases[e].vector(x);
        let mut out = [0.0; 2];
        for (v, c) in val.iter().zip(&self.q[e]) {
            out[0] += c * v[0];
            out[1] += c * v[1];
        }
        out
    }

    pub fn lambda_at(&self, f: usize, t: f64) -> f64 {
        self.lambda[f].iter().enumerate().map(|(m, c)| c * t.powi(m as i32)).sum()
    }
}

/// Assembles and solves the full system in `(q, u, lambda)`:
///
/// `(q/eps, r) - (u, div r) + <lambda, r.n> = 0`,
/// `-(q + beta u, grad w) + <q.n + beta.n lambda + tau (u - lambda), w> = (f, w)`,
/// transmission of the same normal flux on interior faces and
/// `<lambda - g, mu> = 0` on boundary faces.
pub fn solve_monolithic(mesh: &Mesh, k: usize, space: Space, p: &OracleProblem) -> OracleSolution {
    let ne = mesh.n_elements();
    let bases: Vec<LocalBasis> = (0..ne).map(|e| LocalBasis::new(k, space, element_vertices(mesh, e))).collect();
    let (nv, nw) = (bases[0].nv(), bases[0].nw());
    let nz = nv + nw;
    let nl = k + 1;
    let n = ne * nz + mesh.n_faces() * nl;
    let mut a = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    let lam = |f: usize, m: usize| ne * nz + f * nl + m;
    let tri = triangle_rule(k + 4);
    let (gt, gw) = gauss01(k + 4);

    for e in 0..ne {
        let v = element_vertices(mesh, e);
        let ar = area(v);
        let b = &bases[e];
        let (oq, ou) = (e * nz, e * nz + nv);
        for &(xi, w) in &tri {
            let x = [
                v[0][0] + xi[0] * (v[1][0] - v[0][0]) + xi[1] * (v[2][0] - v[0][0]),
                v[0][1] + xi[0] * (v[1][1] - v[0][1]) + xi[1] * (v[2][1] - v[0][1]),
            ];
            let wj = w * 2.0 * ar;
            let (rv, rdiv) = b.vector(x);
            let phi = b.scalar(x);
            let dphi = b.scalar_grad(x);
            let fx = (p.f)(x);
            for i in 0..nv {
                for j in 0..nv {
                    a[oq + i][oq + j] += wj * (rv[i][0] * rv[j][0] + rv[i][1] * rv[j][1]) / p.eps;
                }
                for j in 0..nw {
                    a[oq + i][ou + j] -= wj * phi[j] * rdiv[i];
                }
            }
            for i in 0..nw {
                let bg = p.beta[0] * dphi[i][0] + p.beta[1] * dphi[i][1];
                for j in 0..nv {
                    a[ou + i][oq + j] -= wj * (rv[j][0] * dphi[i][0] + rv[j][1] * dphi[i][1]);
                }
                for j in 0..nw {
                    a[ou + i][ou + j] -= wj * phi[j] * bg;
                }
                rhs[ou + i] += wj * fx * phi[i];
            }
        }
        for &f in &mesh.elements[e].faces {
            let (pa, pb, nrm) = face_geometry(mesh, e, f);
            let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
            let bn = p.beta[0] * nrm[0] + p.beta[1] * nrm[1];
            let tau = (p.tau)(bn, p.eps, ar);
            let interior = mesh.faces[f].right.is_some();
            for (&t, &w) in gt.iter().zip(&gw) {
                let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
                let ws = w * len;
                let (rv, _) = b.vector(x);
                let phi = b.scalar(x);
                let mu: Vec<f64> = (0..nl).map(|m| t.powi(m as i32)).collect();
                let rn: Vec<f64> = rv.iter().map(|r| r[0] * nrm[0] + r[1] * nrm[1]).collect();
                for i in 0..nv {
                    for m in 0..nl {
                        a[oq + i][lam(f, m)] += ws * mu[m] * rn[i];
                    }
                }
                for i in 0..nw {
                    for j in 0..nv {
                        a[ou + i][oq + j] += ws * rn[j] * phi[i];
                    }
                    for j in 0..nw {
                        a[ou + i][ou + j] += ws * tau * phi[j] * phi[i];
                    }
                    for m in 0..nl {
                        a[ou + i][lam(f, m)] += ws * (bn - tau) * mu[m] * phi[i];
                    }
                }
                if interior {
                    for r in 0..nl {
                        let row = lam(f, r);
                        for j in 0..nv {
                            a[row][oq + j] += ws * rn[j] * mu[r];
                        }
                        for j in 0..nw {
                            a[row][ou + j] += ws * tau * phi[j] * mu[r];
                        }
                        for m in 0..nl {
                            a[row][lam(f, m)] += ws * (bn - tau) * mu[m] * mu[r];
                        }
                    }
                } else {
                    let gx = (p.g)(x);
                    for r in 0..nl {
                        for m in 0..nl {
                            a[lam(f, r)][lam(f, m)] += ws * mu[m] * mu[r];
                        }
                        rhs[lam(f, r)] += ws * gx * mu[r];
                    }
                }
            }
        }
    }
    let x = dense_solve(a, rhs);
    OracleSolution {
        k,
        q: (0..ne).map(|e| x[e * nz..e * nz + nv].to_vec()).collect(),
        u: (0..ne).map(|e| x[e * nz + nv..(e + 1) * nz].to_vec()).collect(),
        lambda: (0..mesh.n_faces()).map(|f| x[lam(f, 0)..lam(f, 0) + nl].to_vec()).collect(),
        bases,
    }
}

/// Largest relative differences `(q, u, lambda)` between a library solution
/// and the oracle, sampled on unisolvent point sets of every element and face.
pub fn compare(mesh: &Mesh, sol: &HdgSolution, oracle: &OracleSolution) -> [f64; 3] {
    let ev = FieldEvaluator::new(sol.k, sol.space);
    let tri = triangle_rule(sol.k + 2);
    let (gt, _) = gauss01(sol.k + 2);
    let mut diff = [0.0f64; 3];
    let mut size = [0.0f64; 3];
    for e in 0..mesh.n_elements() {
        let geo = mesh.triangle(e);
        for &(xi, _) in &tri {
            let x = geo.map(xi);
            let r = geo.to_reference(x);
            let (qa, qb) = (ev.vector(&geo, &sol.q[e], r), oracle.q_at(e, x));
            let (ua, ub) = (ev.scalar(&sol.u[e], r), oracle.u_at(e, x));
            diff[0] = diff[0].max((qa[0] - qb[0]).abs()).max((qa[1] - qb[1]).abs());
            size[0] = size[0].max(qb[0].abs()).max(qb[1].abs());
            diff[1] = diff[1].max((ua - ub).abs());
            size[1] = size[1].max(ub.abs());
        }
    }
    for f in 0..mesh.n_faces() {
        for &t in &gt {
            let a = cdhdg::basis::eval_face(&sol.trace[f], t);
            let b = oracle.lambda_at(f, t);
            diff[2] = diff[2].max((a - b).abs());
            size[2] = size[2].max(b.abs());
        }
    }
    std::array::from_fn(|i| diff[i] / size[i].max(1e-300))
}

/// Meshes with at most eight elements: two-element squares, a four-element
/// cross, the two structured 2x2 meshes and a perturbed one.
pub fn small_meshes() -> Vec<(String, Mesh)> {
    use cdhdg::mesh::structured_unit_square;
    let mut out = vec![
        ("ne1".to_string(), structured_unit_square(1, Diagonal::NE).unwrap()),
        ("nw1".to_string(), structured_unit_square(1, Diagonal::NW).unwrap()),
    ];
    let cross = Mesh::from_triangles(
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.45, 0.55]],
        &[[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
    )
    .unwrap();
    out.push(("cross".into(), cross));
    let ne2 = structured_unit_square(2, Diagonal::NE).unwrap();
    out.push(("ne2".into(), ne2.clone()));
    out.push(("nw2".into(), structured_unit_square(2, Diagonal::NW).unwrap()));
    let mut verts = ne2.vertices.clone();
    let centre = verts.iter().position(|v| (v[0] - 0.5).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12).unwrap();
    verts[centre] = [0.56, 0.41];
    let tris: Vec<[usize; 3]> = ne2.elements.iter().map(|e| e.vertices).collect();
    out.push(("perturbed2".into(), Mesh::from_triangles(verts, &tris).unwrap()));
    out
}

/// Random cubic in `x, y` with coefficients in `[-1, 1]`.
pub fn random_cubic(rng: &mut impl Rng) -> Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync> {
    let c: [f64; 10] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    Arc::new(move |p: [f64; 2]| {
        let (x, y) = (p[0], p[1]);
        c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y + c[6] * x * x * x + c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y
    })
}

/// Random draw of `(eps, beta, f, g)`: `eps` log-uniform in `[1e-4, 1]`,
/// `|beta|` in `[0.5, 2]` with uniform direction.
pub fn random_problem(rng: &mut impl Rng, tau: fn(f64, f64, f64) -> f64) -> OracleProblem {
    let eps = 10f64.powf(rng.gen_range(-4.0..0.0));
    let ang = rng.gen_range(0.0..std::f64::consts::TAU);
    let mag = rng.gen_range(0.5..2.0);
    OracleProblem { eps, beta: [mag * ang.cos(), mag * ang.sin()], f: random_cubic(rng), g: random_cubic(rng), tau }
}
