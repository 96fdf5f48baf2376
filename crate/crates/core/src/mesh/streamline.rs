use spade::{DelaunayTriangulation, Point2, Triangulation};

use super::{check_mesh_assumption, AffineTriangle, AssumptionReport, Mesh, MeshError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamlineOptions {
    /// Constant in the mesh assumption used by the repair pass.
    pub c: f64,
    pub max_sweeps: usize,
    /// Points closer than `prune_factor * h` to an earlier point are dropped.
    pub prune_factor: f64,
}

impl Default for StreamlineOptions {
    fn default() -> Self {
        Self { c: 1.0, max_sweeps: 20, prune_factor: 0.3 }
    }
}

#[derive(Debug, Clone)]
pub struct StreamlineMesh {
    pub mesh: Mesh,
    /// Traced node chains, each starting on the outflow boundary.
    pub chains: Vec<Vec<[f64; 2]>>,
    /// Checker result on the final mesh. `report.pass` is false when the
    /// repair pass hit its sweep cap.
    pub report: AssumptionReport,
    pub sweeps: usize,
}

const SIDES: [([f64; 2], [f64; 2], [f64; 2]); 4] = [
    ([0.0, 0.0], [1.0, 0.0], [0.0, -1.0]),
    ([1.0, 0.0], [1.0, 1.0], [1.0, 0.0]),
    ([1.0, 1.0], [0.0, 1.0], [0.0, 1.0]),
    ([0.0, 1.0], [0.0, 0.0], [-1.0, 0.0]),
];

const CORNERS: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

fn inside(p: [f64; 2]) -> bool {
    (0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1])
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Clips the segment from `a` (inside) to `b` (outside) to the unit square.
fn clip(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let mut t = 1.0f64;
    for d in 0..2 {
        let delta = b[d] - a[d];
        if b[d] < 0.0 {
            t = t.min(-a[d] / delta);
        } else if b[d] > 1.0 {
            t = t.min((1.0 - a[d]) / delta);
        }
    }
    let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    p.map(snap)
}

/// Clamps to `[0, 1]` and moves coordinates within rounding of a side onto
/// it, so boundary points stay exactly collinear.
fn snap(x: f64) -> f64 {
    const TOL: f64 = 1e-12;
    if x < TOL {
        0.0
    } else if x > 1.0 - TOL {
        1.0
    } else {
        x
    }
}

fn trace_backward(seed: [f64; 2], beta: &dyn Fn([f64; 2]) -> [f64; 2], h: f64, max_steps: usize) -> Result<Vec<[f64; 2]>, MeshError> {
    let mut chain = vec![seed];
    let mut x = seed;
    for _ in 0..max_steps {
        let b = beta(x);
        let nb = b[0].hypot(b[1]);
        if !(nb > 0.0) {
            return Err(MeshError::Streamline(format!("velocity vanishes at ({}, {})", x[0], x[1])));
        }
        let next = [x[0] - h * b[0] / nb, x[1] - h * b[1] / nb];
        if !inside(next) {
            let end = clip(x, next);
            if dist(end, x) < 0.5 * h && chain.len() > 1 {
                chain.pop();
            }
            if dist(end, *chain.last().unwrap()) > 1e-14 {
                chain.push(end);
            }
            return Ok(chain);
        }
        chain.push(next);
        x = next;
    }
    Err(MeshError::Streamline(format!(
        "streamline from ({}, {}) did not leave the domain in {max_steps} steps",
        seed[0], seed[1]
    )))
}

/// Returns the outflow seeds: boundary points at spacing at most `h` where
/// `beta . n > 0`.
fn outflow_seeds(beta: &dyn Fn([f64; 2]) -> [f64; 2], h: f64) -> Vec<[f64; 2]> {
    let m = (1.0 / h).ceil().max(1.0) as usize;
    let mut seeds: Vec<[f64; 2]> = Vec::new();
    for (a, b, n) in SIDES {
        for i in 0..=m {
            let t = i as f64 / m as f64;
            let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            let bp = beta(p);
            if bp[0] * n[0] + bp[1] * n[1] > 0.0 && !seeds.iter().any(|&s| dist(s, p) < 1e-12) {
                seeds.push(p);
            }
        }
    }
    seeds
}

fn triangle_violations(pts: &[[f64; 2]], tri: [usize; 3], beta: &dyn Fn([f64; 2]) -> [f64; 2], c: f64) -> usize {
    let t = AffineTriangle::new(tri.map(|v| pts[v]));
    let sups: [f64; 3] = std::array::from_fn(|i| {
        let n = t.outward_normal(i);
        let [a, b] = t.face_endpoints(i);
        super::face_sup(a, b, |x| {
            let bx = beta(x);
            bx[0] * n[0] + bx[1] * n[1]
        })
    });
    let star = (1..3).fold(0, |s, i| if sups[i] > sups[s] { i } else { s });
    (0..3).filter(|&i| i != star && sups[i].max(0.0) > c * t.h).count()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Meshes the unit square with node chains following backward streamlines of
/// `beta` from the outflow boundary, then flips edges to satisfy the mesh
/// assumption with constant `opts.c`.
pub fn streamline_mesh(
    beta: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    h: f64,
    opts: StreamlineOptions,
) -> Result<StreamlineMesh, MeshError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(MeshError::Streamline(format!("target size must be positive, got {h}")));
    }
    let samples = 16;
    for i in 0..=samples {
        for j in 0..=samples {
            let p = [i as f64 / samples as f64, j as f64 / samples as f64];
            let b = beta(p);
            if !(b[0].hypot(b[1]) > 0.0) {
                return Err(MeshError::Streamline(format!("velocity vanishes at ({}, {})", p[0], p[1])));
            }
        }
    }

    let max_steps = (40.0 / h).ceil() as usize + 10;
    let chains = outflow_seeds(beta, h)
        .into_iter()
        .map(|s| trace_backward(s, beta, h, max_steps))
        .collect::<Result<Vec<_>, _>>()?;

    let min_gap = opts.prune_factor * h;
    let mut pts: Vec<[f64; 2]> = CORNERS.to_vec();
    for p in chains.iter().flatten() {
        if pts.iter().all(|&q| dist(*p, q) >= min_gap) {
            pts.push(*p);
        }
    }

    let dt = DelaunayTriangulation::<Point2<f64>>::bulk_load_stable(pts.iter().map(|p| Point2::new(p[0], p[1])).collect())
        .map_err(|e| MeshError::Streamline(format!("triangulation failed: {e:?}")))?;
    let mut tris: Vec<[usize; 3]> = dt.inner_faces().map(|f| f.vertices().map(|v| v.fix().index())).collect();

    let mut sweeps = 0;
    let mut mesh = Mesh::from_triangles(pts.clone(), &tris)?;
    let mut report = check_mesh_assumption(&mesh, beta, opts.c);
    while !report.pass && sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut touched = vec![false; tris.len()];
        let mut flipped_any = false;
        for v in &report.violations {
            let f = &mesh.faces[v.face];
            let Some(r) = f.right else { continue };
            let l = f.left;
            if touched[l] || touched[r] {
                continue;
            }
            let [a, b] = f.vertices;
            let c = tris[l].iter().copied().find(|&x| x != a && x != b).unwrap();
            let d = tris[r].iter().copied().find(|&x| x != a && x != b).unwrap();
            let (pa, pb, pc, pd) = (pts[a], pts[b], pts[c], pts[d]);
            // The quad a-d-b-c must be strictly convex for the flip to be valid.
            if orient(pc, pd, pa) * orient(pc, pd, pb) >= 0.0 || orient(pa, pb, pc) * orient(pa, pb, pd) >= 0.0 {
                continue;
            }
            let before = triangle_violations(&pts, tris[l], beta, opts.c) + triangle_violations(&pts, tris[r], beta, opts.c);
            let (t1, t2) = ([a, d, c], [d, b, c]);
            let after = triangle_violations(&pts, t1, beta, opts.c) + triangle_violations(&pts, t2, beta, opts.c);
            if after < before {
                tris[l] = t1;
                tris[r] = t2;
                touched[l] = true;
                touched[r] = true;
                flipped_any = true;
            }
        }
        mesh = Mesh::from_triangles(pts.clone(), &tris)?;
        report = check_mesh_assumption(&mesh, beta, opts.c);
        if !flipped_any {
            break;
        }
    }
    Ok(StreamlineMesh { mesh, chains, report, sweeps })
}
