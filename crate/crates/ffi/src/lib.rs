//! C interface to the cdhdg solver.
//!
//! Meshes and solutions are opaque handles, created by `cdhdg_mesh_*` and
//! `cdhdg_solve` and released by the matching `*_free`. Every fallible function returns a
//! [`CdhdgStatus`]; on failure the message is available from
//! [`cdhdg_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cdhdg::hdg::{solve_hdg, HdgSolution, Method};
use cdhdg::mesh::{structured_unit_square, Diagonal, Mesh};
use cdhdg::post::{l2_error_flux, l2_error_scalar, FieldEvaluator, Region};
use cdhdg::problems::{builtin_problem, ProblemSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdhdgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    MeshError = 3,
    SolveError = 4,
    /// The problem has no exact solution to compare against.
    NoExactSolution = 5,
    /// The point lies outside the mesh.
    OutsideMesh = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdhdgDiagonal {
    Ne = 0,
    Nw = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdhdgMethod {
    Hdg1 = 1,
    Hdg2 = 2,
    Hdg3 = 3,
}

/// Triangulation of the unit square.
pub struct CdhdgMesh {
    mesh: Mesh,
}

/// Discrete solution together with the mesh and problem it was computed on.
pub struct CdhdgSolution {
    mesh: Mesh,
    problem: ProblemSpec,
    sol: HdgSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn guard(f: impl FnOnce() -> Result<(), (CdhdgStatus, String)>) -> CdhdgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CdhdgStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            CdhdgStatus::Panic
        }
    }
}

fn null(name: &str) -> (CdhdgStatus, String) {
    (CdhdgStatus::NullPointer, format!("{name} is null"))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length in
/// bytes, excluding the terminator. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cdhdg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Structured `n x n` mesh of the unit square, each cell split along the
/// given diagonal.
///
/// # Safety
/// `out` must be a valid pointer. On success `*out` owns a new mesh.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_mesh_structured(n: usize, diagonal: CdhdgDiagonal, out: *mut *mut CdhdgMesh) -> CdhdgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = match diagonal {
            CdhdgDiagonal::Ne => Diagonal::NE,
            CdhdgDiagonal::Nw => Diagonal::NW,
        };
        let mesh = structured_unit_square(n, d).map_err(|e| (CdhdgStatus::MeshError, e.to_string()))?;
        *out = Box::into_raw(Box::new(CdhdgMesh { mesh }));
        Ok(())
    })
}

/// Mesh from `n_vertices` points (`xy`, interleaved) and `n_triangles`
/// vertex triples (`tri`, zero-based).
///
/// # Safety
/// `xy` must hold `2 * n_vertices` doubles, `tri` `3 * n_triangles` indices,
/// and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_mesh_from_triangles(
    xy: *const f64,
    n_vertices: usize,
    tri: *const usize,
    n_triangles: usize,
    out: *mut *mut CdhdgMesh,
) -> CdhdgStatus {
    guard(|| {
        if xy.is_null() || tri.is_null() || out.is_null() {
            return Err(null("xy, tri or out"));
        }
        let xy = std::slice::from_raw_parts(xy, 2 * n_vertices);
        let tri = std::slice::from_raw_parts(tri, 3 * n_triangles);
        let verts = xy.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        let tris: Vec<[usize; 3]> = tri.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        let mesh = Mesh::from_triangles(verts, &tris).map_err(|e| (CdhdgStatus::MeshError, e.to_string()))?;
        *out = Box::into_raw(Box::new(CdhdgMesh { mesh }));
        Ok(())
    })
}

/// # Safety
/// `mesh` must be null or a handle from this library not freed before.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_mesh_free(mesh: *mut CdhdgMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Number of elements, or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_mesh_n_elements(mesh: *const CdhdgMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.n_elements())
}

/// Number of faces, or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_mesh_n_faces(mesh: *const CdhdgMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.n_faces())
}

/// Solves a built-in problem (`"smooth"`, `"rotating"`, `"interior_layer"`,
/// `"boundary_layer"`) on `mesh` with polynomial degree `k`. A nonzero
/// `scaled` solves the diagonally scaled trace system.
///
/// # Safety
/// `mesh` must be a valid handle, `problem` a NUL-terminated string and
/// `out` a valid pointer. On success `*out` owns a new solution.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_solve(
    mesh: *const CdhdgMesh,
    problem: *const c_char,
    epsilon: f64,
    method: CdhdgMethod,
    k: usize,
    scaled: c_int,
    out: *mut *mut CdhdgSolution,
) -> CdhdgStatus {
    guard(|| {
        let mesh = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        if problem.is_null() {
            return Err(null("problem"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let name = CStr::from_ptr(problem).to_str().map_err(|e| (CdhdgStatus::InvalidArgument, format!("problem name: {e}")))?;
        let spec = builtin_problem(name, epsilon).map_err(|e| (CdhdgStatus::InvalidArgument, e.to_string()))?;
        let m = match method {
            CdhdgMethod::Hdg1 => Method::Hdg1,
            CdhdgMethod::Hdg2 => Method::Hdg2,
            CdhdgMethod::Hdg3 => Method::Hdg3,
        };
        let mut cfg = m.config(k);
        cfg.scaled = scaled != 0;
        let sol = solve_hdg(&mesh.mesh, &spec, &cfg).map_err(|e| (CdhdgStatus::SolveError, e.to_string()))?;
        *out = Box::into_raw(Box::new(CdhdgSolution { mesh: mesh.mesh.clone(), problem: spec, sol }));
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a handle from this library not freed before.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_solution_free(sol: *mut CdhdgSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of global trace unknowns of the solve.
///
/// # Safety
/// `sol` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_solution_n_dofs(sol: *const CdhdgSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.sol.n_dofs)
}

/// L2 errors of `u_h` and `q_h` against the exact solution.
///
/// # Safety
/// `sol` must be a valid handle; `u_error` and `q_error` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_solution_errors(sol: *const CdhdgSolution, u_error: *mut f64, q_error: *mut f64) -> CdhdgStatus {
    guard(|| {
        let s = sol.as_ref().ok_or_else(|| null("sol"))?;
        if u_error.is_null() || q_error.is_null() {
            return Err(null("u_error or q_error"));
        }
        let ex = s.problem.exact.as_ref().ok_or((CdhdgStatus::NoExactSolution, format!("problem {} has no exact solution", s.problem.name)))?;
        let basis = |e: cdhdg::basis::BasisError| (CdhdgStatus::SolveError, e.to_string());
        let eu = l2_error_scalar(&s.mesh, s.sol.k, &s.sol.u, |x| (ex.u)(x), &Region::Full).map_err(basis)?;
        let eq = l2_error_flux(&s.mesh, s.sol.k, s.sol.space, &s.sol.q, |x| s.problem.exact_flux(x).unwrap(), &Region::Full).map_err(basis)?;
        *u_error = eu;
        *q_error = eq;
        Ok(())
    })
}

/// Evaluates `u_h` at `(x, y)`. On shared edges the lowest-numbered
/// containing element is used.
///
/// # Safety
/// `sol` must be a valid handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdhdg_solution_eval(sol: *const CdhdgSolution, x: f64, y: f64, value: *mut f64) -> CdhdgStatus {
    guard(|| {
        let s = sol.as_ref().ok_or_else(|| null("sol"))?;
        if value.is_null() {
            return Err(null("value"));
        }
        let p = [x, y];
        let e = (0..s.mesh.n_elements())
            .find(|&e| s.mesh.triangle(e).contains(p, 1e-12))
            .ok_or((CdhdgStatus::OutsideMesh, format!("({x}, {y}) is outside the mesh")))?;
        let geo = s.mesh.triangle(e);
        let ev = FieldEvaluator::new(s.sol.k, s.sol.space);
        *value = ev.scalar(&s.sol.u[e], geo.to_reference(p));
        Ok(())
    })
}
