#ifndef CDHDG_H
#define CDHDG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CdhdgDiagonal {
  CDHDG_DIAGONAL_NE = 0,
  CDHDG_DIAGONAL_NW = 1,
} CdhdgDiagonal;

typedef enum CdhdgMethod {
  CDHDG_METHOD_HDG1 = 1,
  CDHDG_METHOD_HDG2 = 2,
  CDHDG_METHOD_HDG3 = 3,
} CdhdgMethod;

typedef enum CdhdgStatus {
  CDHDG_STATUS_OK = 0,
  CDHDG_STATUS_NULL_POINTER = 1,
  CDHDG_STATUS_INVALID_ARGUMENT = 2,
  CDHDG_STATUS_MESH_ERROR = 3,
  CDHDG_STATUS_SOLVE_ERROR = 4,
  /**
   * The problem has no exact solution to compare against.
   */
  CDHDG_STATUS_NO_EXACT_SOLUTION = 5,
  /**
   * The point lies outside the mesh.
   */
  CDHDG_STATUS_OUTSIDE_MESH = 6,
  CDHDG_STATUS_PANIC = 7,
} CdhdgStatus;

/**
 * Triangulation of the unit square.
 */
typedef struct CdhdgMesh CdhdgMesh;

/**
 * Discrete solution together with the mesh and problem it was computed on.
 */
typedef struct CdhdgSolution CdhdgSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length in
 * bytes, excluding the terminator. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
uintptr_t cdhdg_last_error_message(char *buf, uintptr_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cdhdg_version(void);

/**
 * Structured `n x n` mesh of the unit square, each cell split along the
 * given diagonal.
 *
 * # Safety
 * `out` must be a valid pointer. On success `*out` owns a new mesh.
 */
enum CdhdgStatus cdhdg_mesh_structured(uintptr_t n,
                                       enum CdhdgDiagonal diagonal,
                                       struct CdhdgMesh **out);

/**
 * Mesh from `n_vertices` points (`xy`, interleaved) and `n_triangles`
 * vertex triples (`tri`, zero-based).
 *
 * # Safety
 * `xy` must hold `2 * n_vertices` doubles, `tri` `3 * n_triangles` indices,
 * and `out` must be valid.
 */
enum CdhdgStatus cdhdg_mesh_from_triangles(const double *xy,
                                           uintptr_t n_vertices,
                                           const uintptr_t *tri,
                                           uintptr_t n_triangles,
                                           struct CdhdgMesh **out);

/**
 * # Safety
 * `mesh` must be null or a handle from this library not freed before.
 */
void cdhdg_mesh_free(struct CdhdgMesh *mesh);

/**
 * Number of elements, or 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or a valid handle.
 */
uintptr_t cdhdg_mesh_n_elements(const struct CdhdgMesh *mesh);

/**
 * Number of faces, or 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or a valid handle.
 */
uintptr_t cdhdg_mesh_n_faces(const struct CdhdgMesh *mesh);

/**
 * Solves a built-in problem (`"smooth"`, `"rotating"`, `"interior_layer"`,
 * `"boundary_layer"`) on `mesh` with polynomial degree `k`. A nonzero
 * `scaled` solves the diagonally scaled trace system.
 *
 * # Safety
 * `mesh` must be a valid handle, `problem` a NUL-terminated string and
 * `out` a valid pointer. On success `*out` owns a new solution.
 */
enum CdhdgStatus cdhdg_solve(const struct CdhdgMesh *mesh,
                             const char *problem,
                             double epsilon,
                             enum CdhdgMethod method,
                             uintptr_t k,
                             int scaled,
                             struct CdhdgSolution **out);

/**
 * # Safety
 * `sol` must be null or a handle from this library not freed before.
 */
void cdhdg_solution_free(struct CdhdgSolution *sol);

/**
 * Number of global trace unknowns of the solve.
 *
 * # Safety
 * `sol` must be null or a valid handle.
 */
uintptr_t cdhdg_solution_n_dofs(const struct CdhdgSolution *sol);

/**
 * L2 errors of `u_h` and `q_h` against the exact solution.
 *
 * # Safety
 * `sol` must be a valid handle; `u_error` and `q_error` valid pointers.
 */
enum CdhdgStatus cdhdg_solution_errors(const struct CdhdgSolution *sol,
                                       double *u_error,
                                       double *q_error);

/**
 * Evaluates `u_h` at `(x, y)`. On shared edges the lowest-numbered
 * containing element is used.
 *
 * # Safety
 * `sol` must be a valid handle and `value` a valid pointer.
 */
enum CdhdgStatus cdhdg_solution_eval(const struct CdhdgSolution *sol,
                                     double x,
                                     double y,
                                     double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CDHDG_H */
