/* C interface to the splitkit stationary iterative solvers. */

#ifndef SPLITKIT_H
#define SPLITKIT_H

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum SkStatus {
  SK_STATUS_OK = 0,
  /**
   * Bad argument: null pointer, unknown name, malformed input.
   */
  SK_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Numerical failure: divergence or a non-converged estimate.
   */
  SK_STATUS_NUMERICAL = 2,
  /**
   * File could not be read or written.
   */
  SK_STATUS_IO = 3,
  /**
   * A panic was caught at the boundary.
   */
  SK_STATUS_INTERNAL = 4,
} SkStatus;

/**
 * Which estimator produced a spectral radius.
 */
typedef enum SkBackend {
  SK_BACKEND_DENSE_QR = 0,
  SK_BACKEND_KRYLOV = 1,
  SK_BACKEND_POWER_GROWTH = 2,
} SkBackend;

/**
 * Opaque handle to a square linear system `Ax = b`.
 */
typedef struct SkSystem SkSystem;

/**
 * Result of a linear solve.
 */
typedef struct SkSolveReport {
  uint64_t iterations;
  /**
   * Relative infinity-norm residual of the returned solution.
   */
  double residual;
  bool converged;
} SkSolveReport;

/**
 * Result of a spectral-radius estimation.
 */
typedef struct SkSpectralReport {
  double rho;
  uint64_t iterations;
  bool converged;
  enum SkBackend backend;
} SkSpectralReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sk_version(void);

/**
 * Message of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sk_last_error_message(void);

/**
 * Read a system from a matrix file and a right-hand-side file in the
 * plain-text interchange format.
 *
 * # Safety
 * `matrix_path` and `rhs_path` must be NUL-terminated strings; `out` must
 * be a valid pointer to receive the handle.
 */
enum SkStatus sk_system_read(const char *matrix_path, const char *rhs_path, struct SkSystem **out);

/**
 * Generate a seeded random system of the given class (1, 2 or 3) with
 * `b = A*1`.
 *
 * # Safety
 * `out` must be a valid pointer to receive the handle.
 */
enum SkStatus sk_system_generate(uint32_t class_,
                                 uint64_t n,
                                 double phi,
                                 uint64_t seed,
                                 struct SkSystem **out);

/**
 * Generate the symmetric 9-band collocation system with `b = A*1`.
 *
 * # Safety
 * `out` must be a valid pointer to receive the handle.
 */
enum SkStatus sk_system_bspline(uint64_t n, struct SkSystem **out);

/**
 * Dimension of the system, or 0 for a null handle.
 *
 * # Safety
 * `sys` must be a handle from this library (or null).
 */
uint64_t sk_system_dim(const struct SkSystem *sys);

/**
 * Release a system handle. Null is allowed.
 *
 * # Safety
 * `sys` must be a handle previously returned by this library and not yet
 * freed.
 */
void sk_system_free(struct SkSystem *sys);

/**
 * Solve the system with a named method. `mode`: 0 = plain sweeps,
 * 1 = two-step form, 2 = the shifted symmetric Gauss-Seidel iteration.
 * When `out_solution` is non-null it must point at `sk_system_dim(sys)`
 * doubles, which receive the solution.
 *
 * # Safety
 * All pointers must satisfy the stated contracts.
 */
enum SkStatus sk_solve(const struct SkSystem *sys,
                       const char *method,
                       double tol,
                       uint64_t max_iters,
                       uint32_t mode,
                       struct SkSolveReport *out_report,
                       double *out_solution);

/**
 * Spectral radius of a named method's iteration operator on the system.
 *
 * # Safety
 * All pointers must satisfy the stated contracts.
 */
enum SkStatus sk_spectral_radius(const struct SkSystem *sys,
                                 const char *method,
                                 double tol,
                                 struct SkSpectralReport *out);

/**
 * Asymptotic iteration-count ratio log(rho_method)/log(rho_baseline);
 * fails on domain violations (nonpositive radii or baseline 1).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SkStatus sk_speedup(double rho_method, double rho_baseline, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPLITKIT_H */
