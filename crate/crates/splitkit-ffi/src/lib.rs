//! C ABI over the splitkit solvers.
//!
//! Conventions: every fallible call returns an [`SkStatus`]; on failure a
//! message is stored in thread-local storage and can be read with
//! [`sk_last_error_message`] until the next failing call on the same
//! thread. Handles returned through out-pointers are owned by the caller
//! and must be released with their `_free` function. All paths and method
//! names are NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use splitkit::catalog::NamedMethod;
use splitkit::engine::{solve, Method, SolveConfig, SolveMode};
use splitkit::error::Error;
use splitkit::genmat::{bspline_matrix, generate, GeneratorConfig, MatrixClass};
use splitkit::linalg::{normalize, read_matrix, read_vector, LinearSystem};
use splitkit::spectral::SpectralBackend;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SkStatus {
    Ok = 0,
    /// Bad argument: null pointer, unknown name, malformed input.
    InvalidArgument = 1,
    /// Numerical failure: divergence or a non-converged estimate.
    Numerical = 2,
    /// File could not be read or written.
    Io = 3,
    /// A panic was caught at the boundary.
    Internal = 4,
}

/// Which estimator produced a spectral radius.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SkBackend {
    DenseQr = 0,
    Krylov = 1,
    PowerGrowth = 2,
}

/// Result of a linear solve.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SkSolveReport {
    pub iterations: u64,
    /// Relative infinity-norm residual of the returned solution.
    pub residual: f64,
    pub converged: bool,
}

/// Result of a spectral-radius estimation.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SkSpectralReport {
    pub rho: f64,
    pub iterations: u64,
    pub converged: bool,
    pub backend: SkBackend,
}

/// Opaque handle to a square linear system `Ax = b`.
pub struct SkSystem {
    inner: LinearSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> SkStatus {
    match err {
        Error::Diverged { .. } | Error::EigenFailure => SkStatus::Numerical,
        Error::Io(_) => SkStatus::Io,
        _ => SkStatus::InvalidArgument,
    }
}

fn fail(err: &Error) -> SkStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guard(body: impl FnOnce() -> SkStatus) -> SkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            SkStatus::Internal
        }
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, SkStatus> {
    if ptr.is_null() {
        set_error(&format!("{what} is null"));
        return Err(SkStatus::InvalidArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        SkStatus::InvalidArgument
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

fn put_system(out: *mut *mut SkSystem, sys: LinearSystem) -> SkStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return SkStatus::InvalidArgument;
    }
    let handle = Box::new(SkSystem { inner: sys });
    unsafe { *out = Box::into_raw(handle) };
    SkStatus::Ok
}

/// Read a system from a matrix file and a right-hand-side file in the
/// plain-text interchange format.
///
/// # Safety
/// `matrix_path` and `rhs_path` must be NUL-terminated strings; `out` must
/// be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn sk_system_read(
    matrix_path: *const c_char,
    rhs_path: *const c_char,
    out: *mut *mut SkSystem,
) -> SkStatus {
    guard(|| {
        let matrix_path = match cstr_arg(matrix_path, "matrix_path") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let rhs_path = match cstr_arg(rhs_path, "rhs_path") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let m = match read_matrix(matrix_path) {
            Ok(m) => m,
            Err(e) => return fail(&e),
        };
        let b = match read_vector(rhs_path) {
            Ok(b) => b,
            Err(e) => return fail(&e),
        };
        match LinearSystem::new(m, b) {
            Ok(sys) => put_system(out, sys),
            Err(e) => fail(&e),
        }
    })
}

/// Generate a seeded random system of the given class (1, 2 or 3) with
/// `b = A*1`.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn sk_system_generate(
    class: u32,
    n: u64,
    phi: f64,
    seed: u64,
    out: *mut *mut SkSystem,
) -> SkStatus {
    guard(|| {
        let class = match class {
            1 => MatrixClass::Class1,
            2 => MatrixClass::Class2,
            3 => MatrixClass::Class3,
            other => {
                set_error(&format!("unknown class {other} (expected 1, 2 or 3)"));
                return SkStatus::InvalidArgument;
            }
        };
        match generate(&GeneratorConfig {
            n: n as usize,
            phi,
            seed,
            class,
        }) {
            Ok(sys) => put_system(out, sys),
            Err(e) => fail(&e),
        }
    })
}

/// Generate the symmetric 9-band collocation system with `b = A*1`.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn sk_system_bspline(n: u64, out: *mut *mut SkSystem) -> SkStatus {
    guard(|| match bspline_matrix(n as usize) {
        Ok(sys) => put_system(out, sys),
        Err(e) => fail(&e),
    })
}

/// Dimension of the system, or 0 for a null handle.
///
/// # Safety
/// `sys` must be a handle from this library (or null).
#[no_mangle]
pub unsafe extern "C" fn sk_system_dim(sys: *const SkSystem) -> u64 {
    if sys.is_null() {
        return 0;
    }
    (*sys).inner.n() as u64
}

/// Release a system handle. Null is allowed.
///
/// # Safety
/// `sys` must be a handle previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn sk_system_free(sys: *mut SkSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Solve the system with a named method. `mode`: 0 = plain sweeps,
/// 1 = two-step form, 2 = the shifted symmetric Gauss-Seidel iteration.
/// When `out_solution` is non-null it must point at `sk_system_dim(sys)`
/// doubles, which receive the solution.
///
/// # Safety
/// All pointers must satisfy the stated contracts.
#[no_mangle]
pub unsafe extern "C" fn sk_solve(
    sys: *const SkSystem,
    method: *const c_char,
    tol: f64,
    max_iters: u64,
    mode: u32,
    out_report: *mut SkSolveReport,
    out_solution: *mut f64,
) -> SkStatus {
    guard(|| {
        if sys.is_null() || out_report.is_null() {
            set_error("sys and out_report must be non-null");
            return SkStatus::InvalidArgument;
        }
        let name = match cstr_arg(method, "method") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let named = match NamedMethod::from_str(name) {
            Ok(m) => m,
            Err(e) => return fail(&e),
        };
        let mode = match mode {
            0 => SolveMode::GeneralScheme,
            1 => SolveMode::TwoStep,
            2 => SolveMode::ModifiedSgs,
            other => {
                set_error(&format!("unknown mode {other}"));
                return SkStatus::InvalidArgument;
            }
        };
        let cfg = match SolveConfig::new(tol, max_iters as usize, mode) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match solve(&(*sys).inner, &Method::Named(named), &cfg) {
            Ok(report) => {
                *out_report = SkSolveReport {
                    iterations: report.iterations as u64,
                    residual: report.final_residual,
                    converged: report.converged,
                };
                if !out_solution.is_null() {
                    let src = report.solution.as_slice();
                    std::ptr::copy_nonoverlapping(src.as_ptr(), out_solution, src.len());
                }
                if report.converged {
                    SkStatus::Ok
                } else {
                    set_error("iteration budget exhausted before convergence");
                    SkStatus::Numerical
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// Spectral radius of a named method's iteration operator on the system.
///
/// # Safety
/// All pointers must satisfy the stated contracts.
#[no_mangle]
pub unsafe extern "C" fn sk_spectral_radius(
    sys: *const SkSystem,
    method: *const c_char,
    tol: f64,
    out: *mut SkSpectralReport,
) -> SkStatus {
    guard(|| {
        if sys.is_null() || out.is_null() {
            set_error("sys and out must be non-null");
            return SkStatus::InvalidArgument;
        }
        let name = match cstr_arg(method, "method") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let named = match NamedMethod::from_str(name) {
            Ok(m) => m,
            Err(e) => return fail(&e),
        };
        let ns = match normalize(&(*sys).inner) {
            Ok(ns) => ns,
            Err(e) => return fail(&e),
        };
        let spectral = splitkit::spectral::SpectralConfig {
            tol,
            ..splitkit::bench::bench_spectral_config()
        };
        match splitkit::bench::method_spectral_radius(&ns, named, &spectral) {
            Ok(rep) => {
                *out = SkSpectralReport {
                    rho: rep.rho,
                    iterations: rep.iterations as u64,
                    converged: rep.converged,
                    backend: match rep.method {
                        SpectralBackend::DenseQr => SkBackend::DenseQr,
                        SpectralBackend::Krylov => SkBackend::Krylov,
                        SpectralBackend::PowerGrowth => SkBackend::PowerGrowth,
                    },
                };
                if rep.converged {
                    SkStatus::Ok
                } else {
                    set_error("spectral estimator did not converge");
                    SkStatus::Numerical
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// Asymptotic iteration-count ratio log(rho_method)/log(rho_baseline);
/// fails on domain violations (nonpositive radii or baseline 1).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_speedup(rho_method: f64, rho_baseline: f64, out: *mut f64) -> SkStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return SkStatus::InvalidArgument;
        }
        match splitkit::bench::speedup(rho_method, rho_baseline) {
            Some(v) => {
                *out = v;
                SkStatus::Ok
            }
            None => {
                set_error("speedup undefined: radii must be positive and the baseline not 1");
                SkStatus::InvalidArgument
            }
        }
    })
}
