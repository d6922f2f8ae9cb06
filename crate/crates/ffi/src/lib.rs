//! C interface to `mulmetric`.
//!
//! Problems and solver reports are opaque handles created and destroyed
//! through this API. Every function returns an [`MmStatus`]; on failure a
//! message is available from [`mm_last_error_message`] on the same thread.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with [`mm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mulmetric::fixed_point::apriori_bound;
use mulmetric::metric::{dist_exp, dist_pos_vec, mabs, PosVec, RealVec};
use mulmetric::problem::{lookup, Problem, ProblemDefinition, TraceFile};
use mulmetric::{Error, SolverReport};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    DomainError = 4,
    UnknownId = 5,
    NotConverged = 6,
    InvariantBreach = 7,
    PreconditionFailed = 8,
    BufferTooSmall = 9,
    Panic = 99,
}

/// Opaque validated problem.
pub struct MmProblem {
    inner: Problem,
}

/// Opaque solver result.
pub struct MmReport {
    inner: SolverReport<Vec<f64>>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MmStatus {
    match e {
        Error::Parse(_) => MmStatus::ParseError,
        Error::Domain(_) | Error::LeftDomain { .. } => MmStatus::DomainError,
        Error::UnknownId(_) => MmStatus::UnknownId,
        Error::InvariantBreach(_) => MmStatus::InvariantBreach,
        Error::Precondition { .. } => MmStatus::PreconditionFailed,
        _ => MmStatus::InvalidArgument,
    }
}

fn fail(e: Error) -> MmStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> MmStatus) -> MmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            MmStatus::Panic
        }
    }
}

fn null(what: &str) -> MmStatus {
    set_error(format!("{what} is null"));
    MmStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, MmStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        MmStatus::InvalidArgument
    })
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], MmStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn out_string(s: String, out: *mut *mut c_char) -> MmStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            MmStatus::Ok
        }
        Err(_) => {
            set_error("string contains NUL".into());
            MmStatus::InvalidArgument
        }
    }
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
}

/// Message for the most recent failure on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn mm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn wrap_problem(def: ProblemDefinition, out: *mut *mut MmProblem) -> MmStatus {
    let inner = lib!(def.validate());
    unsafe { *out = Box::into_raw(Box::new(MmProblem { inner })) };
    MmStatus::Ok
}

/// Loads a built-in problem such as `"paper-scalar"`.
///
/// # Safety
/// `id` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_problem_from_registry(
    id: *const c_char,
    out: *mut *mut MmProblem,
) -> MmStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let id = tri!(str_arg(id, "id"));
        let entry = lib!(lookup(id));
        wrap_problem(entry.definition, out)
    })
}

/// Parses a TOML problem definition.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_problem_from_toml(
    text: *const c_char,
    out: *mut *mut MmProblem,
) -> MmStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let text = tri!(str_arg(text, "text"));
        let def = lib!(ProblemDefinition::parse(text));
        wrap_problem(def, out)
    })
}

/// Serializes the problem back to TOML.
///
/// # Safety
/// `problem` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_problem_to_toml(
    problem: *const MmProblem,
    out: *mut *mut c_char,
) -> MmStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return null("problem");
        };
        if out.is_null() {
            return null("out");
        }
        out_string(lib!(p.inner.definition.to_toml()), out)
    })
}

fn revalidate(p: &mut MmProblem, def: ProblemDefinition) -> MmStatus {
    p.inner = lib!(def.validate());
    MmStatus::Ok
}

/// Replaces the start point. The problem is unchanged on failure.
///
/// # Safety
/// `problem` must be a live handle; `x0` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mm_problem_set_x0(
    problem: *mut MmProblem,
    x0: *const f64,
    len: usize,
) -> MmStatus {
    guard(|| {
        let Some(p) = problem.as_mut() else {
            return null("problem");
        };
        let x0 = tri!(slice_arg(x0, len, "x0"));
        let mut def = p.inner.definition.clone();
        def.x0 = x0.to_vec();
        revalidate(p, def)
    })
}

/// Replaces the stopping tolerance (log units) and iteration cap.
///
/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mm_problem_set_tolerance(
    problem: *mut MmProblem,
    tol_log: f64,
    max_iter: usize,
) -> MmStatus {
    guard(|| {
        let Some(p) = problem.as_mut() else {
            return null("problem");
        };
        let mut def = p.inner.definition.clone();
        def.tol_log = tol_log;
        def.max_iter = max_iter;
        revalidate(p, def)
    })
}

/// Coordinates per point of the problem's space.
///
/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mm_problem_dim(problem: *const MmProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.space.dim())
}

/// # Safety
/// `problem` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn mm_problem_free(problem: *mut MmProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Solves the problem. A report is produced whenever iteration ran to
/// completion; `NotConverged` then signals that the cap was hit first.
///
/// # Safety
/// `problem` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_solve(problem: *const MmProblem, out: *mut *mut MmReport) -> MmStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return null("problem");
        };
        if out.is_null() {
            return null("out");
        }
        let report = lib!(p.inner.solve());
        let converged = report.converged;
        *out = Box::into_raw(Box::new(MmReport { inner: report }));
        if converged {
            MmStatus::Ok
        } else {
            set_error("iteration cap reached before the error bound met the tolerance".into());
            MmStatus::NotConverged
        }
    })
}

/// Copies the fixed point into `buf`, which must hold `mm_report_dim` doubles.
///
/// # Safety
/// `report` must be a live handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mm_report_fixed_point(
    report: *const MmReport,
    buf: *mut f64,
    len: usize,
) -> MmStatus {
    guard(|| {
        let Some(r) = report.as_ref() else {
            return null("report");
        };
        if buf.is_null() {
            return null("buf");
        }
        let z = &r.inner.fixed_point;
        if len < z.len() {
            set_error(format!("buffer holds {len} values, need {}", z.len()));
            return MmStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(z.as_ptr(), buf, z.len());
        MmStatus::Ok
    })
}

/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mm_report_dim(report: *const MmReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.fixed_point.len())
}

/// Measured `ln d(fz, z)`; NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mm_report_residual_log(report: *const MmReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.residual_log)
}

/// Certified bound on `ln d(z, z*)`; NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mm_report_error_bound_log(report: *const MmReport) -> f64 {
    report
        .as_ref()
        .map_or(f64::NAN, |r| r.inner.error_bound_log)
}

/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mm_report_iterations(report: *const MmReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.iterations)
}

/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mm_report_converged(report: *const MmReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.converged)
}

/// The JSON trace, identical to what the command line writes.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_report_to_json(
    report: *const MmReport,
    out: *mut *mut c_char,
) -> MmStatus {
    guard(|| {
        let Some(r) = report.as_ref() else {
            return null("report");
        };
        if out.is_null() {
            return null("out");
        }
        out_string(lib!(TraceFile::from_report(&r.inner).to_json()), out)
    })
}

/// # Safety
/// `report` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn mm_report_free(report: *mut MmReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// `ln |a|*`.
///
/// # Safety
/// `out_log` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_mabs(a: f64, out_log: *mut f64) -> MmStatus {
    guard(|| {
        if out_log.is_null() {
            return null("out_log");
        }
        *out_log = lib!(mabs(a)).log();
        MmStatus::Ok
    })
}

/// `ln d*(x, y)` for two points of `R+^n`.
///
/// # Safety
/// `x` and `y` must point to `n` doubles; `out_log` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_dist_pos_vec(
    x: *const f64,
    y: *const f64,
    n: usize,
    out_log: *mut f64,
) -> MmStatus {
    guard(|| {
        if out_log.is_null() {
            return null("out_log");
        }
        let x = lib!(PosVec::new(tri!(slice_arg(x, n, "x")).to_vec()));
        let y = lib!(PosVec::new(tri!(slice_arg(y, n, "y")).to_vec()));
        *out_log = lib!(dist_pos_vec(&x, &y)).log();
        MmStatus::Ok
    })
}

/// `ln d_a(x, y)` for two points of `R^n`.
///
/// # Safety
/// `x` and `y` must point to `n` doubles; `out_log` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_dist_exp(
    x: *const f64,
    y: *const f64,
    n: usize,
    base: f64,
    out_log: *mut f64,
) -> MmStatus {
    guard(|| {
        if out_log.is_null() {
            return null("out_log");
        }
        let x = RealVec(tri!(slice_arg(x, n, "x")).to_vec());
        let y = RealVec(tri!(slice_arg(y, n, "y")).to_vec());
        *out_log = lib!(dist_exp(&x, &y, base)).log();
        MmStatus::Ok
    })
}

/// `rate^n / (1 - rate) · d10_log`.
///
/// # Safety
/// `out_log` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_apriori_bound(
    d10_log: f64,
    rate: f64,
    n: usize,
    out_log: *mut f64,
) -> MmStatus {
    guard(|| {
        if out_log.is_null() {
            return null("out_log");
        }
        *out_log = lib!(apriori_bound(d10_log, rate, n));
        MmStatus::Ok
    })
}

/// Estimates the problem map's contraction constant from `pairs` samples
/// drawn with the problem's seed.
///
/// # Safety
/// `problem` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_estimate_lambda(
    problem: *const MmProblem,
    pairs: usize,
    out: *mut f64,
) -> MmStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return null("problem");
        };
        if out.is_null() {
            return null("out");
        }
        *out = lib!(p.inner.estimate(pairs)).lambda_hat;
        MmStatus::Ok
    })
}

/// Checks the problem's contraction hypothesis on `samples` seeded pairs.
///
/// # Safety
/// `problem` must be a live handle; `holds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_verify_contraction(
    problem: *const MmProblem,
    samples: usize,
    holds: *mut bool,
) -> MmStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return null("problem");
        };
        if holds.is_null() {
            return null("holds");
        }
        *holds = lib!(p.inner.verify_contraction(samples)).holds;
        MmStatus::Ok
    })
}
