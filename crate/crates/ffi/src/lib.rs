//! C ABI over the `dpbb` solver.
//!
//! Problems and DPBB results are opaque heap handles owned by the caller
//! and released with the matching `*_free` function. Every fallible call
//! returns a [`DpbbStatus`]; the message for the most recent failure on the
//! calling thread is available from [`dpbb_last_error`]. Status values
//! 1 through 5 match the `dpbb` command-line exit codes.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dpbb::baseline::direct_pseudo_solve;
use dpbb::generator::{generate_with, Family, GeneratorSpec};
use dpbb::linalg::{Matrix, Tolerances, Vector};
use dpbb::oracle::exhaustive_solve;
use dpbb::solver::{dpbb_solve, Problem, SolveResult};
use dpbb::trace::TraceDocument;
use dpbb::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpbbStatus {
    Ok = 0,
    Io = 1,
    Parse = 2,
    Dimension = 3,
    RankDeficient = 4,
    InvalidSpec = 5,
    NullPointer = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpbbFamily {
    Paper1 = 1,
    Paper2 = 2,
}

/// Opaque problem handle.
pub struct DpbbProblem {
    inner: Problem,
    tol: Tolerances,
}

/// Opaque handle to a finished DPBB solve.
pub struct DpbbSolveResult {
    result: SolveResult,
    trace: TraceDocument,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(e: &Error) -> DpbbStatus {
    match e.code() {
        1 => DpbbStatus::Io,
        2 => DpbbStatus::Parse,
        3 => DpbbStatus::Dimension,
        4 => DpbbStatus::RankDeficient,
        _ => DpbbStatus::InvalidSpec,
    }
}

fn fail(status: DpbbStatus, msg: &str) -> DpbbStatus {
    set_last_error(msg);
    status
}

/// Runs `f`, converting errors and panics into a status code.
fn guarded<F>(f: F) -> DpbbStatus
where
    F: FnOnce() -> Result<(), DpbbStatus>,
{
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DpbbStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(DpbbStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: dpbb::Result<T>) -> Result<T, DpbbStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, DpbbStatus> {
    // SAFETY: caller passes a handle obtained from this library or NULL.
    unsafe { p.as_ref() }.ok_or_else(|| fail(DpbbStatus::NullPointer, &format!("{what} is NULL")))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> Result<&'a mut [T], DpbbStatus> {
    if p.is_null() {
        return Err(fail(DpbbStatus::NullPointer, &format!("{what} is NULL")));
    }
    if len < need {
        return Err(fail(
            DpbbStatus::BufferTooSmall,
            &format!("{what} holds {len} entries, {need} needed"),
        ));
    }
    // SAFETY: caller guarantees `p` points to `len` writable elements.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, need) })
}

fn tolerances(rank_threshold: f64) -> Result<Tolerances, DpbbStatus> {
    if rank_threshold == 0.0 {
        return Ok(Tolerances::default());
    }
    lift(Tolerances::new(rank_threshold, Tolerances::default().solve_tolerance))
}

fn write_handle<T>(out: *mut *mut T, value: T) -> Result<(), DpbbStatus> {
    if out.is_null() {
        return Err(fail(DpbbStatus::NullPointer, "output handle pointer is NULL"));
    }
    // SAFETY: `out` is non-null and points to writable storage for one pointer.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message describing the last failure on this thread; empty after a
/// successful call. Valid until the next `dpbb_*` call on the same thread.
#[no_mangle]
pub extern "C" fn dpbb_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds a problem from a row-major `rows x cols` matrix and a length
/// `rows` right-hand side. `rank_threshold == 0` selects the default 1e-10.
///
/// # Safety
/// `a` must point to `rows * cols` readable doubles, `b` to `rows`, and
/// `out` to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn dpbb_problem_new(
    rows: usize,
    cols: usize,
    a: *const f64,
    b: *const f64,
    rank_threshold: f64,
    out: *mut *mut DpbbProblem,
) -> DpbbStatus {
    guarded(|| {
        if a.is_null() || b.is_null() {
            return Err(fail(DpbbStatus::NullPointer, "matrix or rhs pointer is NULL"));
        }
        let count = rows
            .checked_mul(cols)
            .ok_or_else(|| fail(DpbbStatus::Dimension, "rows * cols overflows"))?;
        // SAFETY: lengths are the caller's contract.
        let (a, b) = unsafe {
            (
                std::slice::from_raw_parts(a, count).to_vec(),
                std::slice::from_raw_parts(b, rows).to_vec(),
            )
        };
        let tol = tolerances(rank_threshold)?;
        let matrix = lift(Matrix::new(rows, cols, a))?;
        let rhs = lift(Vector::new(b))?;
        let inner = lift(Problem::new(matrix, rhs, &tol))?;
        write_handle(out, DpbbProblem { inner, tol })
    })
}

/// Builds a test problem (`family` is a `DpbbFamily` value) with its
/// default planted solution. With `noisy` set, the right-hand side carries
/// `noise_fraction * U[0,1)` noise drawn from `seed`.
///
/// # Safety
/// `out` must point to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn dpbb_problem_generate(
    family: u32,
    noise_fraction: f64,
    seed: u64,
    noisy: bool,
    out: *mut *mut DpbbProblem,
) -> DpbbStatus {
    guarded(|| {
        let family = match family {
            f if f == DpbbFamily::Paper1 as u32 => Family::Paper1,
            f if f == DpbbFamily::Paper2 as u32 => Family::Paper2,
            other => return Err(fail(DpbbStatus::InvalidSpec, &format!("unknown family {other}"))),
        };
        let spec = GeneratorSpec {
            noise_fraction,
            seed,
            ..GeneratorSpec::preset(family)
        };
        let tol = Tolerances::default();
        let generated = lift(generate_with(&spec, &tol))?;
        let inner = if noisy {
            lift(generated.noisy_problem())?
        } else {
            generated.problem
        };
        write_handle(out, DpbbProblem { inner, tol })
    })
}

/// # Safety
/// `problem` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dpbb_problem_free(problem: *mut DpbbProblem) {
    if !problem.is_null() {
        // SAFETY: handle came from Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpbb_problem_rows(problem: *const DpbbProblem) -> usize {
    unsafe { problem.as_ref() }.map_or(0, |p| p.inner.m())
}

/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpbb_problem_cols(problem: *const DpbbProblem) -> usize {
    unsafe { problem.as_ref() }.map_or(0, |p| p.inner.n())
}

/// Copies the row-major matrix into `out` (at least rows*cols entries).
///
/// # Safety
/// `problem` must be a live handle; `out` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dpbb_problem_copy_matrix(problem: *const DpbbProblem, out: *mut f64, len: usize) -> DpbbStatus {
    guarded(|| {
        let p = unsafe { borrow(problem, "problem") }?;
        let src = p.inner.a().as_slice();
        unsafe { out_slice(out, len, src.len(), "matrix buffer") }?.copy_from_slice(src);
        Ok(())
    })
}

/// Copies the right-hand side into `out` (at least rows entries).
///
/// # Safety
/// `problem` must be a live handle; `out` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dpbb_problem_copy_rhs(problem: *const DpbbProblem, out: *mut f64, len: usize) -> DpbbStatus {
    guarded(|| {
        let p = unsafe { borrow(problem, "problem") }?;
        let src = p.inner.b().as_slice();
        unsafe { out_slice(out, len, src.len(), "rhs buffer") }?.copy_from_slice(src);
        Ok(())
    })
}

/// Runs the DPBB sweep.
///
/// # Safety
/// `problem` must be a live handle; `out` must point to storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dpbb_solve_problem(problem: *const DpbbProblem, out: *mut *mut DpbbSolveResult) -> DpbbStatus {
    guarded(|| {
        let p = unsafe { borrow(problem, "problem") }?;
        let result = lift(dpbb_solve(&p.inner, &p.tol))?;
        let trace = TraceDocument::new(&p.inner, &result, None, None);
        write_handle(out, DpbbSolveResult { result, trace })
    })
}

/// # Safety
/// `result` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dpbb_result_free(result: *mut DpbbSolveResult) {
    if !result.is_null() {
        // SAFETY: handle came from Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(result) });
    }
}

/// Number of unknowns, 0 for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpbb_result_len(result: *const DpbbSolveResult) -> usize {
    unsafe { result.as_ref() }.map_or(0, |r| r.result.x.len())
}

/// `‖A x − b‖²` of the returned solution, NaN for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpbb_result_final_sse(result: *const DpbbSolveResult) -> f64 {
    unsafe { result.as_ref() }.map_or(f64::NAN, |r| r.result.final_sse)
}

/// # Safety
/// `result` must be a live handle; `out` must hold `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dpbb_result_solution(result: *const DpbbSolveResult, out: *mut u8, len: usize) -> DpbbStatus {
    guarded(|| {
        let r = unsafe { borrow(result, "result") }?;
        unsafe { out_slice(out, len, r.result.x.len(), "solution buffer") }?.copy_from_slice(&r.result.x);
        Ok(())
    })
}

/// Branch errors and decision of 1-based `stage`. Any output pointer may be NULL.
///
/// # Safety
/// `result` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpbb_result_stage(
    result: *const DpbbSolveResult,
    stage: usize,
    sse0: *mut f64,
    sse1: *mut f64,
    decision: *mut u8,
) -> DpbbStatus {
    guarded(|| {
        let r = unsafe { borrow(result, "result") }?;
        let rec = stage
            .checked_sub(1)
            .and_then(|i| r.result.stages.get(i))
            .ok_or_else(|| {
                fail(
                    DpbbStatus::Dimension,
                    &format!("stage {stage} out of range 1..={}", r.result.stages.len()),
                )
            })?;
        // SAFETY: each pointer is either NULL or writable per the contract.
        unsafe {
            if let Some(p) = sse0.as_mut() {
                *p = rec.branch0.sse;
            }
            if let Some(p) = sse1.as_mut() {
                *p = rec.branch1.sse;
            }
            if let Some(p) = decision.as_mut() {
                *p = rec.decision;
            }
        }
        Ok(())
    })
}

/// Full per-stage trace as a JSON string; release with [`dpbb_string_free`].
/// Returns NULL on failure.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpbb_result_trace_json(result: *const DpbbSolveResult) -> *mut c_char {
    let Some(r) = (unsafe { result.as_ref() }) else {
        set_last_error("result is NULL");
        return ptr::null_mut();
    };
    match serde_json::to_string(&r.trace).map(CString::new) {
        Ok(Ok(s)) => s.into_raw(),
        _ => {
            set_last_error("trace serialization failed");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dpbb_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from CString::into_raw in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Exhaustive minimizer over all `2^n` binary vectors, refusing `n > max_n`.
///
/// # Safety
/// `problem` must be a live handle; `x_out` must hold `len` writable bytes;
/// `sse_out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dpbb_oracle_solve(
    problem: *const DpbbProblem,
    max_n: usize,
    x_out: *mut u8,
    len: usize,
    sse_out: *mut f64,
) -> DpbbStatus {
    guarded(|| {
        let p = unsafe { borrow(problem, "problem") }?;
        let buf = unsafe { out_slice(x_out, len, p.inner.n(), "solution buffer") }?;
        let r = lift(exhaustive_solve(&p.inner, max_n))?;
        buf.copy_from_slice(&r.x);
        if let Some(s) = unsafe { sse_out.as_mut() } {
            *s = r.sse;
        }
        Ok(())
    })
}

/// Unconstrained least-squares solution, rounded at 0.5.
///
/// # Safety
/// `problem` must be a live handle; `real_x_out` (doubles) and `x_out`
/// (bytes) must each hold `len` writable entries; `sse_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn dpbb_baseline_solve(
    problem: *const DpbbProblem,
    real_x_out: *mut f64,
    x_out: *mut u8,
    len: usize,
    sse_out: *mut f64,
) -> DpbbStatus {
    guarded(|| {
        let p = unsafe { borrow(problem, "problem") }?;
        let n = p.inner.n();
        let real = unsafe { out_slice(real_x_out, len, n, "real solution buffer") }?;
        let bits = unsafe { out_slice(x_out, len, n, "solution buffer") }?;
        let r = lift(direct_pseudo_solve(&p.inner, &p.tol))?;
        real.copy_from_slice(r.real_x.as_slice());
        bits.copy_from_slice(&r.rounded_x);
        if let Some(s) = unsafe { sse_out.as_mut() } {
            *s = r.sse_of_rounded;
        }
        Ok(())
    })
}
