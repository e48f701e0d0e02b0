//! C ABI for `ginin`.
//!
//! Every fallible function returns a [`GininStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`ginin_last_error`] on the same thread. Handles are opaque and must be
//! released with the matching `_free` function. Enum arguments must hold one
//! of the declared values.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ginin::bounds::{gd_ratio_bounds, sd_ratio_upper_bound};
use ginin::estimation::{asymptotic_variance, estimate, Sample, Target, WeightScheme};
use ginin::{gc_n, gd_n, GiniError, GiniOrder, ParametricDistribution, QuantileFunction, StepQuantile};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GininStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Convergence = 4,
    AssumptionViolated = 5,
    Parse = 6,
    Partition = 7,
    Monotonicity = 8,
    Arity = 9,
    Io = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GininTarget {
    Gd = 0,
    Gc = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GininScheme {
    Pointwise = 0,
    ExactChoquet = 1,
}

/// Opaque parametric distribution.
pub struct GininDistribution(ParametricDistribution);

/// Opaque step quantile function.
pub struct GininStepQuantile(StepQuantile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &GiniError) -> GininStatus {
    match e {
        GiniError::Domain(_) => GininStatus::Domain,
        GiniError::Convergence(_) => GininStatus::Convergence,
        GiniError::AssumptionViolated(_) => GininStatus::AssumptionViolated,
        GiniError::Parse { .. } => GininStatus::Parse,
        GiniError::Partition(_) => GininStatus::Partition,
        GiniError::Monotonicity(_) => GininStatus::Monotonicity,
        GiniError::Arity { .. } => GininStatus::Arity,
        GiniError::Io(_) => GininStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Utf8,
    Gini(GiniError),
}

impl From<GiniError> for Failure {
    fn from(e: GiniError) -> Self {
        Failure::Gini(e)
    }
}

/// Runs `f`, storing its value through `out` on success and recording the
/// error otherwise. Panics are caught and reported as `Panic`.
fn guard<T>(out: *mut T, f: impl FnOnce() -> Result<T, Failure>) -> GininStatus {
    if out.is_null() {
        set_last_error("null output pointer".into());
        return GininStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            unsafe { out.write(v) };
            GininStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            GininStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("string argument is not valid UTF-8".into());
            GininStatus::InvalidUtf8
        }
        Ok(Err(Failure::Gini(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            GininStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn order(n: u32) -> Result<GiniOrder, Failure> {
    Ok(GiniOrder::new(n)?)
}

fn target(t: GininTarget) -> Target {
    match t {
        GininTarget::Gd => Target::Gd,
        GininTarget::Gc => Target::Gc,
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ginin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ginin_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `family:p1[,p2[,p3]]`, e.g. `pareto:3,2`.
///
/// # Safety
/// `spec` must be NULL or a NUL-terminated string; `out` must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ginin_distribution_parse(
    spec: *const c_char,
    out: *mut *mut GininDistribution,
) -> GininStatus {
    guard(out, || {
        if spec.is_null() {
            return Err(Failure::Null("spec"));
        }
        let s = CStr::from_ptr(spec).to_str().map_err(|_| Failure::Utf8)?;
        let d: ParametricDistribution = s.parse()?;
        Ok(Box::into_raw(Box::new(GininDistribution(d))))
    })
}

/// # Safety
/// `d` must be NULL or a handle from `ginin_distribution_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ginin_distribution_free(d: *mut GininDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle or NULL; `out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_distribution_gd(d: *const GininDistribution, n: u32, out: *mut f64) -> GininStatus {
    guard(out, || Ok(gd_n(&QuantileFunction::Parametric(deref(d, "distribution")?.0), order(n)?)?))
}

/// # Safety
/// `d` must be a live handle or NULL; `out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_distribution_gc(d: *const GininDistribution, n: u32, out: *mut f64) -> GininStatus {
    guard(out, || Ok(gc_n(&QuantileFunction::Parametric(deref(d, "distribution")?.0), order(n)?)?))
}

/// Asymptotic variance σ² of the sample estimator (so that the estimator's
/// variance is about σ²/N).
///
/// # Safety
/// `d` must be a live handle or NULL; `out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_distribution_asymptotic_variance(
    d: *const GininDistribution,
    n: u32,
    t: GininTarget,
    out: *mut f64,
) -> GininStatus {
    guard(out, || Ok(asymptotic_variance(&deref(d, "distribution")?.0, order(n)?, target(t))?))
}

/// Step quantile with `levels_len` levels on `breakpoints_len = levels_len + 1`
/// breakpoints running from 0 to 1.
///
/// # Safety
/// The arrays must hold the stated number of doubles; `out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_step_quantile_new(
    breakpoints: *const f64,
    breakpoints_len: usize,
    levels: *const f64,
    levels_len: usize,
    out: *mut *mut GininStepQuantile,
) -> GininStatus {
    guard(out, || {
        let b = slice(breakpoints, breakpoints_len, "breakpoints")?.to_vec();
        let l = slice(levels, levels_len, "levels")?.to_vec();
        Ok(Box::into_raw(Box::new(GininStepQuantile(StepQuantile::new(b, l)?))))
    })
}

/// Empirical quantile of a sample (any order).
///
/// # Safety
/// `values` must hold `len` doubles; `out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_step_quantile_from_sample(
    values: *const f64,
    len: usize,
    out: *mut *mut GininStepQuantile,
) -> GininStatus {
    guard(out, || {
        let mut v = slice(values, len, "values")?.to_vec();
        v.sort_unstable_by(f64::total_cmp);
        Ok(Box::into_raw(Box::new(GininStepQuantile(StepQuantile::from_sorted_sample(&v)?))))
    })
}

/// # Safety
/// `q` must be NULL or a live step quantile handle.
#[no_mangle]
pub unsafe extern "C" fn ginin_step_quantile_free(q: *mut GininStepQuantile) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// # Safety
/// `q` must be a live handle or NULL; `out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_step_quantile_gd(q: *const GininStepQuantile, n: u32, out: *mut f64) -> GininStatus {
    guard(out, || Ok(gd_n(&QuantileFunction::Step(deref(q, "step quantile")?.0.clone()), order(n)?)?))
}

/// # Safety
/// `q` must be a live handle or NULL; `out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_step_quantile_gc(q: *const GininStepQuantile, n: u32, out: *mut f64) -> GininStatus {
    guard(out, || Ok(gc_n(&QuantileFunction::Step(deref(q, "step quantile")?.0.clone()), order(n)?)?))
}

/// Point estimate of GD_n or GC_n from a sample of `len` values.
///
/// # Safety
/// `values` must hold `len` doubles; `out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_sample_estimate(
    values: *const f64,
    len: usize,
    n: u32,
    t: GininTarget,
    scheme: GininScheme,
    out: *mut f64,
) -> GininStatus {
    guard(out, || {
        let s = Sample::new(slice(values, len, "values")?.to_vec())?;
        let scheme = match scheme {
            GininScheme::Pointwise => WeightScheme::Pointwise,
            GininScheme::ExactChoquet => WeightScheme::ExactChoquet,
        };
        Ok(estimate(&s, order(n)?, scheme, target(t))?)
    })
}

/// Sharp bounds on GD_n / GD_m for 2 <= m <= n.
///
/// # Safety
/// `lower` and `upper` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_gd_ratio_bounds(m: u32, n: u32, lower: *mut f64, upper: *mut f64) -> GininStatus {
    if upper.is_null() {
        set_last_error("null output pointer".into());
        return GininStatus::NullPointer;
    }
    let mut hi = f64::NAN;
    let status = guard(lower, || {
        let b = gd_ratio_bounds(order(m)?, order(n)?)?;
        hi = b.upper;
        Ok(b.lower)
    });
    if status == GininStatus::Ok {
        upper.write(hi);
    }
    status
}

/// Upper bound on GD_n / SD over all distributions with finite variance.
///
/// # Safety
/// `out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn ginin_sd_ratio_upper_bound(n: u32, out: *mut f64) -> GininStatus {
    guard(out, || Ok(sd_ratio_upper_bound(order(n)?)))
}
