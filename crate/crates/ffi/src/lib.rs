//! C ABI over `loj-core`.
//!
//! Polynomials live behind the opaque `LojPoly` handle. Every fallible call
//! returns a `LojStatus`; on failure the message is kept per thread and read
//! with `loj_last_error_message`. Strings handed out by the library must be
//! released with `loj_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use loj_core::error::Error;
use loj_core::exponent::loj_wsqh;
use loj_core::localring::{milnor_number, MilnorNumber};
use loj_core::poly::{parse, Poly, WeightVector};
use loj_core::rational::fmt_q;
use loj_core::report::{analyze, AnalyzeOptions};

/// Result codes. The first four match the command line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LojStatus {
    Ok = 0,
    /// Malformed polynomial, weights or variable list.
    Parse = 1,
    /// A budget was hit or the question does not apply to the input.
    Inconclusive = 2,
    /// An internal consistency check failed.
    Invariant = 3,
    NullArgument = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Opaque polynomial handle.
pub struct LojPoly {
    poly: Poly,
    vars: Vec<String>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> LojStatus {
    match e.exit_code() {
        1 => LojStatus::Parse,
        2 => LojStatus::Inconclusive,
        _ => LojStatus::Invariant,
    }
}

struct Failure(LojStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `body` with panics and errors mapped to a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LojStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LojStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LojStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(LojStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(LojStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const LojPoly) -> Result<&'a LojPoly, Failure> {
    p.as_ref().ok_or_else(|| Failure(LojStatus::NullArgument, "polynomial handle is null".into()))
}

fn out_string(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(LojStatus::Invariant, "string contains NUL".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(LojStatus::NullArgument, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

/// Parses `text` over the comma-separated variable names `vars`.
///
/// # Safety
/// `text` and `vars` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn loj_poly_parse(text: *const c_char, vars: *const c_char, out: *mut *mut LojPoly) -> LojStatus {
    guard(|| {
        check_out(out)?;
        let t = c_str(text, "text")?;
        let vars: Vec<String> =
            c_str(vars, "vars")?.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        let poly = parse(t, &vars)?;
        *out = Box::into_raw(Box::new(LojPoly { poly, vars }));
        Ok(())
    })
}

/// Releases a handle from `loj_poly_parse`. Null is ignored.
///
/// # Safety
/// `p` must come from `loj_poly_parse` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn loj_poly_free(p: *mut LojPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of variables of the polynomial, 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn loj_poly_nvars(p: *const LojPoly) -> usize {
    p.as_ref().map_or(0, |h| h.vars.len())
}

/// Canonical text of the polynomial.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn loj_poly_to_string(p: *const LojPoly, out: *mut *mut c_char) -> LojStatus {
    guard(|| {
        check_out(out)?;
        let h = handle(p)?;
        out_string(h.poly.to_text(&h.vars), out)
    })
}

/// Full analysis report as JSON. `weights` may be null (types are then
/// discovered) or `d;l1,...` / `l1,...`. Timings are omitted so equal inputs
/// give byte-identical reports.
///
/// # Safety
/// `p` must be a live handle, `weights` null or a NUL-terminated string,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn loj_analyze_json(
    p: *const LojPoly,
    weights: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
) -> LojStatus {
    guard(|| {
        check_out(out)?;
        let h = handle(p)?;
        let weights = if weights.is_null() { None } else { Some(WeightVector::parse(c_str(weights, "weights")?)?) };
        let opts = AnalyzeOptions { weights, seed, timings: false, ..Default::default() };
        let rep = analyze(&h.poly, &h.vars, &opts)?;
        let json = serde_json::to_string(&rep.to_json()).map_err(|e| Failure(LojStatus::Invariant, e.to_string()))?;
        out_string(json, out)
    })
}

/// Milnor number at the origin. `*finite` is set to false (and `*mu` to 0)
/// for a non-isolated critical point.
///
/// # Safety
/// `p` must be a live handle; `mu` and `finite` must be writable.
#[no_mangle]
pub unsafe extern "C" fn loj_milnor(p: *const LojPoly, degree_bound: u32, mu: *mut u64, finite: *mut bool) -> LojStatus {
    guard(|| {
        check_out(mu)?;
        check_out(finite)?;
        let h = handle(p)?;
        match milnor_number(&h.poly, degree_bound)? {
            MilnorNumber::Finite(m) => {
                *mu = m;
                *finite = true;
            }
            MilnorNumber::Infinite => {
                *mu = 0;
                *finite = false;
            }
        }
        Ok(())
    })
}

/// Exponent of a weakly semiquasihomogeneous type as `p/q` text.
///
/// # Safety
/// `weights` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn loj_exponent_wsqh(weights: *const c_char, out: *mut *mut c_char) -> LojStatus {
    guard(|| {
        check_out(out)?;
        let w = WeightVector::parse(c_str(weights, "weights")?)?;
        out_string(fmt_q(&loj_wsqh(&w)?.value), out)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn loj_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread; do not free.
#[no_mangle]
pub extern "C" fn loj_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn loj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
