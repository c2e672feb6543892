//! C ABI over the transform engine: status-code functions with a
//! thread-local last-error message, opaque expression handles, and
//! caller-freed strings.
//!
//! Conventions:
//! - Every fallible function returns [`AftStatus`]; outputs are written
//!   through pointers only on `AFT_STATUS_OK`.
//! - On failure, a human-readable message is stored per thread and can
//!   be read with `aft_last_error_message` until the next failure on
//!   the same thread.
//! - Strings returned through `char **` outputs are owned by the caller
//!   and must be released with `aft_string_free`; expression handles
//!   with `aft_position_expr_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use angularft::cli::parse_momentum;
use angularft::exact::{chi, chi_float};
use angularft::radial::{regulated_radial, sph_bessel, QuadratureConfig, RadialSpec};
use angularft::transform::{forward, PositionExpr};
use angularft::Error;

/// Status code of every fallible call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AftStatus {
    Ok = 0,
    /// Input outside an operation's domain of definition.
    DomainError = 1,
    /// Expression syntax error.
    ParseError = 2,
    /// Grammatical expression violating a semantic rule.
    SemanticError = 3,
    /// Invalid argument value.
    ArgumentError = 4,
    /// Numeric integration did not converge.
    QuadratureError = 5,
    /// Power/rank combination with no finite closed form.
    OutsideFramework = 6,
    /// Point-mass term whose radial power does not pair with its rank.
    UnpairedDelta = 7,
    /// Exact result not representable in the coefficient ring.
    NotRepresentable = 8,
    /// A required pointer argument was null.
    NullPointer = 9,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 10,
    /// Internal invariant violation.
    InternalError = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained NUL").expect("static"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn fail(status: AftStatus, message: String) -> AftStatus {
    set_error(message);
    status
}

fn status_of(err: &Error) -> AftStatus {
    match err {
        Error::Domain(_) => AftStatus::DomainError,
        Error::NotRepresentable(_) => AftStatus::NotRepresentable,
        Error::OutsideFramework { .. } => AftStatus::OutsideFramework,
        Error::Argument(_) => AftStatus::ArgumentError,
        Error::Quadrature { .. } => AftStatus::QuadratureError,
        Error::UnpairedDelta { .. } => AftStatus::UnpairedDelta,
        Error::Parse { .. } => AftStatus::ParseError,
        Error::Semantic(_) => AftStatus::SemanticError,
        Error::Internal(_) => AftStatus::InternalError,
    }
}

fn fail_with(err: Error) -> AftStatus {
    fail(status_of(&err), err.to_string())
}

/// Runs a closure, converting panics into `InternalError` instead of
/// unwinding across the ABI boundary.
fn guarded(body: impl FnOnce() -> AftStatus) -> AftStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(AftStatus::InternalError, "internal panic".to_string()),
    }
}

/// # Safety
///
/// `ptr` must either be null or point to a NUL-terminated string that
/// stays valid for the duration of the call.
unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, AftStatus> {
    if ptr.is_null() {
        return Err(fail(
            AftStatus::NullPointer,
            "string argument is null".to_string(),
        ));
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        fail(
            AftStatus::InvalidUtf8,
            "string argument is not valid UTF-8".to_string(),
        )
    })
}

fn require_out<T>(ptr: *mut T, what: &str) -> Result<(), AftStatus> {
    if ptr.is_null() {
        Err(fail(
            AftStatus::NullPointer,
            format!("output pointer `{what}` is null"),
        ))
    } else {
        Ok(())
    }
}

/// Opaque handle to a canonical position-space expression.
pub struct AftPositionExpr {
    inner: PositionExpr,
}

/// Returns the message describing the most recent failure on the
/// calling thread, or null if no failure has been recorded.
///
/// # Safety
///
/// The returned pointer borrows thread-local storage: it stays valid
/// until the next failing call on the same thread and must not be freed.
#[no_mangle]
pub unsafe extern "C" fn aft_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Writes the exact radial transform coefficient for `p^n` at angular
/// momentum `ell`, rendered as a string such as `3/2*pi`, to `*out`.
///
/// # Safety
///
/// `out` must be a valid pointer. On success the caller owns the
/// written string and must release it with `aft_string_free`.
#[no_mangle]
pub unsafe extern "C" fn aft_chi(n: i64, ell: i64, out: *mut *mut c_char) -> AftStatus {
    guarded(|| {
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        match chi(n, ell) {
            Ok(value) => {
                let rendered = CString::new(value.to_string()).expect("no NUL in rendering");
                unsafe { *out = rendered.into_raw() };
                AftStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Writes the analytically continued transform coefficient at real
/// (non-integer) arguments to `*out`.
///
/// # Safety
///
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aft_chi_float(n: f64, ell: f64, out: *mut f64) -> AftStatus {
    guarded(|| {
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        match chi_float(n, ell) {
            Ok(value) => {
                unsafe { *out = value };
                AftStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Writes the spherical Bessel function of the first kind `j_ell(x)`
/// to `*out`.
///
/// # Safety
///
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aft_sph_bessel(ell: i64, x: f64, out: *mut f64) -> AftStatus {
    guarded(|| {
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        match sph_bessel(ell, x) {
            Ok(value) => {
                unsafe { *out = value };
                AftStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Evaluates the cutoff-regulated radial transform integral for `p^n`
/// at angular momentum `ell`, radius `r`, and regulator `lambda`, and
/// writes the converged estimate to `*out`.
///
/// # Safety
///
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aft_regulated_radial(
    n: i64,
    ell: i64,
    r: f64,
    lambda: f64,
    out: *mut f64,
) -> AftStatus {
    guarded(|| {
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        let result = RadialSpec::new(n, ell)
            .and_then(|spec| regulated_radial(&spec, r, lambda, &QuadratureConfig::default()));
        match result {
            Ok(value) => {
                unsafe { *out = value };
                AftStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Transforms a momentum-side expression such as
/// `p^-2*phat[i1]*phat[i2]` to position space and writes an owned
/// handle to `*out`.
///
/// # Safety
///
/// `expr` must be a NUL-terminated string and `out` a valid pointer.
/// On success the caller owns the handle and must release it with
/// `aft_position_expr_free`.
#[no_mangle]
pub unsafe extern "C" fn aft_forward(
    expr: *const c_char,
    out: *mut *mut AftPositionExpr,
) -> AftStatus {
    guarded(|| {
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        let src = match unsafe { read_utf8(expr) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match parse_momentum(src).and_then(|m| forward(&m)) {
            Ok(result) => {
                let handle = Box::new(AftPositionExpr { inner: result });
                unsafe { *out = Box::into_raw(handle) };
                AftStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Renders a position-space expression to its canonical text form and
/// writes the string to `*out`.
///
/// # Safety
///
/// `expr` must be a live handle from `aft_forward` and `out` a valid
/// pointer. On success the caller owns the written string and must
/// release it with `aft_string_free`.
#[no_mangle]
pub unsafe extern "C" fn aft_position_expr_render(
    expr: *const AftPositionExpr,
    out: *mut *mut c_char,
) -> AftStatus {
    guarded(|| {
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        if expr.is_null() {
            return fail(
                AftStatus::NullPointer,
                "expression handle is null".to_string(),
            );
        }
        let rendered = unsafe { &*expr }.inner.render();
        let string = CString::new(rendered).expect("no NUL in rendering");
        unsafe { *out = string.into_raw() };
        AftStatus::Ok
    })
}

/// Writes the number of canonical terms of a position-space expression
/// to `*out`.
///
/// # Safety
///
/// `expr` must be a live handle from `aft_forward` and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn aft_position_expr_term_count(
    expr: *const AftPositionExpr,
    out: *mut usize,
) -> AftStatus {
    guarded(|| {
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        if expr.is_null() {
            return fail(
                AftStatus::NullPointer,
                "expression handle is null".to_string(),
            );
        }
        unsafe { *out = (*expr).inner.terms().len() };
        AftStatus::Ok
    })
}

/// Releases an expression handle; null is ignored.
///
/// # Safety
///
/// `expr` must be null or a handle from `aft_forward` that has not been
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn aft_position_expr_free(expr: *mut AftPositionExpr) {
    if !expr.is_null() {
        drop(unsafe { Box::from_raw(expr) });
    }
}

/// Releases a string returned through a `char **` output; null is
/// ignored. Must not be called on the pointer returned by
/// `aft_last_error_message`.
///
/// # Safety
///
/// `s` must be null or an owned string from this interface that has not
/// been freed before.
#[no_mangle]
pub unsafe extern "C" fn aft_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        unsafe {
            let ptr = aft_last_error_message();
            assert!(!ptr.is_null());
            CStr::from_ptr(ptr).to_string_lossy().into_owned()
        }
    }

    fn take_string(ptr: *mut c_char) -> String {
        let out = unsafe { CStr::from_ptr(ptr) }.to_string_lossy().into_owned();
        unsafe { aft_string_free(ptr) };
        out
    }

    #[test]
    fn chi_renders_exact_value() {
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { aft_chi(0, 2, &mut out) };
        assert_eq!(status, AftStatus::Ok);
        assert_eq!(take_string(out), "3/2*pi");
    }

    #[test]
    fn chi_domain_error_sets_message() {
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { aft_chi(3, 2, &mut out) };
        assert_eq!(status, AftStatus::DomainError);
        assert!(out.is_null());
        assert!(last_error().contains("outside definable region"));
    }

    #[test]
    fn chi_float_between_integers() {
        let mut out = 0.0f64;
        let status = unsafe { aft_chi_float(-1.5, 0.0, &mut out) };
        assert_eq!(status, AftStatus::Ok);
        assert!(out.is_finite() && out > 0.0);
    }

    #[test]
    fn bessel_value() {
        let mut out = 0.0f64;
        let status = unsafe { aft_sph_bessel(0, 1.0, &mut out) };
        assert_eq!(status, AftStatus::Ok);
        assert!((out - 1.0f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn regulated_radial_matches_limit() {
        let mut out = 0.0f64;
        let status = unsafe { aft_regulated_radial(-2, 0, 1.0, 1e-4, &mut out) };
        assert_eq!(status, AftStatus::Ok);
        let limit = std::f64::consts::PI / 2.0;
        assert!((out - limit).abs() < 5e-4 * limit, "{out} vs {limit}");
    }

    #[test]
    fn forward_round_trip_through_handle() {
        let src = CString::new("p^-2*phat[i1]*phat[i2]").unwrap();
        let mut handle: *mut AftPositionExpr = std::ptr::null_mut();
        let status = unsafe { aft_forward(src.as_ptr(), &mut handle) };
        assert_eq!(status, AftStatus::Ok);

        let mut count = 0usize;
        assert_eq!(
            unsafe { aft_position_expr_term_count(handle, &mut count) },
            AftStatus::Ok
        );
        assert_eq!(count, 1);

        let mut rendered: *mut c_char = std::ptr::null_mut();
        assert_eq!(
            unsafe { aft_position_expr_render(handle, &mut rendered) },
            AftStatus::Ok
        );
        assert_eq!(
            take_string(rendered),
            "-1/8*pi^-1 * r^-1 * (1 * h[i1]*h[i2] - 1 * d[i1,i2])"
        );
        unsafe { aft_position_expr_free(handle) };
    }

    #[test]
    fn forward_reports_framework_bound() {
        let src = CString::new("p^4").unwrap();
        let mut handle: *mut AftPositionExpr = std::ptr::null_mut();
        let status = unsafe { aft_forward(src.as_ptr(), &mut handle) };
        assert_eq!(status, AftStatus::OutsideFramework);
        assert!(handle.is_null());
        assert!(last_error().contains("outside framework"));
    }

    #[test]
    fn forward_reports_parse_offset() {
        let src = CString::new("p^-2*junk[i1]").unwrap();
        let mut handle: *mut AftPositionExpr = std::ptr::null_mut();
        let status = unsafe { aft_forward(src.as_ptr(), &mut handle) };
        assert_eq!(status, AftStatus::ParseError);
        assert!(last_error().contains("byte 5"));
    }

    #[test]
    fn null_arguments_are_rejected() {
        assert_eq!(
            unsafe { aft_forward(std::ptr::null(), std::ptr::null_mut()) },
            AftStatus::NullPointer
        );
        assert_eq!(
            unsafe { aft_sph_bessel(0, 1.0, std::ptr::null_mut()) },
            AftStatus::NullPointer
        );
        let src = CString::new("p^-2").unwrap();
        assert_eq!(
            unsafe { aft_forward(src.as_ptr(), std::ptr::null_mut()) },
            AftStatus::NullPointer
        );
    }

    #[test]
    fn invalid_utf8_is_rejected() {
        let bytes: [c_char; 3] = [0x70, -1i8 as c_char, 0];
        let mut handle: *mut AftPositionExpr = std::ptr::null_mut();
        let status = unsafe { aft_forward(bytes.as_ptr(), &mut handle) };
        assert_eq!(status, AftStatus::InvalidUtf8);
    }

    #[test]
    fn free_functions_ignore_null() {
        unsafe {
            aft_position_expr_free(std::ptr::null_mut());
            aft_string_free(std::ptr::null_mut());
        }
    }
}
