//! C ABI over the twisted Poisson toolkit.
//!
//! All handles are opaque and owned by the caller once returned; release them with the matching
//! `tp_*_free`. Strings returned by this library are NUL-terminated and released with
//! [`tp_string_free`]. Every fallible call returns a [`TpStatus`]; on anything but `TP_OK` the
//! message is available from [`tp_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use twisted_poisson::cli::manifest::{Manifest, Object};
use twisted_poisson::poisson::{Convention, TwistedPoissonStructure};
use twisted_poisson::report::Report;
use twisted_poisson::scalar::parse_expr;
use twisted_poisson::Error;

/// Status codes; `TP_INPUT` and `TP_COMPUTATION` mirror CLI exit codes 2 and 3.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpStatus {
    TpOk = 0,
    TpNullArgument = 1,
    TpInvalidUtf8 = 2,
    TpInput = 3,
    TpComputation = 4,
    TpNotFound = 5,
    TpPanic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpConvention {
    TpConventionPairing = 0,
    TpConventionNormalized = 1,
}

impl From<TpConvention> for Convention {
    fn from(c: TpConvention) -> Self {
        match c {
            TpConvention::TpConventionPairing => Convention::Pairing,
            TpConvention::TpConventionNormalized => Convention::Normalized,
        }
    }
}

/// Parsed manifest.
pub struct TpManifest(Manifest);

/// Twisted Poisson structure extracted from a manifest.
pub struct TpStructure(TwistedPoissonStructure);

/// Verdict report.
pub struct TpReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: TpStatus, msg: impl Into<String>) -> TpStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> TpStatus {
    let status = if e.exit_code() == 2 { TpStatus::TpInput } else { TpStatus::TpComputation };
    fail(status, format!("{}: {e}", e.kind()))
}

/// Runs `f`, turning a panic into `TP_PANIC`.
fn guard(f: impl FnOnce() -> TpStatus) -> TpStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(TpStatus::TpPanic, "panic inside the library"))
}

/// # Safety
/// `s` is null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, TpStatus> {
    if s.is_null() {
        return Err(fail(TpStatus::TpNullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(TpStatus::TpInvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! out_arg {
    ($p:expr) => {
        if $p.is_null() {
            return fail(TpStatus::TpNullArgument, concat!(stringify!($p), " is null"));
        }
    };
}

/// Message of the last failing call on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn tp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse manifest source text.
///
/// # Safety
/// `src` is a NUL-terminated string; `out` is a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tp_manifest_parse(
    src: *const c_char,
    convention: TpConvention,
    out: *mut *mut TpManifest,
) -> TpStatus {
    out_arg!(out);
    let src = tri!(str_arg(src, "src"));
    guard(|| match Manifest::parse(src, convention.into()) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(TpManifest(m)));
            TpStatus::TpOk
        }
        Err(e) => from_error(&e),
    })
}

/// Load and parse a manifest file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tp_manifest_load(
    path: *const c_char,
    convention: TpConvention,
    out: *mut *mut TpManifest,
) -> TpStatus {
    out_arg!(out);
    let path = tri!(str_arg(path, "path"));
    guard(|| match Manifest::load(Path::new(path), convention.into()) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(TpManifest(m)));
            TpStatus::TpOk
        }
        Err(e) => from_error(&e),
    })
}

/// # Safety
/// `m` is null or a handle from `tp_manifest_parse`/`tp_manifest_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tp_manifest_free(m: *mut TpManifest) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of named objects in the manifest; 0 for a null handle.
///
/// # Safety
/// `m` is null or a live manifest handle.
#[no_mangle]
pub unsafe extern "C" fn tp_manifest_len(m: *const TpManifest) -> usize {
    m.as_ref().map_or(0, |m| m.0.objects().len())
}

/// Extract the structure `name`. Twisted symplectic entries yield their induced structure.
///
/// # Safety
/// `m` is a live manifest handle; `name` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tp_manifest_structure(
    m: *const TpManifest,
    name: *const c_char,
    out: *mut *mut TpStructure,
) -> TpStatus {
    out_arg!(out);
    let Some(m) = m.as_ref() else {
        return fail(TpStatus::TpNullArgument, "manifest is null");
    };
    let name = tri!(str_arg(name, "name"));
    guard(|| {
        let s = match m.0.get(name) {
            Some(Object::Poisson(p)) => p.clone(),
            Some(Object::Symplectic(s)) => match s.to_poisson() {
                Ok(p) => p.with_convention(m.0.convention()),
                Err(e) => return from_error(&e),
            },
            Some(_) => return fail(TpStatus::TpNotFound, format!("`{name}` is not a structure")),
            None => return fail(TpStatus::TpNotFound, format!("no object named `{name}`")),
        };
        *out = Box::into_raw(Box::new(TpStructure(s)));
        TpStatus::TpOk
    })
}

/// # Safety
/// `s` is null or a structure handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tp_structure_free(s: *mut TpStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Dimension of the structure's chart; 0 for a null handle.
///
/// # Safety
/// `s` is null or a live structure handle.
#[no_mangle]
pub unsafe extern "C" fn tp_structure_dim(s: *const TpStructure) -> usize {
    s.as_ref().map_or(0, |s| s.0.dim())
}

/// Structural identities of the structure as a report.
///
/// # Safety
/// `s` is a live structure handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tp_structure_verify(s: *const TpStructure, out: *mut *mut TpReport) -> TpStatus {
    out_arg!(out);
    let Some(s) = s.as_ref() else {
        return fail(TpStatus::TpNullArgument, "structure is null");
    };
    guard(|| {
        *out = Box::into_raw(Box::new(TpReport(s.0.verify())));
        TpStatus::TpOk
    })
}

/// Bracket `{f, g}` in canonical text form; free the result with `tp_string_free`.
///
/// # Safety
/// `s` is a live structure handle; `f`, `g` are NUL-terminated strings; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tp_structure_bracket(
    s: *const TpStructure,
    f: *const c_char,
    g: *const c_char,
    out: *mut *mut c_char,
) -> TpStatus {
    out_arg!(out);
    let Some(s) = s.as_ref() else {
        return fail(TpStatus::TpNullArgument, "structure is null");
    };
    let f = tri!(str_arg(f, "f"));
    let g = tri!(str_arg(g, "g"));
    guard(|| {
        let chart = s.0.chart();
        let r = parse_expr(f, chart)
            .and_then(|f| parse_expr(g, chart).map(|g| (f, g)))
            .and_then(|(f, g)| s.0.bracket(&f, &g));
        match r {
            Ok(v) => {
                *out = into_c(v.to_string());
                TpStatus::TpOk
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `r` is null or a report handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tp_report_free(r: *mut TpReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// True when the report has no FAIL entry; false for a null handle.
///
/// # Safety
/// `r` is null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn tp_report_passed(r: *const TpReport) -> bool {
    r.as_ref().is_some_and(|r| r.0.passed())
}

/// `path = VERDICT` rendering of the report; free with `tp_string_free`. Null for a null handle.
///
/// # Safety
/// `r` is null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn tp_report_machine(r: *const TpReport) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| into_c(r.0.to_machine()))
}

/// Run the command-line front end in-process. `argv[0]` is the program name.
///
/// Returns the CLI exit code, or -1 when an argument is null or not UTF-8. When non-null,
/// `out_text`/`err_text` receive the captured streams (free with `tp_string_free`).
///
/// # Safety
/// `argv` points to `argc` NUL-terminated strings; the out pointers are null or writable.
#[no_mangle]
pub unsafe extern "C" fn tp_run(
    argc: c_int,
    argv: *const *const c_char,
    out_text: *mut *mut c_char,
    err_text: *mut *mut c_char,
) -> c_int {
    if argv.is_null() || argc < 0 {
        set_error("argv is null");
        return -1;
    }
    let mut args = Vec::with_capacity(argc as usize);
    for i in 0..argc as usize {
        match str_arg(*argv.add(i), "argv entry") {
            Ok(a) => args.push(a.to_string()),
            Err(_) => return -1,
        }
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = catch_unwind(AssertUnwindSafe(|| twisted_poisson::cli::run(args, &mut out, &mut err)));
    let code = code.unwrap_or_else(|_| {
        set_error("panic inside the library");
        -1
    });
    if !out_text.is_null() {
        *out_text = into_c(String::from_utf8_lossy(&out).into_owned());
    }
    if !err_text.is_null() {
        *err_text = into_c(String::from_utf8_lossy(&err).into_owned());
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(from_error(&Error::Usage("x".into())), TpStatus::TpInput);
        assert_eq!(from_error(&Error::DivisionByZero), TpStatus::TpComputation);
        let msg = unsafe { CStr::from_ptr(tp_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "DivisionByZero: division by the zero polynomial");
    }

    #[test]
    fn null_arguments_are_rejected() {
        let mut m = ptr::null_mut();
        assert_eq!(
            unsafe { tp_manifest_parse(ptr::null(), TpConvention::TpConventionPairing, &mut m) },
            TpStatus::TpNullArgument
        );
        assert!(m.is_null());
        assert_eq!(unsafe { tp_manifest_len(ptr::null()) }, 0);
        assert!(!unsafe { tp_report_passed(ptr::null()) });
    }
}
