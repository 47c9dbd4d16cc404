//! C ABI for the conjugacy engine.
//!
//! Conventions, uniform across the interface:
//!
//! * Fallible functions return an `int32_t` status: `0` on success, the
//!   engine's stable error status otherwise, or
//!   [`ISOCONJ_STATUS_INVALID_ARGUMENT`] when the call itself is malformed
//!   (null pointer, non-UTF-8 string).  After a nonzero status,
//!   [`isoconj_last_error_message`] returns a human-readable description.
//! * Results are written through out pointers only on success.
//! * Strings passed in are NUL-terminated UTF-8.  Strings returned through
//!   out pointers (always JSON documents) are owned by the caller and must
//!   be released with [`isoconj_string_free`].
//! * Problem documents are held behind the opaque [`IsoconjProblem`] handle,
//!   created by [`isoconj_problem_parse`] and released by
//!   [`isoconj_problem_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use serde_json::{json, Value};

use isoconj::{
    common_superlevel, divisors_to_json, elementary_divisors, isometry_conjugacy, level_to_json,
    matrix_to_json, parse_problem, sym_power_form, Error, Level, Matrix, ProblemFile,
};

/// Status of a successful call.
pub const ISOCONJ_STATUS_OK: i32 = 0;

/// Status returned when an argument is unusable at the interface level —
/// a null pointer or a string that is not valid UTF-8 — as opposed to an
/// engine error, which carries the engine's own status.
pub const ISOCONJ_STATUS_INVALID_ARGUMENT: i32 = 100;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let stored = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn engine_error(e: Error) -> i32 {
    let status = e.status();
    set_error(&e.to_string());
    status
}

fn invalid_argument(what: &str) -> i32 {
    set_error(what);
    ISOCONJ_STATUS_INVALID_ARGUMENT
}

/// An opaque parsed problem document: a field level, a bilinear space, and
/// named operators.
pub struct IsoconjProblem {
    inner: ProblemFile,
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, i32> {
    if s.is_null() {
        return Err(invalid_argument(&format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid_argument(&format!("{what} is not valid UTF-8")))
}

unsafe fn problem_ref<'a>(p: *const IsoconjProblem) -> Result<&'a ProblemFile, i32> {
    if p.is_null() {
        return Err(invalid_argument("problem handle is null"));
    }
    Ok(&(*p).inner)
}

fn operator<'a>(pf: &'a ProblemFile, name: &str) -> Result<&'a Matrix, i32> {
    pf.operators.get(name).ok_or_else(|| {
        engine_error(Error::Parse {
            path: format!("$.operators.{name}"),
            reason: "operator not found in problem document".into(),
        })
    })
}

unsafe fn write_json(out: *mut *mut c_char, doc: Value) -> i32 {
    let s = match CString::new(doc.to_string()) {
        Ok(s) => s,
        Err(_) => return invalid_argument("serialized document contained a NUL byte"),
    };
    *out = s.into_raw();
    clear_error();
    ISOCONJ_STATUS_OK
}

/// Parse a JSON problem document into a new handle.
///
/// On success writes the handle to `out` and returns 0; the handle must be
/// released with [`isoconj_problem_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer; the
/// handle written to `out` is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn isoconj_problem_parse(
    json: *const c_char,
    out: *mut *mut IsoconjProblem,
) -> i32 {
    if out.is_null() {
        return invalid_argument("out pointer is null");
    }
    let text = match read_str(json, "problem text") {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_problem(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(IsoconjProblem { inner }));
            clear_error();
            ISOCONJ_STATUS_OK
        }
        Err(e) => engine_error(e),
    }
}

/// Release a handle returned by [`isoconj_problem_parse`].  Null is ignored.
///
/// # Safety
/// `p` must be a handle from [`isoconj_problem_parse`] that has not already
/// been freed, or null.
#[no_mangle]
pub unsafe extern "C" fn isoconj_problem_free(p: *mut IsoconjProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Write the dimension of the problem's bilinear space to `out`.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isoconj_problem_dimension(
    p: *const IsoconjProblem,
    out: *mut u64,
) -> i32 {
    if out.is_null() {
        return invalid_argument("out pointer is null");
    }
    match problem_ref(p) {
        Ok(pf) => {
            *out = pf.space.dim() as u64;
            clear_error();
            ISOCONJ_STATUS_OK
        }
        Err(status) => status,
    }
}

/// Write the field characteristic of the problem's level to `out`.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isoconj_problem_characteristic(
    p: *const IsoconjProblem,
    out: *mut u64,
) -> i32 {
    if out.is_null() {
        return invalid_argument("out pointer is null");
    }
    match problem_ref(p) {
        Ok(pf) => {
            *out = pf.level.p();
            clear_error();
            ISOCONJ_STATUS_OK
        }
        Err(status) => status,
    }
}

/// Write the number of named operators in the document to `out`.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isoconj_problem_operator_count(
    p: *const IsoconjProblem,
    out: *mut u64,
) -> i32 {
    if out.is_null() {
        return invalid_argument("out pointer is null");
    }
    match problem_ref(p) {
        Ok(pf) => {
            *out = pf.operators.len() as u64;
            clear_error();
            ISOCONJ_STATUS_OK
        }
        Err(status) => status,
    }
}

/// Decide whether the named operator is an isometry of the problem's form;
/// writes `true`/`false` to `out`.
///
/// # Safety
/// `p` must be a live handle, `name` a NUL-terminated string, and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isoconj_check(
    p: *const IsoconjProblem,
    name: *const c_char,
    out: *mut bool,
) -> i32 {
    if out.is_null() {
        return invalid_argument("out pointer is null");
    }
    let pf = match problem_ref(p) {
        Ok(pf) => pf,
        Err(status) => return status,
    };
    let name = match read_str(name, "operator name") {
        Ok(n) => n,
        Err(status) => return status,
    };
    let t = match operator(pf, name) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match pf.space.is_isometry(t) {
        Ok(v) => {
            *out = v;
            clear_error();
            ISOCONJ_STATUS_OK
        }
        Err(e) => engine_error(e),
    }
}

/// Compute the elementary divisors of the named operator.  Writes a JSON
/// document `{"divisors": [{"eigenvalue", "size"}, ...], "level": {...}}`
/// to `out_json`; eigenvalue encodings are relative to the reported level.
///
/// # Safety
/// `p` must be a live handle, `name` a NUL-terminated string, and
/// `out_json` a valid pointer; the string written to `out_json` must be
/// released with [`isoconj_string_free`].
#[no_mangle]
pub unsafe extern "C" fn isoconj_elementary_divisors(
    p: *const IsoconjProblem,
    name: *const c_char,
    out_json: *mut *mut c_char,
) -> i32 {
    if out_json.is_null() {
        return invalid_argument("out pointer is null");
    }
    let pf = match problem_ref(p) {
        Ok(pf) => pf,
        Err(status) => return status,
    };
    let name = match read_str(name, "operator name") {
        Ok(n) => n,
        Err(status) => return status,
    };
    let t = match operator(pf, name) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let ed = match elementary_divisors(t) {
        Ok(ed) => ed,
        Err(e) => return engine_error(e),
    };
    let divisors = match divisors_to_json(&ed, &ed.level) {
        Ok(d) => d,
        Err(e) => return engine_error(e),
    };
    write_json(
        out_json,
        json!({"divisors": divisors, "level": level_to_json(&ed.level)}),
    )
}

/// Decide whether the two named operators are conjugate in the isometry
/// group.  Writes a JSON document `{"conjugate", "witness", "divisors_s",
/// "divisors_t", "case_trace", "level"}` to `out_json`; all matrix and
/// eigenvalue encodings are relative to the reported level.
///
/// # Safety
/// `p` must be a live handle, `s_name`/`t_name` NUL-terminated strings, and
/// `out_json` a valid pointer; the string written to `out_json` must be
/// released with [`isoconj_string_free`].
#[no_mangle]
pub unsafe extern "C" fn isoconj_conjugacy(
    p: *const IsoconjProblem,
    s_name: *const c_char,
    t_name: *const c_char,
    out_json: *mut *mut c_char,
) -> i32 {
    if out_json.is_null() {
        return invalid_argument("out pointer is null");
    }
    let pf = match problem_ref(p) {
        Ok(pf) => pf,
        Err(status) => return status,
    };
    let s_name = match read_str(s_name, "first operator name") {
        Ok(n) => n,
        Err(status) => return status,
    };
    let t_name = match read_str(t_name, "second operator name") {
        Ok(n) => n,
        Err(status) => return status,
    };
    let s = match operator(pf, s_name) {
        Ok(m) => m,
        Err(status) => return status,
    };
    let t = match operator(pf, t_name) {
        Ok(m) => m,
        Err(status) => return status,
    };
    let verdict = match isometry_conjugacy(s, t, &pf.space) {
        Ok(v) => v,
        Err(e) => return engine_error(e),
    };
    let out_level = match &verdict.witness {
        Some(w) => match common_superlevel(w.level(), &verdict.divisors_s.level) {
            Ok(lv) => lv,
            Err(e) => return engine_error(e),
        },
        None => verdict.divisors_s.level.clone(),
    };
    let witness = match &verdict.witness {
        Some(w) => match w.embed_any(&out_level) {
            Ok(we) => matrix_to_json(&we),
            Err(e) => return engine_error(e),
        },
        None => Value::Null,
    };
    let divisors_s = match divisors_to_json(&verdict.divisors_s, &out_level) {
        Ok(d) => d,
        Err(e) => return engine_error(e),
    };
    let divisors_t = match divisors_to_json(&verdict.divisors_t, &out_level) {
        Ok(d) => d,
        Err(e) => return engine_error(e),
    };
    write_json(
        out_json,
        json!({
            "conjugate": verdict.conjugate,
            "witness": witness,
            "divisors_s": divisors_s,
            "divisors_t": divisors_t,
            "case_trace": verdict
                .case_trace
                .iter()
                .map(|e| json!({"component": e.description, "tag": e.tag.as_str()}))
                .collect::<Vec<_>>(),
            "level": level_to_json(&out_level),
        }),
    )
}

/// Build the canonical invariant form on the dimension-(m+1) weight model
/// over GF(p).  Writes `{"kind", "gram", "level"}` to `out_json`.
///
/// # Safety
/// `out_json` must be a valid pointer; the string written to it must be
/// released with [`isoconj_string_free`].
#[no_mangle]
pub unsafe extern "C" fn isoconj_weight_model_form(
    m: u64,
    p: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    if out_json.is_null() {
        return invalid_argument("out pointer is null");
    }
    let level = match Level::prime(p) {
        Ok(lv) => lv,
        Err(e) => return engine_error(e),
    };
    let b = match sym_power_form(m as usize, &level) {
        Ok(b) => b,
        Err(e) => return engine_error(e),
    };
    write_json(
        out_json,
        json!({
            "kind": b.kind().as_str(),
            "gram": matrix_to_json(b.gram()),
            "level": level_to_json(&level),
        }),
    )
}

/// Return a copy of the message for the most recent error on this thread,
/// or null if the last call succeeded.  The caller releases the copy with
/// [`isoconj_string_free`].
///
/// # Safety
/// Always safe to call; the returned pointer (when non-null) must be
/// released with [`isoconj_string_free`].
#[no_mangle]
pub unsafe extern "C" fn isoconj_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string returned by this library.  Null is ignored.
///
/// # Safety
/// `s` must be a string returned by this library that has not already been
/// freed, or null.
#[no_mangle]
pub unsafe extern "C" fn isoconj_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn isoconj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
