//! C interface for the valbar library.
//!
//! The entry point is [`valbar_document_parse`], which reads the same JSON
//! documents the `valbar` command-line tool accepts (either a sheaf document
//! with `vertices`/`edges`/`restrictions` or a bare `matrix` document) and
//! returns an opaque handle.  The handle can then be fed to the analysis
//! functions, each of which returns a `valbar_status` code and writes its
//! result through an out-pointer.  All returned strings and arrays are owned
//! by the caller and must be released with the matching `*_free` function.
//!
//! Error messages for the most recent failure on the current thread are
//! available through [`valbar_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use valbar::{
    analyze_matrix, analyze_sheaf, digit_profile, parse_matrix_document, parse_sheaf_document,
    serialize_document, smith_normal_form, AnalyzeOptions, DvrMatrix, Error, Valuation,
};

/// Result code returned by every fallible function in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(non_camel_case_types)]
pub enum valbar_status {
    /// The call succeeded.
    VALBAR_OK = 0,
    /// A required pointer argument was null.
    VALBAR_NULL_ARGUMENT = 1,
    /// A string argument was not valid UTF-8.
    VALBAR_INVALID_UTF8 = 2,
    /// The input was not syntactically valid JSON for either document form.
    VALBAR_PARSE_ERROR = 3,
    /// The document parsed but failed validation (bad ring, shapes, ids, ...).
    VALBAR_VALIDATION_ERROR = 4,
    /// Analysis of a valid document failed.
    VALBAR_COMPUTE_ERROR = 5,
    /// The library panicked internally; the handle is still safe to free.
    VALBAR_INTERNAL_ERROR = 6,
}

enum DocumentKind {
    Sheaf(valbar::SheafDocument),
    Matrix(valbar::MatrixDocument),
}

/// Opaque handle to a parsed document.  Create with
/// [`valbar_document_parse`], release with [`valbar_document_free`].
#[allow(non_camel_case_types)]
pub struct valbar_document {
    kind: DocumentKind,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a nul byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_for(error: &Error) -> valbar_status {
    match error {
        Error::Parse(_) | Error::Io(_) => valbar_status::VALBAR_PARSE_ERROR,
        _ => valbar_status::VALBAR_VALIDATION_ERROR,
    }
}

fn fail(error: &Error, status: valbar_status) -> valbar_status {
    set_error(error.to_string());
    status
}

/// Runs `body` with panics converted to `VALBAR_INTERNAL_ERROR` so that
/// unwinding never crosses the language boundary.
fn guarded(body: impl FnOnce() -> valbar_status) -> valbar_status {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".to_string());
            valbar_status::VALBAR_INTERNAL_ERROR
        }
    }
}

/// Builds the coboundary (or bare) matrix a document describes.
fn document_matrix(doc: &valbar_document) -> Result<DvrMatrix, Error> {
    match &doc.kind {
        DocumentKind::Sheaf(sheaf) => Ok(sheaf.to_sheaf()?.coboundary()),
        DocumentKind::Matrix(matrix) => matrix.to_matrix(),
    }
}

/// Hands a heap-allocated `i64` array to the caller.
///
/// # Safety
///
/// `out` and `out_len` must be valid for writes.
unsafe fn export_i64s(values: Vec<i64>, out: *mut *mut i64, out_len: *mut usize) {
    let boxed = values.into_boxed_slice();
    unsafe {
        *out_len = boxed.len();
        *out = Box::into_raw(boxed) as *mut i64;
    }
}

/// Parses a JSON document into an opaque handle.
///
/// `text` may describe either a network sheaf (`vertices`/`edges`/
/// `restrictions`, optionally `clock_ratios`) or a bare matrix (`ring` +
/// `matrix`).  On success writes a new handle to `*out` and returns
/// `VALBAR_OK`; the handle must later be released with
/// [`valbar_document_free`].  On failure `*out` is set to null and the
/// reason is available via [`valbar_last_error`].
///
/// # Safety
///
/// `text` must be a valid nul-terminated C string and `out` must be a valid
/// pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn valbar_document_parse(
    text: *const c_char,
    out: *mut *mut valbar_document,
) -> valbar_status {
    if out.is_null() {
        set_error("out pointer is null".to_string());
        return valbar_status::VALBAR_NULL_ARGUMENT;
    }
    unsafe { *out = std::ptr::null_mut() };
    if text.is_null() {
        set_error("text pointer is null".to_string());
        return valbar_status::VALBAR_NULL_ARGUMENT;
    }
    let bytes = unsafe { CStr::from_ptr(text) }.to_bytes();
    let Ok(text) = std::str::from_utf8(bytes) else {
        set_error("input is not valid UTF-8".to_string());
        return valbar_status::VALBAR_INVALID_UTF8;
    };
    guarded(|| {
        let kind = match parse_sheaf_document(text) {
            Ok(sheaf) => DocumentKind::Sheaf(sheaf),
            Err(sheaf_err) => match parse_matrix_document(text) {
                Ok(matrix) => DocumentKind::Matrix(matrix),
                // Report the error from the form the text most resembles; a
                // "vertices" key marks it as an attempted sheaf document.
                Err(matrix_err) => {
                    let prefer_sheaf = text.contains("\"vertices\"");
                    let err = if prefer_sheaf { sheaf_err } else { matrix_err };
                    return fail(&err, status_for(&err));
                }
            },
        };
        let handle = Box::new(valbar_document { kind });
        unsafe { *out = Box::into_raw(handle) };
        clear_error();
        valbar_status::VALBAR_OK
    })
}

/// Releases a handle returned by [`valbar_document_parse`].
///
/// Passing null is a no-op.
///
/// # Safety
///
/// `doc` must be null or a pointer previously returned by
/// [`valbar_document_parse`] that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn valbar_document_free(doc: *mut valbar_document) {
    if !doc.is_null() {
        drop(unsafe { Box::from_raw(doc) });
    }
}

/// Runs the full barcode analysis and returns the report as a JSON string.
///
/// The report carries the barcode, Smith exponents, digit profile, per-route
/// barcodes, and the route-agreement flag — the same structure the
/// command-line tool emits with `--format structured`.  On success writes a
/// heap-allocated nul-terminated string to `*out_json`; release it with
/// [`valbar_string_free`].
///
/// # Safety
///
/// `doc` must be a live handle from [`valbar_document_parse`] and `out_json`
/// must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn valbar_analyze_json(
    doc: *const valbar_document,
    out_json: *mut *mut c_char,
) -> valbar_status {
    if out_json.is_null() {
        set_error("out_json pointer is null".to_string());
        return valbar_status::VALBAR_NULL_ARGUMENT;
    }
    unsafe { *out_json = std::ptr::null_mut() };
    if doc.is_null() {
        set_error("document pointer is null".to_string());
        return valbar_status::VALBAR_NULL_ARGUMENT;
    }
    let doc = unsafe { &*doc };
    guarded(|| {
        let options = AnalyzeOptions::default();
        let report = match &doc.kind {
            DocumentKind::Sheaf(sheaf) => match sheaf.to_sheaf() {
                Ok(sheaf) => analyze_sheaf(&sheaf, &options),
                Err(e) => return fail(&e, status_for(&e)),
            },
            DocumentKind::Matrix(matrix) => match matrix.to_matrix() {
                Ok(delta) => analyze_matrix(&delta, &options),
                Err(e) => return fail(&e, status_for(&e)),
            },
        };
        let report = match report {
            Ok(report) => report,
            Err(e) => return fail(&e, valbar_status::VALBAR_COMPUTE_ERROR),
        };
        let json = match serialize_document(&report) {
            Ok(json) => json,
            Err(e) => return fail(&e, valbar_status::VALBAR_COMPUTE_ERROR),
        };
        let Ok(json) = CString::new(json) else {
            set_error("report contained a nul byte".to_string());
            return valbar_status::VALBAR_INTERNAL_ERROR;
        };
        unsafe { *out_json = json.into_raw() };
        clear_error();
        valbar_status::VALBAR_OK
    })
}

/// Releases a string returned by this library.
///
/// Passing null is a no-op.
///
/// # Safety
///
/// `s` must be null or a string previously returned by a `valbar_*` function
/// that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn valbar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Computes the Smith normal form exponents of the document's matrix.
///
/// For a sheaf document the matrix is its coboundary.  Each diagonal entry
/// contributes one value: the exponent itself when it is resolved within the
/// ring's precision, or `-1` when the entry is indistinguishable from zero at
/// working precision (a censored exponent).  On success writes a
/// heap-allocated array to `*out` and its length to `*out_len`; release the
/// array with [`valbar_i64_array_free`].
///
/// # Safety
///
/// `doc` must be a live handle from [`valbar_document_parse`]; `out` and
/// `out_len` must be valid pointers to writable memory.
#[no_mangle]
pub unsafe extern "C" fn valbar_snf_exponents(
    doc: *const valbar_document,
    out: *mut *mut i64,
    out_len: *mut usize,
) -> valbar_status {
    if out.is_null() || out_len.is_null() {
        set_error("out pointer is null".to_string());
        return valbar_status::VALBAR_NULL_ARGUMENT;
    }
    unsafe {
        *out = std::ptr::null_mut();
        *out_len = 0;
    }
    if doc.is_null() {
        set_error("document pointer is null".to_string());
        return valbar_status::VALBAR_NULL_ARGUMENT;
    }
    let doc = unsafe { &*doc };
    guarded(|| {
        let delta = match document_matrix(doc) {
            Ok(delta) => delta,
            Err(e) => return fail(&e, status_for(&e)),
        };
        let snf = smith_normal_form(&delta);
        let exponents: Vec<i64> = snf
            .exponents
            .iter()
            .map(|v| match v {
                Valuation::Finite(a) => i64::from(*a),
                Valuation::Censored(_) => -1,
            })
            .collect();
        unsafe { export_i64s(exponents, out, out_len) };
        clear_error();
        valbar_status::VALBAR_OK
    })
}

/// Computes the digit profile of the document's matrix.
///
/// Writes the sequence `d_1, d_2, ...` of connecting-map ranks (one entry per
/// digit position up to the ring's precision) as a heap-allocated array.
/// Release it with [`valbar_i64_array_free`].
///
/// # Safety
///
/// `doc` must be a live handle from [`valbar_document_parse`]; `out` and
/// `out_len` must be valid pointers to writable memory.
#[no_mangle]
pub unsafe extern "C" fn valbar_digit_profile(
    doc: *const valbar_document,
    out: *mut *mut i64,
    out_len: *mut usize,
) -> valbar_status {
    if out.is_null() || out_len.is_null() {
        set_error("out pointer is null".to_string());
        return valbar_status::VALBAR_NULL_ARGUMENT;
    }
    unsafe {
        *out = std::ptr::null_mut();
        *out_len = 0;
    }
    if doc.is_null() {
        set_error("document pointer is null".to_string());
        return valbar_status::VALBAR_NULL_ARGUMENT;
    }
    let doc = unsafe { &*doc };
    guarded(|| {
        let delta = match document_matrix(doc) {
            Ok(delta) => delta,
            Err(e) => return fail(&e, status_for(&e)),
        };
        let profile = match digit_profile(&delta) {
            Ok(profile) => profile,
            Err(e) => return fail(&e, valbar_status::VALBAR_COMPUTE_ERROR),
        };
        let ranks: Vec<i64> = profile.d.iter().map(|&d| d as i64).collect();
        unsafe { export_i64s(ranks, out, out_len) };
        clear_error();
        valbar_status::VALBAR_OK
    })
}

/// Releases an array returned by [`valbar_snf_exponents`] or
/// [`valbar_digit_profile`].
///
/// Passing a null pointer is a no-op.  `len` must be the length the library
/// reported for this array.
///
/// # Safety
///
/// `ptr` must be null or an array previously returned by a `valbar_*`
/// function, paired with its reported length, and not already freed.
#[no_mangle]
pub unsafe extern "C" fn valbar_i64_array_free(ptr: *mut i64, len: usize) {
    if !ptr.is_null() {
        drop(unsafe { Box::from_raw(std::ptr::slice_from_raw_parts_mut(ptr, len)) });
    }
}

/// Returns the error message from the most recent failed call on this
/// thread, or null if the most recent call succeeded.
///
/// The pointer stays valid until the next `valbar_*` call on the same
/// thread; do not free it.
#[no_mangle]
pub extern "C" fn valbar_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}
