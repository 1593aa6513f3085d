//! C ABI for the spectral laboratory.
//!
//! the surface is a set of `speclab_`-prefixed functions over one opaque
//! handle type. every fallible call returns a [`SpeclabStatus`]; on any
//! status other than `Ok` a human-readable detail is stored in a
//! thread-local slot readable through [`speclab_last_error_message`]. the
//! companion header `include/speclab.h` is regenerated on every build.
//!
//! ownership rules: handles returned through `SpeclabMatrix**` out-params
//! belong to the caller and must be released with [`speclab_matrix_free`];
//! strings returned through `char**` out-params must be released with
//! [`speclab_string_free`]. pointers returned by [`speclab_version`] and
//! [`speclab_last_error_message`] are borrowed and must not be freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use speclab::contours::CirclePath;
use speclab::contours::SeparationPath;
use speclab::groups::{integrated_group, GroupsError};
use speclab::models::bundled_models;
use speclab::numerics::{mat_exp, op_norm, ComplexMatrix};
use speclab::projectors::{riesz_projector, separation_operator};
use speclab::spectra::{diophantine_constant, SpectraError};

/// opaque complex-matrix handle. create with [`speclab_matrix_create`],
/// [`speclab_matrix_from_json`], or [`speclab_bundled_model_matrix`];
/// release with [`speclab_matrix_free`].
pub struct SpeclabMatrix {
    inner: ComplexMatrix,
}

/// status code returned by every fallible function. anything other than
/// `Ok` leaves a detail message in [`speclab_last_error_message`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeclabStatus {
    /// the call succeeded.
    Ok = 0,
    /// a required pointer argument was null.
    NullArgument = 1,
    /// an argument was out of range or structurally invalid.
    InvalidArgument = 2,
    /// textual input could not be parsed.
    ParseError = 3,
    /// the computation itself failed (singularity, contour through the
    /// spectrum, rational shape parameter, ...).
    NumericalError = 4,
    /// an index was outside the matrix dimensions.
    IndexOutOfBounds = 5,
    /// an internal invariant broke; the library caught the panic at the
    /// boundary instead of unwinding into C.
    InternalPanic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> =
        RefCell::new(CString::new("").expect("the empty string holds no NUL"));
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL bytes were replaced");
    });
}

fn fail(status: SpeclabStatus, message: impl AsRef<str>) -> SpeclabStatus {
    set_error(message.as_ref());
    status
}

/// run a body behind a panic guard so no unwind crosses the C boundary.
fn guarded(body: impl FnOnce() -> SpeclabStatus) -> SpeclabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let detail = panic
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unidentified panic".to_string());
            fail(SpeclabStatus::InternalPanic, detail)
        }
    }
}

macro_rules! nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            return fail(
                SpeclabStatus::NullArgument,
                concat!(stringify!($ptr), " must not be null"),
            );
        }
    };
}

fn into_handle(inner: ComplexMatrix) -> *mut SpeclabMatrix {
    Box::into_raw(Box::new(SpeclabMatrix { inner }))
}

/// # Safety
/// `ptr` must be a live handle produced by this library.
unsafe fn matrix_ref<'a>(ptr: *const SpeclabMatrix) -> &'a ComplexMatrix {
    &(*ptr).inner
}

/// library version as a static, NUL-terminated string. never null; do not
/// free.
#[no_mangle]
pub extern "C" fn speclab_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// detail message of the most recent failure on the calling thread. the
/// pointer stays valid until the next failing call on the same thread; do
/// not free. the message is empty when no failure happened yet.
#[no_mangle]
pub extern "C" fn speclab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// build a matrix from row-major interleaved data `[re00, im00, re01,
/// im01, ...]` of length `2 * rows * cols`. every entry must be finite.
#[no_mangle]
pub extern "C" fn speclab_matrix_create(
    rows: usize,
    cols: usize,
    interleaved: *const f64,
    out: *mut *mut SpeclabMatrix,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(interleaved);
        nonnull!(out);
        if rows == 0 || cols == 0 {
            return fail(SpeclabStatus::InvalidArgument, "rows and cols must be positive");
        }
        let len = match rows.checked_mul(cols).and_then(|n| n.checked_mul(2)) {
            Some(len) => len,
            None => return fail(SpeclabStatus::InvalidArgument, "rows * cols overflows"),
        };
        let entries = unsafe { std::slice::from_raw_parts(interleaved, len) };
        let data: Vec<Complex64> = entries
            .chunks_exact(2)
            .map(|pair| Complex64::new(pair[0], pair[1]))
            .collect();
        match ComplexMatrix::from_data(rows, cols, data) {
            Ok(matrix) => {
                unsafe { *out = into_handle(matrix) };
                SpeclabStatus::Ok
            }
            Err(err) => fail(SpeclabStatus::InvalidArgument, err.to_string()),
        }
    })
}

/// parse a matrix from the JSON wire format
/// `{"rows": r, "cols": c, "data": [[re, im], ...]}`.
#[no_mangle]
pub extern "C" fn speclab_matrix_from_json(
    text: *const c_char,
    out: *mut *mut SpeclabMatrix,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(text);
        nonnull!(out);
        let text = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(text) => text,
            Err(_) => return fail(SpeclabStatus::ParseError, "matrix JSON must be utf-8"),
        };
        match ComplexMatrix::from_json_str(text) {
            Ok(matrix) => {
                unsafe { *out = into_handle(matrix) };
                SpeclabStatus::Ok
            }
            Err(err) => fail(SpeclabStatus::ParseError, err.to_string()),
        }
    })
}

/// serialize a matrix to the JSON wire format. the returned string must be
/// released with [`speclab_string_free`].
#[no_mangle]
pub extern "C" fn speclab_matrix_to_json(
    matrix: *const SpeclabMatrix,
    out: *mut *mut c_char,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(matrix);
        nonnull!(out);
        let json = unsafe { matrix_ref(matrix) }.to_json_string();
        match CString::new(json) {
            Ok(cstring) => {
                unsafe { *out = cstring.into_raw() };
                SpeclabStatus::Ok
            }
            Err(_) => fail(SpeclabStatus::InternalPanic, "serialized JSON held a NUL byte"),
        }
    })
}

/// release a string returned by this library. null is ignored.
#[no_mangle]
pub extern "C" fn speclab_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

/// release a matrix handle. null is ignored.
#[no_mangle]
pub extern "C" fn speclab_matrix_free(matrix: *mut SpeclabMatrix) {
    if !matrix.is_null() {
        drop(unsafe { Box::from_raw(matrix) });
    }
}

/// number of rows.
#[no_mangle]
pub extern "C" fn speclab_matrix_rows(
    matrix: *const SpeclabMatrix,
    out: *mut usize,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(matrix);
        nonnull!(out);
        unsafe { *out = matrix_ref(matrix).rows() };
        SpeclabStatus::Ok
    })
}

/// number of columns.
#[no_mangle]
pub extern "C" fn speclab_matrix_cols(
    matrix: *const SpeclabMatrix,
    out: *mut usize,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(matrix);
        nonnull!(out);
        unsafe { *out = matrix_ref(matrix).cols() };
        SpeclabStatus::Ok
    })
}

/// read entry (i, j) into `re`/`im` (either may be null to skip it).
#[no_mangle]
pub extern "C" fn speclab_matrix_get(
    matrix: *const SpeclabMatrix,
    i: usize,
    j: usize,
    re: *mut f64,
    im: *mut f64,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(matrix);
        let m = unsafe { matrix_ref(matrix) };
        if i >= m.rows() || j >= m.cols() {
            return fail(
                SpeclabStatus::IndexOutOfBounds,
                format!("entry ({i}, {j}) outside a {}x{} matrix", m.rows(), m.cols()),
            );
        }
        let value = m.get(i, j);
        if !re.is_null() {
            unsafe { *re = value.re };
        }
        if !im.is_null() {
            unsafe { *im = value.im };
        }
        SpeclabStatus::Ok
    })
}

/// matrix of a bundled operator model, looked up by name (for example
/// "diagonal-simple", "jordan-two", "mixed-sign-six").
#[no_mangle]
pub extern "C" fn speclab_bundled_model_matrix(
    name: *const c_char,
    out: *mut *mut SpeclabMatrix,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(name);
        nonnull!(out);
        let name = match unsafe { CStr::from_ptr(name) }.to_str() {
            Ok(name) => name,
            Err(_) => return fail(SpeclabStatus::ParseError, "model name must be utf-8"),
        };
        let bundled = bundled_models();
        match bundled.into_iter().find(|(n, _)| *n == name) {
            Some((_, model)) => {
                unsafe { *out = into_handle(model.matrix) };
                SpeclabStatus::Ok
            }
            None => fail(
                SpeclabStatus::InvalidArgument,
                format!("no bundled model named {name:?}"),
            ),
        }
    })
}

/// spectral operator norm (largest singular value).
#[no_mangle]
pub extern "C" fn speclab_op_norm(matrix: *const SpeclabMatrix, out: *mut f64) -> SpeclabStatus {
    guarded(|| {
        nonnull!(matrix);
        nonnull!(out);
        unsafe { *out = op_norm(matrix_ref(matrix)) };
        SpeclabStatus::Ok
    })
}

/// matrix exponential exp(A) of a square matrix.
#[no_mangle]
pub extern "C" fn speclab_mat_exp(
    matrix: *const SpeclabMatrix,
    out: *mut *mut SpeclabMatrix,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(matrix);
        nonnull!(out);
        let a = unsafe { matrix_ref(matrix) };
        if !a.is_square() {
            return fail(SpeclabStatus::InvalidArgument, "the exponential needs a square matrix");
        }
        match mat_exp(a) {
            Ok(result) => {
                unsafe { *out = into_handle(result) };
                SpeclabStatus::Ok
            }
            Err(err) => fail(SpeclabStatus::NumericalError, err.to_string()),
        }
    })
}

/// spectral projector of `a` for the eigenvalues enclosed by the circle
/// around `center_re + center_im·i` with the given radius, integrated on
/// `nodes` trapezoid nodes (0 picks the default, 64). `idempotence_defect`,
/// `trace_re`, and `trace_im` may each be null to skip that diagnostic.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn speclab_riesz_projector(
    a: *const SpeclabMatrix,
    center_re: f64,
    center_im: f64,
    radius: f64,
    nodes: usize,
    projector: *mut *mut SpeclabMatrix,
    idempotence_defect: *mut f64,
    trace_re: *mut f64,
    trace_im: *mut f64,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(a);
        nonnull!(projector);
        let a = unsafe { matrix_ref(a) };
        if !a.is_square() {
            return fail(SpeclabStatus::InvalidArgument, "the projector needs a square matrix");
        }
        let nodes = if nodes == 0 { 64 } else { nodes };
        let path = match CirclePath::new(Complex64::new(center_re, center_im), radius, nodes) {
            Ok(path) => path,
            Err(err) => return fail(SpeclabStatus::InvalidArgument, err.to_string()),
        };
        match riesz_projector(a, &path) {
            Ok(result) => {
                if !idempotence_defect.is_null() {
                    unsafe { *idempotence_defect = result.idempotence_defect };
                }
                if !trace_re.is_null() {
                    unsafe { *trace_re = result.trace.re };
                }
                if !trace_im.is_null() {
                    unsafe { *trace_im = result.trace.im };
                }
                unsafe { *projector = into_handle(result.matrix) };
                SpeclabStatus::Ok
            }
            Err(err) => fail(SpeclabStatus::NumericalError, err.to_string()),
        }
    })
}

/// the `order`-times integrated group S_order(t) of the square matrix `a`,
/// evaluated through the block-exponential.
#[no_mangle]
pub extern "C" fn speclab_integrated_group(
    a: *const SpeclabMatrix,
    order: usize,
    t: f64,
    out: *mut *mut SpeclabMatrix,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(a);
        nonnull!(out);
        match integrated_group(unsafe { matrix_ref(a) }, order, t) {
            Ok(result) => {
                unsafe { *out = into_handle(result) };
                SpeclabStatus::Ok
            }
            Err(err @ GroupsError::InvalidParameter { .. }) => {
                fail(SpeclabStatus::InvalidArgument, err.to_string())
            }
            Err(err) => fail(SpeclabStatus::NumericalError, err.to_string()),
        }
    })
}

/// half-plane separation composite ℙ·A^(−m−1) over the split contour.
/// nonpositive `cut_radius`/`outer_radius` and zero node counts pick the
/// defaults (1e-7, 1e4, 768, 64). `truncation_estimate` may be null.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn speclab_separation_operator(
    a: *const SpeclabMatrix,
    m: usize,
    cut_radius: f64,
    outer_radius: f64,
    segment_nodes: usize,
    arc_nodes: usize,
    out: *mut *mut SpeclabMatrix,
    truncation_estimate: *mut f64,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(a);
        nonnull!(out);
        let a = unsafe { matrix_ref(a) };
        if !a.is_square() {
            return fail(SpeclabStatus::InvalidArgument, "the separation needs a square matrix");
        }
        let cut = if cut_radius > 0.0 { cut_radius } else { 1e-7 };
        let outer = if outer_radius > 0.0 { outer_radius } else { 1e4 };
        let segments = if segment_nodes == 0 { 768 } else { segment_nodes };
        let arcs = if arc_nodes == 0 { 64 } else { arc_nodes };
        let path = match SeparationPath::new(cut, outer, segments, arcs) {
            Ok(path) => path,
            Err(err) => return fail(SpeclabStatus::InvalidArgument, err.to_string()),
        };
        match separation_operator(a, m, &path) {
            Ok(result) => {
                if !truncation_estimate.is_null() {
                    unsafe { *truncation_estimate = result.truncation_estimate };
                }
                unsafe { *out = into_handle(result.matrix) };
                SpeclabStatus::Ok
            }
            Err(err) => fail(SpeclabStatus::NumericalError, err.to_string()),
        }
    })
}

/// best observed constant in |alpha − p/q| ≥ C/q^degree over denominators
/// up to `qmax`. `p` and `q` may be null; they receive the minimizing
/// rational.
#[no_mangle]
pub extern "C" fn speclab_diophantine_constant(
    alpha: f64,
    degree: u32,
    qmax: u64,
    c_est: *mut f64,
    p: *mut i64,
    q: *mut i64,
) -> SpeclabStatus {
    guarded(|| {
        nonnull!(c_est);
        match diophantine_constant(alpha, degree, qmax) {
            Ok(estimate) => {
                unsafe { *c_est = estimate.c_est };
                if !p.is_null() {
                    unsafe { *p = estimate.p };
                }
                if !q.is_null() {
                    unsafe { *q = estimate.q };
                }
                SpeclabStatus::Ok
            }
            Err(err @ SpectraError::InvalidParameter { .. }) => {
                fail(SpeclabStatus::InvalidArgument, err.to_string())
            }
            Err(err) => fail(SpeclabStatus::NumericalError, err.to_string()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn errors_land_in_the_thread_local_slot() {
        let mut out = ptr::null_mut();
        let status = speclab_matrix_create(0, 2, [0.0].as_ptr(), &mut out);
        assert_eq!(status, SpeclabStatus::InvalidArgument);
        let message = unsafe { CStr::from_ptr(speclab_last_error_message()) };
        assert!(message.to_str().unwrap().contains("positive"));
    }

    #[test]
    fn panics_are_caught_at_the_boundary() {
        let status = guarded(|| panic!("boom {}", 7));
        assert_eq!(status, SpeclabStatus::InternalPanic);
        let message = unsafe { CStr::from_ptr(speclab_last_error_message()) };
        assert_eq!(message.to_str().unwrap(), "boom 7");
    }

    #[test]
    fn nul_bytes_in_messages_are_sanitized() {
        set_error("before\0after");
        let message = unsafe { CStr::from_ptr(speclab_last_error_message()) };
        assert_eq!(message.to_str().unwrap(), "before after");
    }
}
