//! C ABI over `fdblock`.
//!
//! Encodings are opaque heap handles created by [`fdb_encoding_new`] and
//! released with [`fdb_encoding_free`]. Fallible calls return an
//! [`FdbStatus`]; on failure [`fdb_last_error`] holds a message for the
//! calling thread until its next failing call. No function unwinds across the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fdblock::analysis::{extract_block, success_probability, verify_block_pattern, Route};
use fdblock::encodings::{BlockEncoding, Operator};
use fdblock::operators::GridFunction;
use fdblock::resources::count_resources;
use fdblock::{ComplexVector, Error, GridSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeLimit = 3,
    BufferTooSmall = 4,
    Model = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdbOperator {
    /// Laplacian on a `dim`-dimensional grid.
    Laplace = 0,
    /// 1-D Laplacian through the rotation-based LCU circuit.
    Lcu = 1,
    Derivative = 2,
    Gradient = 3,
    Divergence = 4,
    Wave = 5,
}

/// Opaque encoding handle.
pub struct FdbEncoding {
    inner: BlockEncoding,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FdbGateCounts {
    pub t_count: usize,
    pub clifford_count: usize,
    pub rotation_count: usize,
    pub ancilla_high_water: usize,
    pub qubit_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: FdbStatus, msg: impl Into<String>) -> FdbStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> FdbStatus {
    let status = match e {
        Error::Size(_) => FdbStatus::SizeLimit,
        Error::Model(_) => FdbStatus::Model,
        _ => FdbStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`FdbStatus::Internal`].
fn guard(f: impl FnOnce() -> FdbStatus) -> FdbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(FdbStatus::Internal, "internal panic"),
    }
}

unsafe fn handle<'a>(e: *const FdbEncoding) -> Option<&'a BlockEncoding> {
    e.as_ref().map(|h| &h.inner)
}

/// Message for the last failing call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fdb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds an encoding. `dim` is read for [`FdbOperator::Laplace`] only.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_new(
    op: FdbOperator,
    dim: usize,
    n: usize,
    out: *mut *mut FdbEncoding,
) -> FdbStatus {
    guard(|| {
        if out.is_null() {
            return fail(FdbStatus::NullPointer, "out is null");
        }
        let operator = match op {
            FdbOperator::Laplace => Operator::Laplace { dim, n },
            FdbOperator::Lcu => Operator::LaplaceLcu { n },
            FdbOperator::Derivative => Operator::Derivative { n },
            FdbOperator::Gradient => Operator::Gradient { n },
            FdbOperator::Divergence => Operator::Divergence { n },
            FdbOperator::Wave => Operator::Wave { n },
        };
        match operator.build() {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FdbEncoding { inner }));
                FdbStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `e` must be null or a handle from [`fdb_encoding_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_free(e: *mut FdbEncoding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Sub-normalization `alpha`; NaN for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_alpha(e: *const FdbEncoding) -> f64 {
    handle(e).map_or(f64::NAN, |e| e.alpha)
}

/// Ancilla qubit count `m`; 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_ancillas(e: *const FdbEncoding) -> usize {
    handle(e).map_or(0, |e| e.ancillas)
}

/// System dimension `N_D`; 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_system_dim(e: *const FdbEncoding) -> usize {
    handle(e).map_or(0, |e| e.system_dim)
}

/// Total circuit width; 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_num_qubits(e: *const FdbEncoding) -> usize {
    handle(e).map_or(0, |e| e.num_qubits())
}

/// Checks every reference block at tolerance `tol`.
///
/// # Safety
/// `e` must be a live handle; `max_deviation` and `passed` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_verify(
    e: *const FdbEncoding,
    tol: f64,
    max_deviation: *mut f64,
    passed: *mut bool,
) -> FdbStatus {
    guard(|| {
        let Some(enc) = handle(e) else {
            return fail(FdbStatus::NullPointer, "encoding is null");
        };
        match verify_block_pattern(enc, tol) {
            Ok(r) => {
                if let Some(d) = max_deviation.as_mut() {
                    *d = r.max_deviation.max(r.unitarity_residual);
                }
                if let Some(p) = passed.as_mut() {
                    *p = r.passed;
                }
                FdbStatus::Ok
            }
            Err(err) => from_error(err),
        }
    })
}

/// Success probability for the real samples `values[0..len]`, normalized
/// internally, via circuit simulation.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdb_success_probability(
    e: *const FdbEncoding,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> FdbStatus {
    guard(|| {
        let Some(enc) = handle(e) else {
            return fail(FdbStatus::NullPointer, "encoding is null");
        };
        if values.is_null() || out.is_null() {
            return fail(FdbStatus::NullPointer, "values or out is null");
        }
        if len != enc.system_dim {
            return fail(
                FdbStatus::InvalidArgument,
                format!("{len} samples for system dim {}", enc.system_dim),
            );
        }
        let samples = std::slice::from_raw_parts(values, len);
        let norm = samples.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return fail(FdbStatus::InvalidArgument, "samples must be finite and not all zero");
        }
        let op = enc.operator;
        let spec = match GridSpec::new(op.dim(), op.n()) {
            Ok(s) if s.total_points() == len => s,
            Ok(_) => {
                return fail(
                    FdbStatus::InvalidArgument,
                    "success probability needs a scalar-field encoding",
                )
            }
            Err(err) => return from_error(err),
        };
        let normalized: Vec<f64> = samples.iter().map(|x| x / norm).collect();
        let v = match ComplexVector::from_real(&normalized) {
            Ok(values) => GridFunction {
                spec,
                values,
                raw_norm: norm,
            },
            Err(err) => return from_error(err),
        };
        match success_probability(enc, &v, Route::Circuit) {
            Ok(p) => {
                *out = p;
                FdbStatus::Ok
            }
            Err(err) => from_error(err),
        }
    })
}

/// Copies block `(row, col)` into `buf` as row-major interleaved `(re, im)`
/// pairs, `2 N_D^2` doubles in all.
///
/// # Safety
/// `buf` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_block(
    e: *const FdbEncoding,
    row: usize,
    col: usize,
    buf: *mut f64,
    capacity: usize,
) -> FdbStatus {
    guard(|| {
        let Some(enc) = handle(e) else {
            return fail(FdbStatus::NullPointer, "encoding is null");
        };
        if buf.is_null() {
            return fail(FdbStatus::NullPointer, "buf is null");
        }
        let needed = 2 * enc.system_dim * enc.system_dim;
        if capacity < needed {
            return fail(
                FdbStatus::BufferTooSmall,
                format!("block needs {needed} doubles, got {capacity}"),
            );
        }
        match extract_block(enc, row, col) {
            Ok(b) => {
                let dst = std::slice::from_raw_parts_mut(buf, needed);
                for (pair, z) in dst.chunks_exact_mut(2).zip(b.as_slice()) {
                    pair[0] = z.re;
                    pair[1] = z.im;
                }
                FdbStatus::Ok
            }
            Err(err) => from_error(err),
        }
    })
}

/// The circuit in text form. Free the string with [`fdb_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_export(e: *const FdbEncoding, out: *mut *mut c_char) -> FdbStatus {
    guard(|| {
        let Some(enc) = handle(e) else {
            return fail(FdbStatus::NullPointer, "encoding is null");
        };
        if out.is_null() {
            return fail(FdbStatus::NullPointer, "out is null");
        }
        match CString::new(enc.circuit.to_string()) {
            Ok(s) => {
                *out = s.into_raw();
                FdbStatus::Ok
            }
            Err(_) => fail(FdbStatus::Internal, "circuit text contains NUL"),
        }
    })
}

/// Releases a string from this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fdb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Clifford+T counts for the encoding circuit.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdb_encoding_resources(e: *const FdbEncoding, out: *mut FdbGateCounts) -> FdbStatus {
    guard(|| {
        let Some(enc) = handle(e) else {
            return fail(FdbStatus::NullPointer, "encoding is null");
        };
        if out.is_null() {
            return fail(FdbStatus::NullPointer, "out is null");
        }
        match count_resources(&enc.circuit) {
            Ok(c) => {
                *out = FdbGateCounts {
                    t_count: c.t_count,
                    clifford_count: c.clifford_count,
                    rotation_count: c.rotation_count,
                    ancilla_high_water: c.ancilla_high_water,
                    qubit_count: c.qubit_count,
                };
                FdbStatus::Ok
            }
            Err(err) => from_error(err),
        }
    })
}

/// Reads the last error as an owned string; test and binding helper.
pub fn last_error_message() -> Option<String> {
    let p = fdb_last_error();
    if p.is_null() {
        None
    } else {
        // SAFETY: non-null pointers come from the thread-local CString.
        Some(unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
    }
}
