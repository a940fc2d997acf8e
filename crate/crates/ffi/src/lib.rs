//! C ABI over `besov_tree`.
//!
//! Objects are opaque heap handles released with the matching `bt_*_free`.
//! Every fallible call returns a [`BtStatus`]; on failure the message is
//! available from [`bt_last_error`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use besov_tree::boundary_space::{
    double_integral_energy, dyadic_energy, lp_norm, AlphaSequence, BoundaryFn,
};
use besov_tree::extension_ops::{alpha_extend, gagliardo_extend, whitney_extend};
use besov_tree::io::{read_boundary, write_boundary};
use besov_tree::tree_functions::{newtonian_norm, trace, TreeFn};
use besov_tree::{Error, SpaceParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    ShapeMismatch = 3,
    InvalidArgument = 4,
    DepthTooSmall = 5,
    Io = 6,
    Parse = 7,
    Numerical = 8,
    Panic = 9,
}

pub struct BtParams(SpaceParams);
pub struct BtBoundary(BoundaryFn);
pub struct BtTree(TreeFn);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BtStatus {
    match e {
        Error::InvalidParams(_) | Error::Config { .. } | Error::NonPositiveLambda(_) => {
            BtStatus::InvalidParams
        }
        Error::DepthMismatch { .. } | Error::BranchingMismatch { .. } | Error::WrongLength { .. } => {
            BtStatus::ShapeMismatch
        }
        Error::DepthTooSmall(_) => BtStatus::DepthTooSmall,
        Error::Io { .. } => BtStatus::Io,
        Error::Parse(_) => BtStatus::Parse,
        Error::InvalidInterval { .. } | Error::QuadratureFailed { .. } => BtStatus::Numerical,
        _ => BtStatus::InvalidArgument,
    }
}

struct Fail(BtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BtStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> BtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BtStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BtStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_f64(out: *mut f64, value: f64) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| Fail(BtStatus::InvalidArgument, "path is not UTF-8".into()))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library.
#[no_mangle]
pub extern "C" fn bt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn bt_params_new(
    k: usize,
    eps: f64,
    beta: f64,
    lambda: f64,
    p: f64,
    depth: usize,
    out: *mut *mut BtParams,
) -> BtStatus {
    guard(|| put(out, BtParams(SpaceParams::new(k, eps, beta, lambda, p, depth)?)))
}

/// Reads a `key=value` config file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bt_params_load(path: *const c_char, out: *mut *mut BtParams) -> BtStatus {
    guard(|| put(out, BtParams(SpaceParams::load(path_arg(path)?)?)))
}

/// Copy of `params` with an explicit smoothness `theta`.
///
/// # Safety
/// `params` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_params_with_theta(
    params: *const BtParams,
    theta: f64,
    out: *mut *mut BtParams,
) -> BtStatus {
    guard(|| {
        let pr = get(params, "params")?;
        put(out, BtParams(pr.0.with_theta(theta)?))
    })
}

/// # Safety
/// `params` must come from this library (or be null) and not be used again.
#[no_mangle]
pub unsafe extern "C" fn bt_params_free(params: *mut BtParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// A boundary function from `K^N` cell values.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_boundary_new(
    k: usize,
    depth: usize,
    values: *const f64,
    len: usize,
    out: *mut *mut BtBoundary,
) -> BtStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        put(out, BtBoundary(BoundaryFn::new(k, depth, v)?))
    })
}

/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bt_boundary_read(path: *const c_char, out: *mut *mut BtBoundary) -> BtStatus {
    guard(|| put(out, BtBoundary(read_boundary(path_arg(path)?)?)))
}

/// # Safety
/// `f` must come from this library and `path` be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bt_boundary_write(f: *const BtBoundary, path: *const c_char) -> BtStatus {
    guard(|| Ok(write_boundary(path_arg(path)?, &get(f, "boundary")?.0)?))
}

/// Number of cells, or 0 for a null handle.
///
/// # Safety
/// `f` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn bt_boundary_len(f: *const BtBoundary) -> usize {
    f.as_ref().map_or(0, |f| f.0.values().len())
}

/// Copies the cell values into `buf`, which must hold exactly
/// `bt_boundary_len(f)` doubles.
///
/// # Safety
/// `f` must come from this library; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bt_boundary_values(f: *const BtBoundary, buf: *mut f64, len: usize) -> BtStatus {
    guard(|| {
        let v = get(f, "boundary")?.0.values();
        if buf.is_null() {
            return Err(null("buffer"));
        }
        if len != v.len() {
            return Err(Error::WrongLength {
                expected: v.len(),
                got: len,
            }
            .into());
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(v);
        Ok(())
    })
}

/// # Safety
/// `f` must come from this library (or be null) and not be used again.
#[no_mangle]
pub unsafe extern "C" fn bt_boundary_free(f: *mut BtBoundary) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Dyadic energy with the `θ`, `λ`, `p` of `params`.
///
/// # Safety
/// Handles must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_dyadic_energy(
    f: *const BtBoundary,
    params: *const BtParams,
    out: *mut f64,
) -> BtStatus {
    guard(|| put_f64(out, dyadic_energy(&get(f, "boundary")?.0, &get(params, "params")?.0).total))
}

/// Pairwise energy with the `θ`, `p` of `params`.
///
/// # Safety
/// Handles must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_double_integral_energy(
    f: *const BtBoundary,
    params: *const BtParams,
    out: *mut f64,
) -> BtStatus {
    guard(|| {
        let e = double_integral_energy(&get(f, "boundary")?.0, &get(params, "params")?.0);
        put_f64(out, e.total)
    })
}

/// # Safety
/// `f` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_lp_norm(f: *const BtBoundary, p: f64, out: *mut f64) -> BtStatus {
    guard(|| {
        if !(p >= 1.0) {
            return Err(Fail(BtStatus::InvalidArgument, format!("p must be at least 1, got {p}")));
        }
        put_f64(out, lp_norm(&get(f, "boundary")?.0, p))
    })
}

/// # Safety
/// Handles must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_whitney_extend(
    f: *const BtBoundary,
    params: *const BtParams,
    out: *mut *mut BtTree,
) -> BtStatus {
    guard(|| put(out, BtTree(whitney_extend(&get(f, "boundary")?.0, &get(params, "params")?.0))))
}

/// Extension along the levels `α(n) = base^n`.
///
/// # Safety
/// Handles must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_alpha_extend(
    f: *const BtBoundary,
    base: usize,
    params: *const BtParams,
    out: *mut *mut BtTree,
) -> BtStatus {
    guard(|| {
        let f = &get(f, "boundary")?.0;
        let a = AlphaSequence::powers(base, f.depth())?;
        put(out, BtTree(alpha_extend(f, &a, &get(params, "params")?.0)))
    })
}

/// The layered (non-linear) extension. Needs `p = (β − log K)/ε`.
///
/// # Safety
/// Handles must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_gagliardo_extend(
    f: *const BtBoundary,
    params: *const BtParams,
    out: *mut *mut BtTree,
) -> BtStatus {
    guard(|| {
        let (u, _) = gagliardo_extend(&get(f, "boundary")?.0, &get(params, "params")?.0)?;
        put(out, BtTree(u))
    })
}

/// Deepest-level values of `u`.
///
/// # Safety
/// `u` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_trace(u: *const BtTree, out: *mut *mut BtBoundary) -> BtStatus {
    guard(|| put(out, BtBoundary(trace(&get(u, "tree")?.0))))
}

/// Depth of `u`, or 0 for a null handle.
///
/// # Safety
/// `u` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn bt_tree_depth(u: *const BtTree) -> usize {
    u.as_ref().map_or(0, |u| u.0.depth())
}

/// `L^p` part, gradient part and their sum; any output may be null.
///
/// # Safety
/// Handles must come from this library; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_newtonian_norm(
    u: *const BtTree,
    params: *const BtParams,
    lp_part: *mut f64,
    gradient_part: *mut f64,
    total: *mut f64,
) -> BtStatus {
    guard(|| {
        let n = newtonian_norm(&get(u, "tree")?.0, &get(params, "params")?.0)?;
        for (slot, v) in [(lp_part, n.lp_part), (gradient_part, n.gradient_part), (total, n.total)] {
            if !slot.is_null() {
                *slot = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `u` must come from this library (or be null) and not be used again.
#[no_mangle]
pub unsafe extern "C" fn bt_tree_free(u: *mut BtTree) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}
