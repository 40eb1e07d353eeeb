//! C ABI over `subsetspace`.
//!
//! Sets and paths are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`SsStatus`]; on failure the
//! message is available from [`ss_last_error_message`] on the same thread.
//! Strings handed out by the library are released with [`ss_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use subsetspace::path::QuasiPath;
use subsetspace::selector::SelectorConfig;
use subsetspace::{Error, FSet, FlowConfig, NormSpec};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Domain = 4,
    Capacity = 5,
    Precondition = 6,
    NonConvergence = 7,
    Parse = 8,
    Panic = 9,
}

/// A finite set of points with its ambient cardinality bound and norm.
pub struct SsFSet(FSet);

/// A piecewise-linear path of finite sets.
pub struct SsPath(QuasiPath);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SsStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::SpecMismatch(_) => SsStatus::DimensionMismatch,
        Error::Domain(_) | Error::NonUniqueFunctional(_) => SsStatus::Domain,
        Error::Capacity { .. } => SsStatus::Capacity,
        Error::Precondition(_) => SsStatus::Precondition,
        Error::NonConvergence(_) => SsStatus::NonConvergence,
        Error::Json(_) | Error::Csv(_) => SsStatus::Parse,
        _ => SsStatus::InvalidArgument,
    }
}

struct Fail(SsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SsStatus::Panic
        }
    }
}

unsafe fn fset<'a>(p: *const SsFSet, what: &str) -> Result<&'a FSet, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null(what))
}

unsafe fn path<'a>(p: *const SsPath, what: &str) -> Result<&'a QuasiPath, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_fset(out: *mut *mut SsFSet, x: FSet) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(SsFSet(x))))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(SsStatus::Parse, e.to_string()))?;
    put(out, c.into_raw())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null("string"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail(SsStatus::Parse, e.to_string()))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a set from `count` points stored row-major in `coords`
/// (`count * dim` doubles). `p` may be `INFINITY`. Duplicates are merged.
///
/// # Safety
/// `coords` must point to `count * dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_fset_new(coords: *const f64, count: usize, dim: usize, n: usize, p: f64, out: *mut *mut SsFSet) -> SsStatus {
    guard(|| {
        if coords.is_null() {
            return Err(null("coords"));
        }
        let total = count.checked_mul(dim).ok_or_else(|| Fail(SsStatus::InvalidArgument, "size overflow".into()))?;
        let flat = std::slice::from_raw_parts(coords, total);
        let spec = NormSpec::new(p, dim)?;
        let rows: Vec<&[f64]> = if dim == 0 { Vec::new() } else { flat.chunks(dim).collect() };
        put_fset(out, FSet::from_coords(&rows, n, spec)?)
    })
}

/// # Safety
/// `x` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_fset_free(x: *mut SsFSet) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Number of distinct points; 0 for a null handle.
///
/// # Safety
/// `x` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_fset_len(x: *const SsFSet) -> usize {
    x.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `x` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_fset_dim(x: *const SsFSet) -> usize {
    x.as_ref().map_or(0, |s| s.0.dim())
}

/// The cardinality bound `n` of the space `X(n)` the set lives in.
///
/// # Safety
/// `x` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_fset_ambient_n(x: *const SsFSet) -> usize {
    x.as_ref().map_or(0, |s| s.0.ambient_n())
}

/// Copies the points row-major into `buf`, which must hold `len * dim` doubles.
///
/// # Safety
/// `buf` must point to `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ss_fset_points(x: *const SsFSet, buf: *mut f64, buf_len: usize) -> SsStatus {
    guard(|| {
        let x = fset(x, "set")?;
        if buf.is_null() {
            return Err(null("buffer"));
        }
        let need = x.len() * x.dim();
        if buf_len < need {
            return Err(Fail(SsStatus::InvalidArgument, format!("buffer holds {buf_len} values, need {need}")));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (dst, v) in out.iter_mut().zip(x.points().iter().flat_map(|p| p.iter())) {
            *dst = *v;
        }
        Ok(())
    })
}

/// Parses `{"n": .., "p": .., "points": [[..], ..]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_fset_from_json(json: *const c_char, out: *mut *mut SsFSet) -> SsStatus {
    guard(|| {
        let x: FSet = serde_json::from_str(read_str(json)?).map_err(Error::from)?;
        put_fset(out, x)
    })
}

/// # Safety
/// `x` must be a live handle; `out` must be writable. Free the result with `ss_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ss_fset_to_json(x: *const SsFSet, out: *mut *mut c_char) -> SsStatus {
    guard(|| put_string(out, serde_json::to_string(fset(x, "set")?).map_err(Error::from)?))
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `x`, `y` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_hausdorff(x: *const SsFSet, y: *const SsFSet, out: *mut f64) -> SsStatus {
    guard(|| put(out, subsetspace::hausdorff(fset(x, "x")?, fset(y, "y")?)?))
}

/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_diam(x: *const SsFSet, out: *mut f64) -> SsStatus {
    guard(|| put(out, subsetspace::diam(fset(x, "set")?)))
}

/// Minimum pairwise distance; 0 when the set has fewer than `n` points.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_min_sep(x: *const SsFSet, out: *mut f64) -> SsStatus {
    guard(|| put(out, subsetspace::min_sep(fset(x, "set")?)))
}

/// Hausdorff distance from the set to the subspace of sets with at most two points.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dist_to_x2(x: *const SsFSet, out: *mut f64) -> SsStatus {
    guard(|| {
        let x = fset(x, "set")?;
        if x.len() > subsetspace::two_center::MAX_POINTS {
            return Err(Fail(
                SsStatus::Capacity,
                format!("two-center search supports at most {} points", subsetspace::two_center::MAX_POINTS),
            ));
        }
        put(out, subsetspace::dist_to_x2(x).radius)
    })
}

/// Averaging retraction of `X(2)` onto singletons.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_r2(x: *const SsFSet, out: *mut *mut SsFSet) -> SsStatus {
    guard(|| put_fset(out, subsetspace::r2(fset(x, "set")?)?))
}

/// Lipschitz retraction `X(3) -> X(2)`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_r3(x: *const SsFSet, out: *mut *mut SsFSet) -> SsStatus {
    guard(|| put_fset(out, subsetspace::r3(fset(x, "set")?)?))
}

/// Lipschitz retraction `X(n) -> X(2)` with thinness parameter `tau > 6`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_rn2(x: *const SsFSet, tau: f64, sphere_samples: usize, out: *mut *mut SsFSet) -> SsStatus {
    guard(|| {
        let cfg = SelectorConfig::new(sphere_samples, 0)?;
        put_fset(out, subsetspace::rn2(fset(x, "set")?, tau, &cfg)?)
    })
}

/// Steiner-point selector as a map into singletons.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_selector(x: *const SsFSet, sphere_samples: usize, out: *mut *mut SsFSet) -> SsStatus {
    guard(|| {
        let cfg = SelectorConfig::new(sphere_samples, 0)?;
        put_fset(out, subsetspace::selector_retraction(fset(x, "set")?, &cfg))
    })
}

/// Collision-flow retraction `X(n) -> X(n-1)`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_holder(x: *const SsFSet, eps_coll: f64, out: *mut *mut SsFSet) -> SsStatus {
    guard(|| {
        let cfg = FlowConfig { eps_coll, ..FlowConfig::default() };
        cfg.validate()?;
        put_fset(out, subsetspace::holder_retraction(fset(x, "set")?, &cfg)?)
    })
}

unsafe fn put_path(out: *mut *mut SsPath, p: QuasiPath) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(SsPath(p))))
}

/// Two-leg path through a midpoint set, with modulus `2 d_H(x, y)`.
///
/// # Safety
/// `x`, `y` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_quasigeodesic(x: *const SsFSet, y: *const SsFSet, out: *mut *mut SsPath) -> SsStatus {
    guard(|| put_path(out, subsetspace::quasigeodesic(fset(x, "x")?, fset(y, "y")?)?))
}

/// Geodesic in the larger space `X(max(|x|, |y|, |x| + |y| - 2))`.
///
/// # Safety
/// `x`, `y` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_geodesic(x: *const SsFSet, y: *const SsFSet, out: *mut *mut SsPath) -> SsStatus {
    guard(|| put_path(out, subsetspace::geodesic_in_larger(fset(x, "x")?, fset(y, "y")?)?))
}

/// # Safety
/// `p` must be a live path handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_path_eval(p: *const SsPath, t: f64, out: *mut *mut SsFSet) -> SsStatus {
    guard(|| put_fset(out, path(p, "path")?.eval(t)?))
}

/// Sum of Hausdorff steps over a uniform grid of `intervals` pieces.
///
/// # Safety
/// `p` must be a live path handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_path_length(p: *const SsPath, intervals: usize, out: *mut f64) -> SsStatus {
    guard(|| put(out, subsetspace::path_length(path(p, "path")?, intervals)?))
}

/// # Safety
/// `p` must be a live path handle; `out` must be writable. Free the result with `ss_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ss_path_to_json(p: *const SsPath, out: *mut *mut c_char) -> SsStatus {
    guard(|| put_string(out, serde_json::to_string(path(p, "path")?).map_err(Error::from)?))
}

/// # Safety
/// `p` must be null or a path handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_path_free(p: *mut SsPath) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}
