//! C ABI over `lcd_reduce`.
//!
//! Mixtures cross the boundary as opaque [`LcdMixture`] handles. Every
//! fallible function returns an [`LcdStatus`]; on failure the message is
//! available from [`lcd_last_error_message`] on the same thread. Panics are
//! caught and reported as [`LcdStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lcd_reduce::distance::{distance_approx, distance_exact, DistanceConstant, DistanceReport};
use lcd_reduce::gradient::{grad_approx, KappaMode};
use lcd_reduce::optim::Status;
use lcd_reduce::reduce::{reduce, ReduceConfig};
use lcd_reduce::{DiracMixture, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidMixture = 3,
    DimensionMismatch = 4,
    BufferTooSmall = 5,
    Failed = 6,
    Panic = 7,
}

/// Coefficient of the mean term in the large-width gradient.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcdKappa {
    /// `C_b - 1`, the exact derivative.
    CbMinusOne = 0,
    /// `C_b`.
    Cb = 1,
}

/// How the optimizer stopped.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcdOptimStatus {
    Converged = 0,
    MaxIters = 1,
    LineSearchFailed = 2,
}

/// Opaque weighted point set.
pub struct LcdMixture(DiracMixture);

/// Distance with its term breakdown. `is_exact` selects the meaning of
/// `constant`: the largest kernel width when nonzero, else `C_b`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LcdDistanceReport {
    pub total: f64,
    pub d_y: f64,
    pub d_xy: f64,
    pub d_x: f64,
    pub d_e: f64,
    pub constant: f64,
    pub is_exact: u8,
}

/// Reduction settings. Obtain defaults from [`lcd_reduce_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LcdReduceConfig {
    pub target_count: usize,
    pub c_b: f64,
    pub kappa: LcdKappa,
    pub seed: u64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_tol: f64,
    pub multistart: usize,
}

/// Outcome of [`lcd_reduce`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LcdReduceResult {
    pub status: LcdOptimStatus,
    pub iterations: usize,
    pub distance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: LcdStatus, msg: impl Into<String>) -> LcdStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &Error) -> LcdStatus {
    match e {
        Error::Empty | Error::NonPositiveWeight { .. } | Error::NonFinite { .. } | Error::WeightSum { .. } => {
            LcdStatus::InvalidMixture
        }
        Error::DimensionMismatch { .. } => LcdStatus::DimensionMismatch,
        Error::InvalidArgument(_) | Error::TooManyComponents { .. } | Error::Config(_) => LcdStatus::InvalidArgument,
        Error::Stage { source, .. } => status_of(source),
        _ => LcdStatus::Failed,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), LcdStatus>) -> LcdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcdStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(LcdStatus::Panic, "internal panic"),
    }
}

fn check<T>(r: lcd_reduce::Result<T>) -> Result<T, LcdStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn handle<'a>(m: *const LcdMixture, what: &str) -> Result<&'a DiracMixture, LcdStatus> {
    m.as_ref()
        .map(|m| &m.0)
        .ok_or_else(|| fail(LcdStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, LcdStatus> {
    p.as_mut().ok_or_else(|| fail(LcdStatus::NullPointer, format!("{what} is null")))
}

fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), LcdStatus> {
    if buf.is_null() {
        return Err(fail(LcdStatus::NullPointer, "buffer is null"));
    }
    if len < src.len() {
        return Err(fail(
            LcdStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    // SAFETY: caller promises `buf` points to `len` writable doubles.
    unsafe { std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    Ok(())
}

fn report(r: DistanceReport) -> LcdDistanceReport {
    let (constant, is_exact) = match r.constant {
        DistanceConstant::ExactBmax { b_max } => (b_max, 1),
        DistanceConstant::ApproxCb { c_b } => (c_b, 0),
    };
    LcdDistanceReport {
        total: r.total,
        d_y: r.d_y,
        d_xy: r.d_xy,
        d_x: r.d_x,
        d_e: r.d_e,
        constant,
        is_exact,
    }
}

fn kappa(k: LcdKappa) -> KappaMode {
    match k {
        LcdKappa::CbMinusOne => KappaMode::CbMinusOne,
        LcdKappa::Cb => KappaMode::Cb,
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lcd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Creates a mixture from `count` row-major points of `dim` coordinates.
/// `weights` may be null for equal weights; otherwise positive weights are
/// normalized to unit sum.
///
/// # Safety
/// `locations` must point to `count * dim` doubles, `weights` (if non-null)
/// to `count` doubles, and `out` to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn lcd_mixture_new(
    dim: usize,
    count: usize,
    locations: *const f64,
    weights: *const f64,
    out: *mut *mut LcdMixture,
) -> LcdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        if locations.is_null() {
            return Err(fail(LcdStatus::NullPointer, "locations is null"));
        }
        let n = count
            .checked_mul(dim)
            .ok_or_else(|| fail(LcdStatus::InvalidArgument, "count * dim overflows"))?;
        let locs = std::slice::from_raw_parts(locations, n).to_vec();
        let m = if weights.is_null() {
            check(DiracMixture::equal_weights_flat(dim, locs))?
        } else {
            let w = std::slice::from_raw_parts(weights, count).to_vec();
            check(DiracMixture::from_flat(dim, locs, w))?
        };
        *out = Box::into_raw(Box::new(LcdMixture(m)));
        Ok(())
    })
}

/// Releases a mixture. Null is ignored.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lcd_mixture_free(m: *mut LcdMixture) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of points, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lcd_mixture_count(m: *const LcdMixture) -> usize {
    m.as_ref().map_or(0, |m| m.0.len())
}

/// Dimension, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lcd_mixture_dim(m: *const LcdMixture) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Copies the row-major locations into `buf` (`count * dim` values).
///
/// # Safety
/// `m` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lcd_mixture_locations(m: *const LcdMixture, buf: *mut f64, len: usize) -> LcdStatus {
    guard(|| copy_out(handle(m, "mixture")?.locations(), buf, len))
}

/// Copies the weights into `buf` (`count` values).
///
/// # Safety
/// `m` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lcd_mixture_weights(m: *const LcdMixture, buf: *mut f64, len: usize) -> LcdStatus {
    guard(|| copy_out(handle(m, "mixture")?.weights(), buf, len))
}

/// Exact distance with largest kernel width `b_max`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lcd_distance_exact(
    reduced: *const LcdMixture,
    original: *const LcdMixture,
    b_max: f64,
    out: *mut LcdDistanceReport,
) -> LcdStatus {
    guard(|| {
        let r = check(distance_exact(handle(reduced, "reduced")?, handle(original, "original")?, b_max))?;
        *out_ref(out, "out")? = report(r);
        Ok(())
    })
}

/// Large-width distance with penalty constant `c_b`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lcd_distance_approx(
    reduced: *const LcdMixture,
    original: *const LcdMixture,
    c_b: f64,
    out: *mut LcdDistanceReport,
) -> LcdStatus {
    guard(|| {
        let r = check(distance_approx(handle(reduced, "reduced")?, handle(original, "original")?, c_b))?;
        *out_ref(out, "out")? = report(r);
        Ok(())
    })
}

/// Gradient of the large-width distance with respect to the reduced
/// locations, written row-major into `buf` (`count * dim` values).
///
/// # Safety
/// Handles must be live and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lcd_grad_approx(
    reduced: *const LcdMixture,
    original: *const LcdMixture,
    c_b: f64,
    kappa_mode: LcdKappa,
    buf: *mut f64,
    len: usize,
) -> LcdStatus {
    guard(|| {
        let g = check(grad_approx(
            handle(reduced, "reduced")?,
            handle(original, "original")?,
            c_b,
            kappa(kappa_mode),
        ))?;
        copy_out(g.as_slice(), buf, len)
    })
}

/// Default settings for reducing to `target_count` points.
#[no_mangle]
pub extern "C" fn lcd_reduce_config_default(target_count: usize) -> LcdReduceConfig {
    let d = ReduceConfig::new(target_count);
    LcdReduceConfig {
        target_count,
        c_b: d.c_b,
        kappa: LcdKappa::CbMinusOne,
        seed: d.seed,
        max_iters: d.max_iters,
        grad_tol: d.grad_tol,
        step_tol: d.step_tol,
        multistart: d.multistart,
    }
}

/// Reduces `original` to an equally weighted mixture. `result` may be null.
///
/// # Safety
/// `original` must be live, `config` readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lcd_reduce(
    original: *const LcdMixture,
    config: *const LcdReduceConfig,
    out: *mut *mut LcdMixture,
    result: *mut LcdReduceResult,
) -> LcdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        let c = *config
            .as_ref()
            .ok_or_else(|| fail(LcdStatus::NullPointer, "config is null"))?;
        let cfg = ReduceConfig {
            target_count: c.target_count,
            c_b: c.c_b,
            kappa: kappa(c.kappa),
            seed: c.seed,
            max_iters: c.max_iters,
            grad_tol: c.grad_tol,
            step_tol: c.step_tol,
            multistart: c.multistart,
            ..ReduceConfig::default()
        };
        let (m, trace) = check(reduce(handle(original, "original")?, &cfg))?;
        if let Some(r) = result.as_mut() {
            *r = LcdReduceResult {
                status: match trace.status {
                    Status::Converged => LcdOptimStatus::Converged,
                    Status::MaxIters => LcdOptimStatus::MaxIters,
                    Status::LineSearchFailed => LcdOptimStatus::LineSearchFailed,
                },
                iterations: trace.iterations(),
                distance: trace.final_report.total,
            };
        }
        *out = Box::into_raw(Box::new(LcdMixture(m)));
        Ok(())
    })
}
