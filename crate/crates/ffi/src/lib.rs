//! C interface to `qsdesign`.
//!
//! Designs are opaque `QsDesign` handles created by `qs_generate` or
//! `qs_design_read` and released with `qs_design_free`. Every fallible call
//! returns a `QsStatus`; on failure `qs_last_error` describes the problem for
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qsdesign::design::{evaluate, QSDesign};
use qsdesign::io::{read_design, write_design};
use qsdesign::tsp::{six_city_instance, profit, TspStrategy};
use qsdesign::{Error, TaConfig};

/// Opaque design handle.
pub struct QsDesign(QSDesign);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    Parse = 4,
    Io = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Threshold-accepting settings; `weight_num / weight_den` weighs `r_ave`
/// against the Hamming term for blocked designs.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct QsTaConfig {
    pub outer: usize,
    pub inner: usize,
    pub t_initial: f64,
    pub t_final: f64,
    pub weight_num: i64,
    pub weight_den: i64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QsMetrics {
    pub n: usize,
    pub m: usize,
    pub d1: u64,
    pub d2sq: u64,
    pub dh: u64,
    pub r_ave: f64,
    /// True when `r_ave_num / r_ave_den` holds `r_ave` exactly.
    pub r_ave_exact: bool,
    pub r_ave_num: i64,
    pub r_ave_den: i64,
    /// Common adjacent-pair count, 0 when unbalanced.
    pub pair_count: u64,
    pub d1_upper: u64,
    pub d2sq_upper: u64,
    pub dh_upper: u64,
    pub d1_ratio: f64,
    pub d2_ratio: f64,
    pub is_pair_balanced: bool,
    pub is_marginally_coupled: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QsStatus {
    match e {
        Error::Unsupported(_) | Error::NotMultiple { .. } => QsStatus::Unsupported,
        Error::Parse { .. } => QsStatus::Parse,
        Error::Io(_) => QsStatus::Io,
        _ => QsStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic for `qs_last_error`.
fn guard(f: impl FnOnce() -> Result<(), (QsStatus, String)>) -> QsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QsStatus::Internal
        }
    }
}

fn lib(e: Error) -> (QsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (QsStatus, String) {
    (QsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (QsStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| (QsStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn qs_ta_config_default() -> QsTaConfig {
    let d = TaConfig::default();
    QsTaConfig {
        outer: d.outer,
        inner: d.inner,
        t_initial: d.t_initial,
        t_final: d.t_final,
        weight_num: *d.weight.numer(),
        weight_den: *d.weight.denom(),
    }
}

/// Builds a design with `n` runs and `m` components. `config` may be NULL for
/// the defaults.
///
/// # Safety
/// `config` is NULL or points to a valid `QsTaConfig`; `out` is a valid
/// pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qs_generate(
    n: usize,
    m: usize,
    seed: u64,
    config: *const QsTaConfig,
    out: *mut *mut QsDesign,
) -> QsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let cfg = if config.is_null() {
            TaConfig::default()
        } else {
            let c = &*config;
            if c.weight_den == 0 {
                return Err((QsStatus::InvalidArgument, "weight_den is zero".into()));
            }
            TaConfig {
                outer: c.outer,
                inner: c.inner,
                t_initial: c.t_initial,
                t_final: c.t_final,
                weight: num_rational::Ratio::new(c.weight_num, c.weight_den),
            }
        };
        let d = qsdesign::generate(n, m, &cfg, seed).map_err(lib)?;
        *out = Box::into_raw(Box::new(QsDesign(d)));
        Ok(())
    })
}

/// Reads a design CSV (and its sidecar, if present).
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is valid for one handle write.
#[no_mangle]
pub unsafe extern "C" fn qs_design_read(path: *const c_char, out: *mut *mut QsDesign) -> QsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let d = read_design(path_arg(path)?).map_err(lib)?;
        *out = Box::into_raw(Box::new(QsDesign(d)));
        Ok(())
    })
}

/// Writes the design CSV and its `.meta.json` sidecar.
///
/// # Safety
/// `design` is a live handle; `path` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qs_design_write(design: *const QsDesign, path: *const c_char) -> QsStatus {
    guard(|| {
        let d = design.as_ref().ok_or_else(|| null("design"))?;
        write_design(path_arg(path)?, &d.0).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `design` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_design_free(design: *mut QsDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// Number of runs, or 0 for NULL.
///
/// # Safety
/// `design` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_design_runs(design: *const QsDesign) -> usize {
    design.as_ref().map_or(0, |d| d.0.n())
}

/// Number of components, or 0 for NULL.
///
/// # Safety
/// `design` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_design_components(design: *const QsDesign) -> usize {
    design.as_ref().map_or(0, |d| d.0.m())
}

unsafe fn copy_out(src: &[u32], buf: *mut u32, len: usize) -> Result<(), (QsStatus, String)> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if len < src.len() {
        return Err((
            QsStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Copies the quantitative part, row-major, into `buf` (at least `n * m` values).
///
/// # Safety
/// `design` is a live handle and `buf` is writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn qs_design_copy_x(design: *const QsDesign, buf: *mut u32, len: usize) -> QsStatus {
    guard(|| {
        let d = design.as_ref().ok_or_else(|| null("design"))?;
        copy_out(d.0.x().as_slice(), buf, len)
    })
}

/// Copies the sequence part, row-major, into `buf` (at least `n * m` values).
///
/// # Safety
/// `design` is a live handle and `buf` is writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn qs_design_copy_o(design: *const QsDesign, buf: *mut u32, len: usize) -> QsStatus {
    guard(|| {
        let d = design.as_ref().ok_or_else(|| null("design"))?;
        copy_out(d.0.o().as_slice(), buf, len)
    })
}

/// # Safety
/// `design` is a live handle and `out` points to writable `QsMetrics`.
#[no_mangle]
pub unsafe extern "C" fn qs_evaluate(design: *const QsDesign, out: *mut QsMetrics) -> QsStatus {
    guard(|| {
        let d = design.as_ref().ok_or_else(|| null("design"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = evaluate(&d.0).map_err(lib)?;
        let exact = r
            .r_ave
            .exact
            .and_then(|q| Some((i64::try_from(*q.numer()).ok()?, i64::try_from(*q.denom()).ok()?)));
        *out = QsMetrics {
            n: r.n,
            m: r.m,
            d1: r.d1,
            d2sq: r.d2sq,
            dh: r.dh,
            r_ave: r.r_ave.value,
            r_ave_exact: exact.is_some(),
            r_ave_num: exact.map_or(0, |e| e.0),
            r_ave_den: exact.map_or(0, |e| e.1),
            pair_count: r.pair_counts.balanced_value().unwrap_or(0),
            d1_upper: r.bounds.d1_upper,
            d2sq_upper: r.bounds.d2sq_upper,
            dh_upper: r.bounds.dh_upper,
            d1_ratio: r.d1_ratio(),
            d2_ratio: r.d2_ratio(),
            is_pair_balanced: r.is_pair_balanced,
            is_marginally_coupled: r.is_marginally_coupled,
        };
        Ok(())
    })
}

/// Profit of a strategy on the built-in six-city instance. `stays` are in
/// visit order; `order` lists the 1-based cities visited.
///
/// # Safety
/// `stays` and `order` are readable for `m` values; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qs_tsp_profit(stays: *const f64, order: *const u32, m: usize, out: *mut f64) -> QsStatus {
    guard(|| {
        if stays.is_null() || order.is_null() {
            return Err(null("stays or order"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let stays = std::slice::from_raw_parts(stays, m).to_vec();
        let order = std::slice::from_raw_parts(order, m).iter().map(|&c| c as usize).collect();
        let s = TspStrategy::new(order, stays).map_err(lib)?;
        *out = profit(&six_city_instance(), &s).map_err(lib)?;
        Ok(())
    })
}
