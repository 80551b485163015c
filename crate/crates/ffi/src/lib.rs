//! C ABI for `schwarzian-lab`.
//!
//! Families and scan reports are opaque handles owned by the caller and
//! released with their `_free` function. Every entry point returns an
//! [`SlStatus`]; on failure a message is kept per thread and can be read
//! with [`sl_last_error_message`]. Strings returned through `char **` out
//! parameters are released with [`sl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use schwarzian_lab::catalog;
use schwarzian_lab::expr::FamilyExpr;
use schwarzian_lab::output::scan_table;
use schwarzian_lab::probe::{
    self, classify_point, ErrorFlags, GridSpec, MartyGridReport, ScanOptions, Thresholds, Verdict,
};
use schwarzian_lab::schwarzian::{self, CheckError, IdentityReport, Mobius, Tolerance};

/// Result code of every fallible call. The first five match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    IdentityFailed = 1,
    ParseError = 2,
    EvalError = 3,
    IoError = 4,
    InvalidArgument = 5,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlVerdict {
    Bounded = 0,
    Divergent = 1,
    Inconclusive = 2,
}

pub const SL_FLAG_POLE: u8 = 1;
pub const SL_FLAG_OVERFLOW: u8 = 2;
pub const SL_FLAG_CRITICAL_POINT: u8 = 4;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlComplex {
    pub re: f64,
    pub im: f64,
}

/// Value and first three derivatives at a point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlJet {
    pub v: SlComplex,
    pub d1: SlComplex,
    pub d2: SlComplex,
    pub d3: SlComplex,
}

/// Coefficients of `(a z + b) / (c z + d)`; normalized on use.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlMobius {
    pub a: SlComplex,
    pub b: SlComplex,
    pub c: SlComplex,
    pub d: SlComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlTolerance {
    pub abs: f64,
    pub rel: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlIdentityReport {
    pub lhs: SlComplex,
    pub rhs: SlComplex,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub tolerance: SlTolerance,
    pub pass: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlGridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub neighborhood_radius: f64,
    pub neighborhood_samples: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlThresholds {
    pub slope_threshold: f64,
    pub decay_threshold: f64,
    pub cap: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlScanPoint {
    pub z: SlComplex,
    pub sup_stat: f64,
    /// 0 when no sample was finite.
    pub argmax_n: u32,
    pub growth_slope: f64,
    /// Bitwise OR of the `SL_FLAG_*` constants.
    pub flags: u8,
    pub finite_samples: usize,
    pub verdict: SlVerdict,
}

/// A parsed family `f_n(z)`.
pub struct SlFamily(FamilyExpr);

/// Per-point results of a grid scan.
pub struct SlScanReport(MartyGridReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type Outcome = Result<SlStatus, (SlStatus, String)>;

fn guard(body: impl FnOnce() -> Outcome) -> SlStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(&format!("panic: {msg}"));
            SlStatus::Panic
        }
    }
}

fn null() -> (SlStatus, String) {
    (SlStatus::NullPointer, "null pointer argument".to_string())
}

fn invalid(msg: impl ToString) -> (SlStatus, String) {
    (SlStatus::InvalidArgument, msg.to_string())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, (SlStatus, String)> {
    p.as_ref().ok_or_else(null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, (SlStatus, String)> {
    p.as_mut().ok_or_else(null)
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, (SlStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid("string is not valid UTF-8"))
}

fn to_c(z: Complex64) -> SlComplex {
    SlComplex { re: z.re, im: z.im }
}

fn from_c(z: SlComplex) -> Complex64 {
    Complex64::new(z.re, z.im)
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn check_status(e: CheckError) -> (SlStatus, String) {
    let status = match e {
        CheckError::Mobius(schwarzian::MobiusError::Degenerate { .. }) => SlStatus::InvalidArgument,
        _ => SlStatus::EvalError,
    };
    (status, e.to_string())
}

fn probe_status(e: probe::ProbeError) -> (SlStatus, String) {
    let status = match e {
        probe::ProbeError::Eval(_) => SlStatus::EvalError,
        _ => SlStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn tolerance(t: *const SlTolerance) -> Tolerance {
    // SAFETY: null selects the default; otherwise the caller passes a valid pointer.
    match unsafe { t.as_ref() } {
        Some(t) => Tolerance::new(t.abs, t.rel),
        None => Tolerance::default(),
    }
}

fn mobius(m: &SlMobius) -> Result<Mobius, (SlStatus, String)> {
    Mobius::new(from_c(m.a), from_c(m.b), from_c(m.c), from_c(m.d)).map_err(invalid)
}

fn thresholds(t: *const SlThresholds) -> Result<Thresholds, (SlStatus, String)> {
    // SAFETY: null selects the defaults; otherwise the caller passes a valid pointer.
    match unsafe { t.as_ref() } {
        Some(t) => Thresholds::new(t.slope_threshold, t.decay_threshold, t.cap).map_err(invalid),
        None => Ok(Thresholds::default()),
    }
}

fn report_out(rep: IdentityReport, dst: &mut SlIdentityReport) -> Outcome {
    *dst = SlIdentityReport {
        lhs: to_c(rep.lhs),
        rhs: to_c(rep.rhs),
        abs_gap: rep.abs_gap,
        rel_gap: rep.rel_gap,
        tolerance: SlTolerance { abs: rep.tolerance_used.abs, rel: rep.tolerance_used.rel },
        pass: rep.pass,
    };
    if rep.pass {
        Ok(SlStatus::Ok)
    } else {
        Err((SlStatus::IdentityFailed, format!("gap {:e} exceeds tolerance", rep.abs_gap)))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn sl_tolerance_default() -> SlTolerance {
    let t = Tolerance::default();
    SlTolerance { abs: t.abs, rel: t.rel }
}

#[no_mangle]
pub extern "C" fn sl_thresholds_default() -> SlThresholds {
    let t = Thresholds::default();
    SlThresholds { slope_threshold: t.slope_threshold, decay_threshold: t.decay_threshold, cap: t.cap }
}

/// Grid with the default neighborhood radius and sample count.
#[no_mangle]
pub extern "C" fn sl_grid_spec(re_min: f64, re_max: f64, im_min: f64, im_max: f64, nx: usize, ny: usize) -> SlGridSpec {
    SlGridSpec {
        re_min,
        re_max,
        im_min,
        im_max,
        nx,
        ny,
        neighborhood_radius: probe::DEFAULT_RADIUS,
        neighborhood_samples: probe::DEFAULT_SAMPLES,
    }
}

/// Parses `source` into a new family. On a parse error `*error_offset`
/// (if non-null) receives the byte offset of the failure.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_family_parse(
    source: *const c_char,
    out_family: *mut *mut SlFamily,
    error_offset: *mut usize,
) -> SlStatus {
    guard(|| {
        let dst = out(out_family)?;
        *dst = ptr::null_mut();
        let src = text(source)?;
        match schwarzian_lab::parse(src) {
            Ok(f) => {
                *dst = Box::into_raw(Box::new(SlFamily(f)));
                Ok(SlStatus::Ok)
            }
            Err(e) => {
                if let Some(o) = error_offset.as_mut() {
                    *o = e.position;
                }
                Err((SlStatus::ParseError, e.to_string()))
            }
        }
    })
}

/// Looks up a named catalog family such as `example1`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_family_from_catalog(name: *const c_char, out_family: *mut *mut SlFamily) -> SlStatus {
    guard(|| {
        let dst = out(out_family)?;
        *dst = ptr::null_mut();
        let name = text(name)?;
        let f = catalog::family(name).ok_or_else(|| invalid(format!("unknown catalog family '{name}'")))?;
        *dst = Box::into_raw(Box::new(SlFamily(f)));
        Ok(SlStatus::Ok)
    })
}

/// # Safety
/// `family` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_family_free(family: *mut SlFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Canonical source text of the family, released with `sl_string_free`.
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_family_to_string(family: *const SlFamily, out_text: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let dst = out(out_text)?;
        *dst = ptr::null_mut();
        *dst = owned_string(deref(family)?.0.to_string());
        Ok(SlStatus::Ok)
    })
}

/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_eval_jet(family: *const SlFamily, n: f64, z: SlComplex, out_jet: *mut SlJet) -> SlStatus {
    guard(|| {
        let dst = out(out_jet)?;
        let j = deref(family)?.0.eval_jet(n, from_c(z)).map_err(|e| (SlStatus::EvalError, e.to_string()))?;
        *dst = SlJet { v: to_c(j.v), d1: to_c(j.d1), d2: to_c(j.d2), d3: to_c(j.d3) };
        Ok(SlStatus::Ok)
    })
}

/// Schwarzian derivative of `f_n` at `z`.
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_schwarzian(family: *const SlFamily, n: f64, z: SlComplex, out_value: *mut SlComplex) -> SlStatus {
    guard(|| {
        let dst = out(out_value)?;
        let j = deref(family)?.0.eval_jet(n, from_c(z)).map_err(|e| (SlStatus::EvalError, e.to_string()))?;
        let s = schwarzian::schwarzian(&j).map_err(|e| (SlStatus::EvalError, e.to_string()))?;
        *dst = to_c(s);
        Ok(SlStatus::Ok)
    })
}

/// Spherical derivative `|f'| / (1 + |f|^2)` of `f_n` at `z`.
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_spherical_derivative(family: *const SlFamily, n: f64, z: SlComplex, out_value: *mut f64) -> SlStatus {
    guard(|| {
        let dst = out(out_value)?;
        let j = deref(family)?.0.eval_jet(n, from_c(z)).map_err(|e| (SlStatus::EvalError, e.to_string()))?;
        *dst = schwarzian::spherical_derivative(&j);
        Ok(SlStatus::Ok)
    })
}

/// Compares `S_{m∘f}(z)` with `S_f(z)`. A null `tol` uses the default.
/// Returns `IdentityFailed` with `out` filled when the gap is too large.
///
/// # Safety
/// Pointers must be valid; `tol` may be null.
#[no_mangle]
pub unsafe extern "C" fn sl_check_mobius_invariance(
    family: *const SlFamily,
    n: f64,
    m: *const SlMobius,
    z: SlComplex,
    tol: *const SlTolerance,
    out_report: *mut SlIdentityReport,
) -> SlStatus {
    guard(|| {
        let dst = out(out_report)?;
        let m = mobius(deref(m)?)?;
        let rep = schwarzian::check_mobius_invariance(&deref(family)?.0, n, &m, from_c(z), tolerance(tol))
            .map_err(check_status)?;
        report_out(rep, dst)
    })
}

/// Compares `S_{g∘f}(z)` with `S_g(f(z)) f'(z)^2 + S_f(z)`.
///
/// # Safety
/// Pointers must be valid; `tol` may be null.
#[no_mangle]
pub unsafe extern "C" fn sl_check_composition(
    f: *const SlFamily,
    g: *const SlFamily,
    n: f64,
    z: SlComplex,
    tol: *const SlTolerance,
    out_report: *mut SlIdentityReport,
) -> SlStatus {
    guard(|| {
        let dst = out(out_report)?;
        let rep = schwarzian::check_composition_law(&deref(f)?.0, &deref(g)?.0, n, from_c(z), tolerance(tol))
            .map_err(check_status)?;
        report_out(rep, dst)
    })
}

/// Compares `S_{1/(f-w)}(z)` with `S_f(z)` for an omitted value `w`.
///
/// # Safety
/// Pointers must be valid; `tol` may be null.
#[no_mangle]
pub unsafe extern "C" fn sl_check_reciprocal(
    family: *const SlFamily,
    n: f64,
    omitted: SlComplex,
    z: SlComplex,
    tol: *const SlTolerance,
    out_report: *mut SlIdentityReport,
) -> SlStatus {
    guard(|| {
        let dst = out(out_report)?;
        let rep = schwarzian::check_reciprocal(&deref(family)?.0, n, from_c(omitted), from_c(z), tolerance(tol))
            .map_err(check_status)?;
        report_out(rep, dst)
    })
}

/// Checks `S_g(φ(z)) φ'(z)^2 = S_f(z)` for `φ∘f = g∘φ`.
///
/// # Safety
/// Pointers must be valid; `tol` may be null.
#[no_mangle]
pub unsafe extern "C" fn sl_check_conjugation(
    f: *const SlFamily,
    g: *const SlFamily,
    phi: *const SlMobius,
    n: f64,
    z: SlComplex,
    tol: *const SlTolerance,
    out_report: *mut SlIdentityReport,
) -> SlStatus {
    guard(|| {
        let dst = out(out_report)?;
        let phi = mobius(deref(phi)?)?;
        let rep = schwarzian::check_conjugation(&deref(f)?.0, &deref(g)?.0, &phi, n, from_c(z), tolerance(tol))
            .map_err(check_status)?;
        report_out(rep, dst)
    })
}

type ScanFn = fn(&FamilyExpr, &GridSpec, &[u32], &ScanOptions) -> Result<MartyGridReport, probe::ProbeError>;

unsafe fn scan(
    run: ScanFn,
    family: *const SlFamily,
    grid: *const SlGridSpec,
    n_values: *const u32,
    n_len: usize,
    seed: u64,
    workers: usize,
    out_report: *mut *mut SlScanReport,
) -> SlStatus {
    guard(|| {
        let dst = out(out_report)?;
        *dst = ptr::null_mut();
        let f = &deref(family)?.0;
        let g = deref(grid)?;
        let grid = GridSpec::new((g.re_min, g.re_max), (g.im_min, g.im_max), g.nx, g.ny)
            .and_then(|s| s.with_neighborhood(g.neighborhood_radius, g.neighborhood_samples))
            .map_err(probe_status)?;
        let ns = if n_values.is_null() {
            if n_len != 0 {
                return Err(null());
            }
            probe::default_n_values()
        } else {
            std::slice::from_raw_parts(n_values, n_len).to_vec()
        };
        let opts = ScanOptions { seed, workers: (workers > 0).then_some(workers) };
        let rep = run(f, &grid, &ns, &opts).map_err(probe_status)?;
        *dst = Box::into_raw(Box::new(SlScanReport(rep)));
        Ok(SlStatus::Ok)
    })
}

/// Marty scan of `sup f_n^#` over each grid neighborhood. A null
/// `n_values` with `n_len == 0` sweeps `1..=64`; `workers == 0` uses every
/// core. Results do not depend on `workers`.
///
/// # Safety
/// Pointers must be valid; `n_values` must hold `n_len` entries.
#[no_mangle]
pub unsafe extern "C" fn sl_marty_scan(
    family: *const SlFamily,
    grid: *const SlGridSpec,
    n_values: *const u32,
    n_len: usize,
    seed: u64,
    workers: usize,
    out_report: *mut *mut SlScanReport,
) -> SlStatus {
    scan(probe::marty_scan, family, grid, n_values, n_len, seed, workers, out_report)
}

/// Scan of the spherical derivative of `z ↦ S_{f_n}(z)`; arguments as in
/// `sl_marty_scan`.
///
/// # Safety
/// Pointers must be valid; `n_values` must hold `n_len` entries.
#[no_mangle]
pub unsafe extern "C" fn sl_sd_family_scan(
    family: *const SlFamily,
    grid: *const SlGridSpec,
    n_values: *const u32,
    n_len: usize,
    seed: u64,
    workers: usize,
    out_report: *mut *mut SlScanReport,
) -> SlStatus {
    scan(probe::sd_family_scan, family, grid, n_values, n_len, seed, workers, out_report)
}

/// Number of grid points in the report; 0 for null.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_scan_report_len(report: *const SlScanReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.points.len())
}

/// Point `index` in row-major order (real part fastest), classified with
/// `thresholds` or the defaults when null.
///
/// # Safety
/// Pointers must be valid; `thresholds` may be null.
#[no_mangle]
pub unsafe extern "C" fn sl_scan_report_point(
    report: *const SlScanReport,
    index: usize,
    thresholds_in: *const SlThresholds,
    out_point: *mut SlScanPoint,
) -> SlStatus {
    guard(|| {
        let dst = out(out_point)?;
        let rep = &deref(report)?.0;
        let t = thresholds(thresholds_in)?;
        let p = rep
            .points
            .get(index)
            .ok_or_else(|| invalid(format!("index {index} out of range for {} points", rep.points.len())))?;
        let flags = [
            (ErrorFlags::POLE, SL_FLAG_POLE),
            (ErrorFlags::OVERFLOW, SL_FLAG_OVERFLOW),
            (ErrorFlags::CRITICAL_POINT, SL_FLAG_CRITICAL_POINT),
        ]
        .iter()
        .filter(|(f, _)| p.flags.contains(*f))
        .fold(0u8, |acc, (_, bit)| acc | bit);
        *dst = SlScanPoint {
            z: to_c(p.z),
            sup_stat: p.sup_stat,
            argmax_n: p.argmax_n.unwrap_or(0),
            growth_slope: p.growth_slope,
            flags,
            finite_samples: p.finite_samples,
            verdict: match classify_point(p, &t) {
                Verdict::BoundedCandidate => SlVerdict::Bounded,
                Verdict::DivergentCandidate => SlVerdict::Divergent,
                Verdict::Inconclusive => SlVerdict::Inconclusive,
            },
        };
        Ok(SlStatus::Ok)
    })
}

/// The report as CSV, byte-identical to the CLI scan output.
///
/// # Safety
/// Pointers must be valid; `thresholds` may be null.
#[no_mangle]
pub unsafe extern "C" fn sl_scan_report_to_csv(
    report: *const SlScanReport,
    thresholds_in: *const SlThresholds,
    out_text: *mut *mut c_char,
) -> SlStatus {
    guard(|| {
        let dst = out(out_text)?;
        *dst = ptr::null_mut();
        let rep = &deref(report)?.0;
        let t = thresholds(thresholds_in)?;
        *dst = owned_string(scan_table(rep, &t).to_csv());
        Ok(SlStatus::Ok)
    })
}

/// # Safety
/// `report` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_scan_report_free(report: *mut SlScanReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Cauchy estimate `k! m / r^k` for `|f^(k)(z0)|` given `|f| <= m` on the
/// circle of radius `r`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_cauchy_derivative_bound(m: f64, r: f64, k: u32, out_value: *mut f64) -> SlStatus {
    guard(|| {
        let dst = out(out_value)?;
        *dst = probe::cauchy_derivative_bound(m, r, k).map_err(probe_status)?;
        Ok(SlStatus::Ok)
    })
}

/// Bound on `|S_f|` from `|f''| <= m2`, `|f'''| <= m3` and `|f'| >= epsilon`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_sd_bound_from_hypotheses(m2: f64, m3: f64, epsilon: f64, out_value: *mut f64) -> SlStatus {
    guard(|| {
        let dst = out(out_value)?;
        *dst = probe::sd_bound_from_hypotheses(m2, m3, epsilon).map_err(probe_status)?;
        Ok(SlStatus::Ok)
    })
}
