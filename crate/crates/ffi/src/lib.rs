//! C interface to the plateau kernel.
//!
//! Complexes cross the boundary as opaque `PlateauComplex` handles created by
//! `plateau_complex_load` or `plateau_complex_parse` and released with
//! `plateau_complex_free`. Every fallible call returns a `PlateauStatus`;
//! on failure `plateau_last_error_message` describes the most recent error
//! on the calling thread. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use plateau::classify::{classify_flat, FlatTag};
use plateau::geometry::{area_in_ball, compute_curvature};
use plateau::golden::generate_golden;
use plateau::variation::{assemble_second_variation, stability_spectrum, Analysis, FormOptions};
use plateau::{PlateauError, Vec3};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlateauStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Structure = 4,
    Orientability = 5,
    Embedding = 6,
    DegenerateTriangle = 7,
    Io = 8,
    UnknownCorpus = 9,
    InvalidArgument = 10,
    /// A numerical stage failed (solver, extent, stationarity, ...).
    Numerical = 11,
    Panic = 12,
}

impl From<&PlateauError> for PlateauStatus {
    fn from(e: &PlateauError) -> Self {
        match e {
            PlateauError::Parse(_) => PlateauStatus::Parse,
            PlateauError::Structure(_) => PlateauStatus::Structure,
            PlateauError::Orientability(_) => PlateauStatus::Orientability,
            PlateauError::Embedding(_) => PlateauStatus::Embedding,
            PlateauError::DegenerateTriangle { .. } => PlateauStatus::DegenerateTriangle,
            PlateauError::Io(_) => PlateauStatus::Io,
            PlateauError::UnknownCorpus(_) => PlateauStatus::UnknownCorpus,
            _ => PlateauStatus::Numerical,
        }
    }
}

/// Classification of a flat complex.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlateauFlatTag {
    ParallelPlanes = 0,
    NetworkTimesR = 1,
    TCone = 2,
    DoubleT = 3,
    NonFlat = 4,
    Indeterminate = 5,
}

impl From<FlatTag> for PlateauFlatTag {
    fn from(t: FlatTag) -> Self {
        match t {
            FlatTag::ParallelPlanes => PlateauFlatTag::ParallelPlanes,
            FlatTag::NetworkTimesR => PlateauFlatTag::NetworkTimesR,
            FlatTag::TCone => PlateauFlatTag::TCone,
            FlatTag::DoubleT => PlateauFlatTag::DoubleT,
            FlatTag::NonFlat => PlateauFlatTag::NonFlat,
            FlatTag::Indeterminate => PlateauFlatTag::Indeterminate,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlateauCounts {
    pub vertices: usize,
    pub triangles: usize,
    pub patches: usize,
    pub junction_curves: usize,
    pub t_points: usize,
    pub slots: usize,
}

/// Opaque handle to a validated complex.
pub struct PlateauComplex {
    inner: plateau::PlateauComplex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Run `f`, recording errors and converting panics to `Panic`.
fn guard(f: impl FnOnce() -> Result<(), (PlateauStatus, String)>) -> PlateauStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PlateauStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PlateauStatus::Panic
        }
    }
}

fn kernel(e: PlateauError) -> (PlateauStatus, String) {
    (PlateauStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (PlateauStatus, String) {
    (PlateauStatus::NullArgument, format!("{what} is null"))
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (PlateauStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (PlateauStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `c` must be null or a handle returned by this library and not yet freed.
unsafe fn handle<'a>(c: *const PlateauComplex) -> Result<&'a plateau::PlateauComplex, (PlateauStatus, String)> {
    c.as_ref().map(|h| &h.inner).ok_or_else(|| null("complex"))
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
unsafe fn emit(out: *mut *mut PlateauComplex, c: plateau::PlateauComplex) -> Result<(), (PlateauStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(PlateauComplex { inner: c }));
    Ok(())
}

/// Load and validate a mesh file. On success `*out` receives a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn plateau_complex_load(path: *const c_char, out: *mut *mut PlateauComplex) -> PlateauStatus {
    guard(|| {
        if !out.is_null() {
            *out = ptr::null_mut();
        }
        let path = read_str(path, "path")?;
        let c = plateau::complex::load_complex(path).map_err(kernel)?;
        emit(out, c)
    })
}

/// Parse and validate a mesh document held in memory.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn plateau_complex_parse(json: *const c_char, out: *mut *mut PlateauComplex) -> PlateauStatus {
    guard(|| {
        if !out.is_null() {
            *out = ptr::null_mut();
        }
        let text = read_str(json, "json")?;
        let c = plateau::complex::parse_complex(text).map_err(kernel)?;
        emit(out, c)
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `c` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn plateau_complex_free(c: *mut PlateauComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn plateau_complex_counts(c: *const PlateauComplex, out: *mut PlateauCounts) -> PlateauStatus {
    guard(|| {
        let c = handle(c)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let k = c.counts();
        *out = PlateauCounts {
            vertices: k.vertices,
            triangles: k.triangles,
            patches: k.patches,
            junction_curves: k.junction_curves,
            t_points: k.t_points,
            slots: k.slots,
        };
        Ok(())
    })
}

/// Area of the complex inside the ball of radius `r` about `center[0..3]`.
///
/// # Safety
/// `c` must be a live handle, `center` must point to three doubles and
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn plateau_area_in_ball(
    c: *const PlateauComplex,
    center: *const f64,
    r: f64,
    out: *mut f64,
) -> PlateauStatus {
    guard(|| {
        let c = handle(c)?;
        if center.is_null() {
            return Err(null("center"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err((PlateauStatus::InvalidArgument, format!("radius {r} is not a non-negative number")));
        }
        let p = std::slice::from_raw_parts(center, 3);
        *out = area_in_ball(c, &Vec3::new(p[0], p[1], p[2]), r);
        Ok(())
    })
}

/// Smallest eigenvalue of the second variation on compatible fields, and
/// whether it clears `-eig_rel` times the spectral norm.
///
/// # Safety
/// `c` must be a live handle; `lambda` and `stable` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn plateau_stability_lambda_min(
    c: *const PlateauComplex,
    eig_rel: f64,
    lambda: *mut f64,
    stable: *mut bool,
) -> PlateauStatus {
    guard(|| {
        let c = handle(c)?;
        let lambda = lambda.as_mut().ok_or_else(|| null("lambda"))?;
        let stable = stable.as_mut().ok_or_else(|| null("stable"))?;
        if !(eig_rel >= 0.0 && eig_rel.is_finite()) {
            return Err((PlateauStatus::InvalidArgument, format!("tolerance {eig_rel} is not a non-negative number")));
        }
        let an = Analysis::new(c).map_err(kernel)?;
        let form = assemble_second_variation(c, &an, &FormOptions::default());
        let sp = stability_spectrum(&form, c.num_slots(), 1, eig_rel).map_err(kernel)?;
        *lambda = sp.eigenvalues.first().copied().unwrap_or(f64::NAN);
        *stable = sp.stable;
        Ok(())
    })
}

/// Flat classification with the given flatness and angle tolerances.
///
/// # Safety
/// `c` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn plateau_classify(
    c: *const PlateauComplex,
    tol_flat: f64,
    tol_angle: f64,
    out: *mut PlateauFlatTag,
) -> PlateauStatus {
    guard(|| {
        let c = handle(c)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let curv = compute_curvature(c).map_err(kernel)?;
        *out = classify_flat(c, &curv, tol_flat, tol_angle).map_err(kernel)?.tag.into();
        Ok(())
    })
}

/// Write a corpus mesh to `path`.
///
/// # Safety
/// `name` and `path` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn plateau_golden_write(name: *const c_char, resolution: f64, path: *const c_char) -> PlateauStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let path = read_str(path, "path")?;
        let text = generate_golden(name, resolution).map_err(kernel)?.to_json();
        std::fs::write(path, text).map_err(|e| kernel(e.into()))
    })
}

/// Message for the last failed call on this thread ("" after a success).
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn plateau_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn plateau_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
