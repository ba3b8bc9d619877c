//! C ABI for `proxcycle`.
//!
//! Instances and traces cross the boundary as opaque handles that the caller
//! releases with `pc_instance_free` / `pc_trace_free`. Every fallible call
//! returns a [`PcStatus`]; the message of the most recent failure on the
//! calling thread is available from `pc_last_error_message`. Strings returned
//! by this library are released with `pc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use proxcycle::certifier::{certify, SamplingPlan};
use proxcycle::iterator::{self, Outcome, SelectionPolicy};
use proxcycle::metric::{self, SetLabel};
use proxcycle::params::{classify_region, derived_constants};
use proxcycle::{gallery, ContractionParams, Error, Instance, Point, PointSet, RegionLabel};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    InstanceFormat = 2,
    ParamsUnsupported = 3,
    Domain = 4,
    Parameter = 5,
    Precondition = 6,
    Io = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

/// Choice of the next iterate within a multivalued image.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcPolicy {
    Nearest = 0,
    FirstListed = 1,
    SeededRandom = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcRegion {
    Delta1 = 0,
    Delta2 = 1,
    Delta3 = 2,
    Delta4 = 3,
    DeltaOnly = 4,
    Outside = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcOutcomeKind {
    FixedPoint = 0,
    BestProximityPair = 1,
    NotConverged = 2,
}

/// Opaque instance handle.
pub struct PcInstance {
    inner: Instance,
}

/// Opaque iteration trace handle.
pub struct PcTrace {
    inner: iterator::IterationTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PcStatus {
    match err {
        Error::InstanceFormat(_) => PcStatus::InstanceFormat,
        Error::ParamsUnsupported(_) => PcStatus::ParamsUnsupported,
        Error::Domain(_) => PcStatus::Domain,
        Error::Parameter(_) => PcStatus::Parameter,
        Error::Precondition(_) => PcStatus::Precondition,
        _ => PcStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Utf8,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics to a status and recording the message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PcStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            PcStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("string is not valid UTF-8".into());
            PcStatus::InvalidUtf8
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("panic inside proxcycle".into());
            PcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn read_str<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Utf8)
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

unsafe fn read_points(
    coords: *const f64,
    n: usize,
    dim: usize,
    what: &'static str,
) -> Result<Vec<Point>, Failure> {
    if coords.is_null() {
        return Err(Failure::Null(what));
    }
    if dim == 0 || n == 0 {
        return Err(Error::InstanceFormat(format!("{what}: empty point set")).into());
    }
    let flat = std::slice::from_raw_parts(coords, n * dim);
    Ok(flat
        .chunks(dim)
        .map(|c| Point::new(c.to_vec()))
        .collect::<proxcycle::Result<Vec<_>>>()?)
}

fn store_instance(out: &mut *mut PcInstance, inst: Instance) {
    *out = Box::into_raw(Box::new(PcInstance { inner: inst }));
}

/// Parses an instance document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_instance_from_json(
    json: *const c_char,
    out: *mut *mut PcInstance,
) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let text = read_str(json, "json")?;
        store_instance(out, Instance::from_json(text)?);
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_gallery_midpoint(
    resolution: usize,
    out: *mut *mut PcInstance,
) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        store_instance(out, gallery::make_midpoint_cyclic(resolution)?);
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_gallery_intersecting(
    k: f64,
    resolution: usize,
    out: *mut *mut PcInstance,
) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        store_instance(out, gallery::make_intersecting(k, resolution)?);
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_gallery_multivalued_ball(
    eps: f64,
    samples: usize,
    resolution: usize,
    out: *mut *mut PcInstance,
) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        store_instance(out, gallery::make_multivalued_ball(eps, samples, resolution)?);
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_gallery_expansive(out: *mut *mut PcInstance) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        store_instance(out, gallery::make_expansive_counterexample()?);
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_gallery_finite_random(
    seed: u64,
    size_a: usize,
    size_b: usize,
    out: *mut *mut PcInstance,
) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        store_instance(out, gallery::make_finite_random(seed, size_a, size_b)?);
        Ok(())
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pc_instance_free(inst: *mut PcInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_instance_dim(inst: *const PcInstance, out: *mut usize) -> PcStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(inst, "inst")?.inner.dim();
        Ok(())
    })
}

/// `D = dist(A, B)`.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_instance_set_distance(
    inst: *const PcInstance,
    out: *mut f64,
) -> PcStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(inst, "inst")?.inner.set_distance();
        Ok(())
    })
}

/// Serializes an instance; free the result with `pc_string_free`.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_instance_to_json(
    inst: *const PcInstance,
    out: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = into_c_string(deref(inst, "inst")?.inner.to_json()?);
        Ok(())
    })
}

fn plan(random_pairs: usize, seed: u64) -> SamplingPlan {
    SamplingPlan {
        random_pairs,
        seed,
        ..SamplingPlan::default()
    }
}

/// Checks the contractive condition. Either output pointer may be null.
///
/// # Safety
/// `inst` must be a live handle; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_certify(
    inst: *const PcInstance,
    random_pairs: usize,
    seed: u64,
    certified: *mut bool,
    violations: *mut usize,
) -> PcStatus {
    guard(|| {
        let cert = certify(&deref(inst, "inst")?.inner, &plan(random_pairs, seed))?;
        if let Some(c) = certified.as_mut() {
            *c = cert.certified;
        }
        if let Some(v) = violations.as_mut() {
            *v = cert.violations.len();
        }
        Ok(())
    })
}

/// Full certificate as JSON; free the result with `pc_string_free`.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_certify_json(
    inst: *const PcInstance,
    random_pairs: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let cert = certify(&deref(inst, "inst")?.inner, &plan(random_pairs, seed))?;
        let json = serde_json::to_string_pretty(&cert).map_err(Error::from)?;
        *out = into_c_string(json);
        Ok(())
    })
}

/// Iterates from `x0` (`dim` coordinates) and detects the limit.
/// `seed` is used only by `PC_POLICY_SEEDED_RANDOM`.
///
/// # Safety
/// `inst` must be a live handle, `x0` must point to `dim` doubles and `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_iterate(
    inst: *const PcInstance,
    x0: *const f64,
    dim: usize,
    policy: PcPolicy,
    seed: u64,
    max_iter: usize,
    tol: f64,
    out: *mut *mut PcTrace,
) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let inst = &deref(inst, "inst")?.inner;
        let x0 = read_points(x0, 1, dim, "x0")?.remove(0);
        let policy = match policy {
            PcPolicy::Nearest => SelectionPolicy::Nearest,
            PcPolicy::FirstListed => SelectionPolicy::FirstListed,
            PcPolicy::SeededRandom => SelectionPolicy::SeededRandom(seed),
        };
        let trace = iterator::run(inst, &x0, policy, max_iter, tol)?;
        *out = Box::into_raw(Box::new(PcTrace { inner: trace }));
        Ok(())
    })
}

/// Releases a trace. Null is ignored.
///
/// # Safety
/// `trace` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pc_trace_free(trace: *mut PcTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of points in the trace (steps + 1); 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_trace_len(trace: *const PcTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.inner.len())
}

/// Copies point `index` into `buf`, which holds `buf_len` doubles.
///
/// # Safety
/// `trace` must be a live handle and `buf` must point to `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_trace_point(
    trace: *const PcTrace,
    index: usize,
    buf: *mut f64,
    buf_len: usize,
) -> PcStatus {
    guard(|| {
        let t = &deref(trace, "trace")?.inner;
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        let p = t.points.get(index).ok_or_else(|| {
            Error::Parameter(format!("index {index} out of range for {} points", t.len()))
        })?;
        copy_point(p, buf, buf_len)
    })
}

unsafe fn copy_point(p: &Point, buf: *mut f64, buf_len: usize) -> Result<(), Failure> {
    if buf_len < p.dim() {
        return Err(Error::Parameter(format!(
            "buffer of {buf_len} doubles cannot hold a {}-dimensional point",
            p.dim()
        ))
        .into());
    }
    ptr::copy_nonoverlapping(p.coords().as_ptr(), buf, p.dim());
    Ok(())
}

/// `d(x_{index+1}, x_{index+2})` in the 1-based numbering of the orbit.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_trace_step_dist(
    trace: *const PcTrace,
    index: usize,
    out: *mut f64,
) -> PcStatus {
    guard(|| {
        let t = &deref(trace, "trace")?.inner;
        let out = out_ref(out, "out")?;
        *out = *t.step_dist.get(index).ok_or_else(|| {
            Error::Parameter(format!("index {index} out of range for {} steps", t.iterations()))
        })?;
        Ok(())
    })
}

/// Kind of the detected limit. For a fixed point the limit is copied into
/// `z_a`; for a best proximity pair into `z_a` and `z_b`. Buffers may be
/// null when the coordinates are not wanted.
///
/// # Safety
/// `trace` must be a live handle, `kind` a valid pointer, and non-null
/// buffers must hold `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_trace_outcome(
    trace: *const PcTrace,
    kind: *mut PcOutcomeKind,
    z_a: *mut f64,
    z_b: *mut f64,
    buf_len: usize,
) -> PcStatus {
    guard(|| {
        let t = &deref(trace, "trace")?.inner;
        let kind = out_ref(kind, "kind")?;
        match &t.outcome {
            Some(Outcome::FixedPoint { z }) => {
                *kind = PcOutcomeKind::FixedPoint;
                if !z_a.is_null() {
                    copy_point(z, z_a, buf_len)?;
                }
            }
            Some(Outcome::BestProximityPair { z_a: pa, z_b: pb }) => {
                *kind = PcOutcomeKind::BestProximityPair;
                if !z_a.is_null() {
                    copy_point(pa, z_a, buf_len)?;
                }
                if !z_b.is_null() {
                    copy_point(pb, z_b, buf_len)?;
                }
            }
            Some(Outcome::NotConverged { .. }) | None => *kind = PcOutcomeKind::NotConverged,
        }
        Ok(())
    })
}

/// Hausdorff distance `h` and set distance `d` between two point clouds
/// given as row-major arrays of `n_a` and `n_b` points of dimension `dim`.
///
/// # Safety
/// `a` and `b` must point to `n_a * dim` and `n_b * dim` doubles; `h` and
/// `d` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_hausdorff(
    a: *const f64,
    n_a: usize,
    b: *const f64,
    n_b: usize,
    dim: usize,
    h: *mut f64,
    d: *mut f64,
) -> PcStatus {
    guard(|| {
        let h = out_ref(h, "h")?;
        let d = out_ref(d, "d")?;
        let sa = PointSet::new(read_points(a, n_a, dim, "a")?, SetLabel::A)?;
        let sb = PointSet::new(read_points(b, n_b, dim, "b")?, SetLabel::B)?;
        *h = metric::hausdorff(&sa, &sb)?;
        *d = metric::set_distance(&sa, &sb)?;
        Ok(())
    })
}

/// Precedence label of `(alpha, beta)`.
#[no_mangle]
pub extern "C" fn pc_classify_region(alpha: f64, beta: f64) -> PcRegion {
    match classify_region(alpha, beta) {
        RegionLabel::Delta1 => PcRegion::Delta1,
        RegionLabel::Delta2 => PcRegion::Delta2,
        RegionLabel::Delta3 => PcRegion::Delta3,
        RegionLabel::Delta4 => PcRegion::Delta4,
        RegionLabel::DeltaOnly => PcRegion::DeltaOnly,
        RegionLabel::Outside => PcRegion::Outside,
    }
}

/// Rate constants `K1`, `K2` and `omega*` of `(k, alpha, beta)`.
///
/// # Safety
/// The three outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pc_derived_constants(
    k: f64,
    alpha: f64,
    beta: f64,
    k1: *mut f64,
    k2: *mut f64,
    omega_star: *mut f64,
) -> PcStatus {
    guard(|| {
        let (k1, k2, omega_star) = (
            out_ref(k1, "k1")?,
            out_ref(k2, "k2")?,
            out_ref(omega_star, "omega_star")?,
        );
        let c = derived_constants(&ContractionParams::new(k, alpha, beta, None)?)?;
        *k1 = c.k1;
        *k2 = c.k2;
        *omega_star = c.omega_star;
        Ok(())
    })
}

/// Message of the last failure on this thread, or null if none. Free the
/// result with `pc_string_free`.
#[no_mangle]
pub extern "C" fn pc_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |m| m.clone().into_raw())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
