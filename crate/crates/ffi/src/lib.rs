//! C ABI for `mpcr-core`.
//!
//! Every fallible function returns an [`MpcrStatus`]; on failure a
//! description is available from [`mpcr_last_error`] on the same thread.
//! Objects are handed out as opaque pointers and must be released with the
//! matching `*_free` function. Output buffers are caller-allocated and
//! their lengths are given in elements.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mpcr_core::harness::{self, ExperimentRecord};
use mpcr_core::maps;
use mpcr_core::sim::{self, RngStream, SimMode, Trajectory};
use mpcr_core::{Error, ModelParams, Rates};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpcrStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Parameters or arguments were rejected.
    InvalidArgument = 2,
    /// A numerical precondition failed (overflow risk, tolerance, solver).
    Numerical = 3,
    /// An output buffer is shorter than required.
    BufferTooSmall = 4,
    /// An index was out of range.
    OutOfRange = 5,
    /// An internal panic was caught at the boundary.
    Internal = 6,
}

/// Simulation mode selector for [`mpcr_simulate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpcrMode {
    Mpcr = 0,
    Coupled = 1,
    GaltonWatson = 2,
}

/// Validated model parameters.
pub struct MpcrParams(ModelParams);

/// One simulated trajectory.
pub struct MpcrTrajectory(Trajectory);

/// Output of a paired experiment.
pub struct MpcrRecords(Vec<ExperimentRecord>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MpcrStatus {
    match e {
        Error::OrderingViolation(_)
        | Error::EmptyPopulation
        | Error::BadProbability(_)
        | Error::BadKappa(_)
        | Error::DimensionMismatch { .. }
        | Error::NoTypes
        | Error::UnknownFigure(_)
        | Error::InvalidArgument(_)
        | Error::Io(_) => MpcrStatus::InvalidArgument,
        _ => MpcrStatus::Numerical,
    }
}

struct Fail(MpcrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MpcrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MpcrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MpcrStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(MpcrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(
    p: *mut T,
    len: usize,
    need: usize,
    what: &str,
) -> Result<&'a mut [T], Fail> {
    if len < need {
        return Err(Fail(
            MpcrStatus::BufferTooSmall,
            format!("{what} holds {len} elements, {need} required"),
        ));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    *p = value;
    Ok(())
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mpcr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mpcr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a parameter set from `dim` probabilities and initial counts.
///
/// # Safety
/// `v` and `z0` must point to `dim` readable elements; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mpcr_params_new(
    kappa: u32,
    v: *const f64,
    z0: *const u64,
    dim: usize,
    seed: u64,
    out: *mut *mut MpcrParams,
) -> MpcrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = slice(v, dim, "v")?.to_vec();
        let z0 = slice(z0, dim, "z0")?.to_vec();
        let params = ModelParams::new(kappa, v, z0, seed)?;
        *out = Box::into_raw(Box::new(MpcrParams(params)));
        Ok(())
    })
}

/// # Safety
/// `params` must come from [`mpcr_params_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mpcr_params_free(params: *mut MpcrParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Number of types, or 0 for a null handle.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpcr_params_dim(params: *const MpcrParams) -> usize {
    params.as_ref().map_or(0, |p| p.0.dim())
}

/// Michaelis-Menten constant `K`, or NaN for a null handle.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpcr_params_k(params: *const MpcrParams) -> f64 {
    params.as_ref().map_or(f64::NAN, |p| p.0.k())
}

/// Runs one trajectory of `n_steps` steps on random stream `stream_id`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mpcr_simulate(
    params: *const MpcrParams,
    n_steps: u32,
    mode: MpcrMode,
    stream_id: u64,
    out: *mut *mut MpcrTrajectory,
) -> MpcrStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let mode = match mode {
            MpcrMode::Mpcr => SimMode::MpcrOnly,
            MpcrMode::Coupled => SimMode::Coupled,
            MpcrMode::GaltonWatson => SimMode::GwOnly,
        };
        let mut rng = RngStream::new(p.seed(), stream_id);
        let t = sim::simulate(p, n_steps, mode, &mut rng)?;
        *out = Box::into_raw(Box::new(MpcrTrajectory(t)));
        Ok(())
    })
}

/// Number of stored states (`n_steps + 1`), or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpcr_trajectory_len(traj: *const MpcrTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.states.len())
}

/// Copies state `index` into `z` and, for coupled runs, into `y` (which
/// may be null otherwise). Both buffers need `dim` elements.
///
/// # Safety
/// `traj` must be a live handle; `z` and `y` must hold `len` writable
/// elements when non-null.
#[no_mangle]
pub unsafe extern "C" fn mpcr_trajectory_state(
    traj: *const MpcrTrajectory,
    index: usize,
    z: *mut u64,
    y: *mut u64,
    len: usize,
) -> MpcrStatus {
    guard(|| {
        let t = &get(traj, "trajectory")?.0;
        let state = t.states.get(index).ok_or_else(|| {
            Fail(
                MpcrStatus::OutOfRange,
                format!("state {index} of {}", t.states.len()),
            )
        })?;
        let d = state.z.len();
        slice_mut(z, len, d, "z")?[..d].copy_from_slice(&state.z);
        if let Some(ys) = &state.y {
            if !y.is_null() {
                slice_mut(y, len, d, "y")?[..d].copy_from_slice(ys);
            }
        }
        Ok(())
    })
}

/// # Safety
/// `traj` must come from [`mpcr_simulate`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mpcr_trajectory_free(traj: *mut MpcrTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Paired runs evaluated at the pivot time.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mpcr_run_theorem1(
    params: *const MpcrParams,
    replicates: u64,
    out: *mut *mut MpcrRecords,
) -> MpcrStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = harness::run_theorem1(p, replicates)?;
        *out = Box::into_raw(Box::new(MpcrRecords(r)));
        Ok(())
    })
}

/// Paired runs evaluated at `kappa + n_offset`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mpcr_run_theorem2(
    params: *const MpcrParams,
    n_offset: i32,
    replicates: u64,
    out: *mut *mut MpcrRecords,
) -> MpcrStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = harness::run_theorem2(p, n_offset, replicates)?;
        *out = Box::into_raw(Box::new(MpcrRecords(r)));
        Ok(())
    })
}

/// Number of records, or 0 for a null handle.
///
/// # Safety
/// `records` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpcr_records_len(records: *const MpcrRecords) -> usize {
    records.as_ref().map_or(0, |r| r.0.len())
}

/// Copies record `index`: scaled copy numbers, estimated `W`, the
/// pivot-time limit and `H(W_0)`. Any output pointer may be null.
///
/// # Safety
/// `records` must be a live handle; non-null buffers must hold `len`
/// writable elements.
#[no_mangle]
pub unsafe extern "C" fn mpcr_records_get(
    records: *const MpcrRecords,
    index: usize,
    scaled_z: *mut f64,
    w_hat: *mut f64,
    limit: *mut f64,
    len: usize,
    h_w0: *mut f64,
) -> MpcrStatus {
    guard(|| {
        let all = &get(records, "records")?.0;
        let r = all.get(index).ok_or_else(|| {
            Fail(
                MpcrStatus::OutOfRange,
                format!("record {index} of {}", all.len()),
            )
        })?;
        let d = r.scaled_z.len();
        for (p, src, name) in [
            (scaled_z, &r.scaled_z, "scaled_z"),
            (w_hat, &r.w_hat, "w_hat"),
            (limit, &r.thm1_limit, "limit"),
        ] {
            if !p.is_null() {
                slice_mut(p, len, d, name)?[..d].copy_from_slice(src);
            }
        }
        if !h_w0.is_null() {
            *h_w0 = r.h_w0;
        }
        Ok(())
    })
}

/// Copies the off-pivot columns of record `index`: total and per-type
/// `Z(kappa + n) / K` with their limits. Fails with `OUT_OF_RANGE` for
/// pivot-time records.
///
/// # Safety
/// `records` must be a live handle; non-null buffers must hold `len`
/// writable elements.
#[no_mangle]
pub unsafe extern "C" fn mpcr_records_offset(
    records: *const MpcrRecords,
    index: usize,
    x: *mut f64,
    limit: *mut f64,
    len: usize,
    x_total: *mut f64,
    limit_total: *mut f64,
) -> MpcrStatus {
    guard(|| {
        let all = &get(records, "records")?.0;
        let r = all.get(index).ok_or_else(|| {
            Fail(
                MpcrStatus::OutOfRange,
                format!("record {index} of {}", all.len()),
            )
        })?;
        let o = r.offset.as_ref().ok_or_else(|| {
            Fail(
                MpcrStatus::OutOfRange,
                "record has no offset columns".into(),
            )
        })?;
        let d = o.x.len();
        if !x.is_null() {
            slice_mut(x, len, d, "x")?[..d].copy_from_slice(&o.x);
        }
        if !limit.is_null() {
            slice_mut(limit, len, d, "limit")?[..d].copy_from_slice(&o.limit);
        }
        if !x_total.is_null() {
            *x_total = o.x_total;
        }
        if !limit_total.is_null() {
            *limit_total = o.limit_total;
        }
        Ok(())
    })
}

/// # Safety
/// `records` must come from a `mpcr_run_*` call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mpcr_records_free(records: *mut MpcrRecords) {
    if !records.is_null() {
        drop(Box::from_raw(records));
    }
}

/// `f^(n)(r)`; negative `n` iterates the inverse.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mpcr_f(r: f64, n: i32, v1: f64, out: *mut f64) -> MpcrStatus {
    guard(|| write(out, maps::f_apply(r, n, v1)?, "out"))
}

/// `f^-1(y)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mpcr_f_inverse(y: f64, v1: f64, out: *mut f64) -> MpcrStatus {
    guard(|| write(out, maps::f_inverse(y, v1)?, "out"))
}

/// `H(r)` to absolute accuracy `tol`; `bound` (optional) receives the
/// certified error bound.
///
/// # Safety
/// `value` must be writable; `bound` may be null.
#[no_mangle]
pub unsafe extern "C" fn mpcr_h(
    r: f64,
    v1: f64,
    tol: f64,
    value: *mut f64,
    bound: *mut f64,
) -> MpcrStatus {
    guard(|| {
        let h = maps::h_eval(r, v1, tol)?;
        write(value, h.value, "value")?;
        if !bound.is_null() {
            *bound = h.truncation_bound;
        }
        Ok(())
    })
}

/// `G_i(r)` for all `dim` types; `bounds` may be null.
///
/// # Safety
/// `v` must hold `dim` readable elements; `values` (and `bounds` when
/// non-null) `dim` writable ones.
#[no_mangle]
pub unsafe extern "C" fn mpcr_g(
    r: f64,
    v: *const f64,
    dim: usize,
    tol: f64,
    values: *mut f64,
    bounds: *mut f64,
) -> MpcrStatus {
    guard(|| {
        let rates = Rates::new(slice(v, dim, "v")?.to_vec())?;
        let g = maps::g_eval(r, &rates, tol)?;
        let out = slice_mut(values, dim, dim, "values")?;
        for (o, e) in out.iter_mut().zip(&g) {
            *o = e.value;
        }
        if !bounds.is_null() {
            for (o, e) in slice_mut(bounds, dim, dim, "bounds")?.iter_mut().zip(&g) {
                *o = e.truncation_bound;
            }
        }
        Ok(())
    })
}

/// `F^(n)(x)` for a `dim`-vector; negative `n` iterates the inverse.
///
/// # Safety
/// `x`, `v` must hold `dim` readable elements and `out` `dim` writable ones.
#[no_mangle]
pub unsafe extern "C" fn mpcr_multi_iterate(
    x: *const f64,
    n: i32,
    v: *const f64,
    dim: usize,
    out: *mut f64,
) -> MpcrStatus {
    guard(|| {
        let rates = Rates::new(slice(v, dim, "v")?.to_vec())?;
        let y = maps::multi_iterate(slice(x, dim, "x")?, n, &rates)?;
        slice_mut(out, dim, dim, "out")?.copy_from_slice(&y);
        Ok(())
    })
}
