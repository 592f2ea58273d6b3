//! C interface to mirrorflow.
//!
//! Objects are opaque handles created by `mf_*_new`/`mf_*_from_*` and released
//! with the matching `mf_*_free`. Every fallible call returns an [`MfStatus`];
//! on failure a description is available from [`mf_last_error_message`] until
//! the next failing call on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::ptr;

use mirrorflow::config::ExperimentConfig;
use mirrorflow::dynamics::{DynamicsError, Trajectory};
use mirrorflow::geometry::Region;
use mirrorflow::mirror::Regularizer;
use mirrorflow::runner::{self, RunError, Setup};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfRegularizer {
    Euclidean = 0,
    Entropic = 1,
    VonNeumann = 2,
}

impl From<MfRegularizer> for Regularizer {
    fn from(r: MfRegularizer) -> Self {
        match r {
            MfRegularizer::Euclidean => Regularizer::Euclidean,
            MfRegularizer::Entropic => Regularizer::Entropic,
            MfRegularizer::VonNeumann => Regularizer::VonNeumann,
        }
    }
}

/// Scalar series logged along a trajectory.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfSeries {
    Time = 0,
    Value = 1,
    ValueAverage = 2,
    ValueBest = 3,
    Fenchel = 4,
    Eta = 5,
}

pub struct MfRegion {
    inner: Region,
}

pub struct MfExperiment {
    config: ExperimentConfig,
    setup: Setup,
}

pub struct MfTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(MfStatus, String);

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let status = match &e {
            RunError::Dynamics(DynamicsError::NonFinite { .. }) => MfStatus::Numerical,
            RunError::Io { .. } | RunError::Csv(_) => MfStatus::Io,
            _ => MfStatus::Config,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: MfStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MfStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(MfStatus::NullPointer, format!("`{what}` is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(MfStatus::NullPointer, format!("`{what}` is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(MfStatus::NullPointer, format!("`{what}` is null")))
}

unsafe fn string(p: *const c_char, what: &str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(fail(MfStatus::NullPointer, format!("`{what}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| fail(MfStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(MfStatus::NullPointer, "`out` is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failing call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Box `[lower, upper]` in `dim` dimensions.
///
/// # Safety
/// `lower` and `upper` must point to `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_region_box(
    lower: *const f64,
    upper: *const f64,
    dim: usize,
    out: *mut *mut MfRegion,
) -> MfStatus {
    guard(|| {
        let lo = slice(lower, dim, "lower")?.to_vec();
        let hi = slice(upper, dim, "upper")?.to_vec();
        let inner = Region::boxed(lo, hi).map_err(|e| fail(MfStatus::InvalidArgument, e.to_string()))?;
        store(out, MfRegion { inner })
    })
}

/// Simplex `{x ≥ 0, Σx = mass}` in `dim` dimensions.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_region_simplex(mass: f64, dim: usize, out: *mut *mut MfRegion) -> MfStatus {
    guard(|| {
        let inner = Region::simplex(mass, dim).map_err(|e| fail(MfStatus::InvalidArgument, e.to_string()))?;
        store(out, MfRegion { inner })
    })
}

/// Dimension of the region, 0 for a null handle.
///
/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_region_dim(region: *const MfRegion) -> usize {
    region.as_ref().map_or(0, |r| r.inner.dim())
}

/// Euclidean projection of `y` onto the region.
///
/// # Safety
/// `y` and `out` must point to `len` doubles, `len` equal to the region dimension.
#[no_mangle]
pub unsafe extern "C" fn mf_region_project(
    region: *const MfRegion,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> MfStatus {
    guard(|| {
        let r = &handle(region, "region")?.inner;
        check_len(r, len)?;
        let y = slice(y, len, "y")?;
        let out = slice_mut(out, len, "out")?;
        r.project_into(y, out)
            .map_err(|e| fail(MfStatus::InvalidArgument, e.to_string()))
    })
}

/// Mirror map `Q(y)` of the regularizer on the region.
///
/// # Safety
/// `y` and `out` must point to `len` doubles, `len` equal to the region dimension.
#[no_mangle]
pub unsafe extern "C" fn mf_mirror_map(
    region: *const MfRegion,
    reg: MfRegularizer,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> MfStatus {
    guard(|| {
        let r = &handle(region, "region")?.inner;
        check_len(r, len)?;
        let y = slice(y, len, "y")?;
        let out = slice_mut(out, len, "out")?;
        Regularizer::from(reg)
            .mirror_into(r, y, out)
            .map_err(|e| fail(MfStatus::InvalidArgument, e.to_string()))
    })
}

/// Fenchel coupling `F(p, y) = h(p) + h*(y) − ⟨y, p⟩`.
///
/// # Safety
/// `p` and `y` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_fenchel_coupling(
    region: *const MfRegion,
    reg: MfRegularizer,
    p: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> MfStatus {
    guard(|| {
        let r = &handle(region, "region")?.inner;
        check_len(r, len)?;
        let p = slice(p, len, "p")?;
        let y = slice(y, len, "y")?;
        let v = Regularizer::from(reg)
            .fenchel_coupling(r, p, y)
            .map_err(|e| fail(MfStatus::InvalidArgument, e.to_string()))?;
        let out = slice_mut(out, 1, "out")?;
        out[0] = v;
        Ok(())
    })
}

fn check_len(r: &Region, len: usize) -> Result<(), Failure> {
    if len != r.dim() {
        return Err(fail(
            MfStatus::InvalidArgument,
            format!("length {len} does not match region dimension {}", r.dim()),
        ));
    }
    Ok(())
}

/// Releases a region; null is ignored.
///
/// # Safety
/// `region` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_region_free(region: *mut MfRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// Parses experiment config text and builds its components. Relative paths
/// in the text resolve against `base_dir` (null means the working directory).
///
/// # Safety
/// `text` must be a NUL-terminated string, `base_dir` null or NUL-terminated,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mf_experiment_from_config(
    text: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut MfExperiment,
) -> MfStatus {
    guard(|| {
        let text = string(text, "text")?;
        let base = if base_dir.is_null() {
            PathBuf::from(".")
        } else {
            PathBuf::from(string(base_dir, "base_dir")?)
        };
        let config = ExperimentConfig::parse(&text, &base).map_err(|e| Failure::from(RunError::from(e)))?;
        let setup = runner::build(&config)?;
        store(out, MfExperiment { config, setup })
    })
}

/// State dimension of the experiment.
///
/// # Safety
/// `exp` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_experiment_dim(exp: *const MfExperiment) -> usize {
    exp.as_ref().map_or(0, |e| e.setup.region.dim())
}

/// Replaces the ensemble seed.
///
/// # Safety
/// `exp` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_experiment_set_seed(exp: *mut MfExperiment, seed: u64) -> MfStatus {
    guard(|| {
        let e = exp
            .as_mut()
            .ok_or_else(|| fail(MfStatus::NullPointer, "`exp` is null"))?;
        e.config.seed = seed;
        Ok(())
    })
}

/// Reference minimizer `x*` (written to `out`, `len` doubles) and value `f*`.
///
/// # Safety
/// `out` must point to `len` doubles and `f_star` be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_experiment_minimum(
    exp: *const MfExperiment,
    out: *mut f64,
    len: usize,
    f_star: *mut f64,
) -> MfStatus {
    guard(|| {
        let e = handle(exp, "exp")?;
        check_len(&e.setup.region, len)?;
        slice_mut(out, len, "out")?.copy_from_slice(&e.setup.target);
        slice_mut(f_star, 1, "f_star")?[0] = e.setup.f_star;
        Ok(())
    })
}

/// Integrates one sample path (noise stream `path`) of the experiment.
///
/// # Safety
/// `exp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mf_experiment_run_path(
    exp: *const MfExperiment,
    path: u64,
    out: *mut *mut MfTrajectory,
) -> MfStatus {
    guard(|| {
        let e = handle(exp, "exp")?;
        let mut cfg = e.setup.integrator(&e.config);
        cfg.path = path;
        let inner = e
            .setup
            .dynamics()
            .integrate(&cfg)
            .map_err(|err| Failure::from(RunError::from(err)))?;
        store(out, MfTrajectory { inner })
    })
}

/// Runs the whole ensemble and writes the usual files into `out_dir`.
///
/// # Safety
/// `exp` must be a live handle and `out_dir` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mf_experiment_run_to_dir(exp: *const MfExperiment, out_dir: *const c_char) -> MfStatus {
    guard(|| {
        let e = handle(exp, "exp")?;
        let mut cfg = e.config.clone();
        cfg.out_dir = Path::new(&string(out_dir, "out_dir")?).to_path_buf();
        runner::run_experiment(&cfg)?;
        Ok(())
    })
}

/// Releases an experiment; null is ignored.
///
/// # Safety
/// `exp` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_experiment_free(exp: *mut MfExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// Number of logged samples, 0 for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_trajectory_len(traj: *const MfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.len())
}

/// Copies one scalar series into `out`, which must hold `mf_trajectory_len` doubles.
///
/// # Safety
/// `out` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mf_trajectory_series(
    traj: *const MfTrajectory,
    which: MfSeries,
    out: *mut f64,
    cap: usize,
) -> MfStatus {
    guard(|| {
        let t = &handle(traj, "traj")?.inner;
        let src: &[f64] = match which {
            MfSeries::Time => &t.times,
            MfSeries::Value => &t.f_values,
            MfSeries::ValueAverage => &t.f_avg,
            MfSeries::ValueBest => &t.f_best,
            MfSeries::Eta => &t.etas,
            MfSeries::Fenchel => t
                .fenchel_to_target
                .as_deref()
                .ok_or_else(|| fail(MfStatus::InvalidArgument, "trajectory has no Fenchel series"))?,
        };
        if cap < src.len() {
            return Err(fail(
                MfStatus::BufferTooSmall,
                format!("need {} doubles, got {cap}", src.len()),
            ));
        }
        slice_mut(out, src.len(), "out")?.copy_from_slice(src);
        Ok(())
    })
}

/// Copies the primal point of logged sample `k` into `out` (`cap` ≥ dimension).
///
/// # Safety
/// `out` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mf_trajectory_primal(
    traj: *const MfTrajectory,
    k: usize,
    out: *mut f64,
    cap: usize,
) -> MfStatus {
    guard(|| {
        let t = &handle(traj, "traj")?.inner;
        let x = t
            .primal_path
            .get(k)
            .ok_or_else(|| fail(MfStatus::InvalidArgument, format!("sample {k} out of range")))?;
        if cap < x.len() {
            return Err(fail(
                MfStatus::BufferTooSmall,
                format!("need {} doubles, got {cap}", x.len()),
            ));
        }
        slice_mut(out, x.len(), "out")?.copy_from_slice(x);
        Ok(())
    })
}

/// Releases a trajectory; null is ignored.
///
/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_trajectory_free(traj: *mut MfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
