//! C ABI for the mixed-membership factorization solver.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! fallible call returns an [`MmfCode`] and writes results through out
//! pointers. Buffers are caller-allocated with explicit lengths. The last
//! failure message per thread is available via [`mmf_last_error`].
//!
//! The generated header lives at `include/mmfact.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mmfact_core::gop::{self, SolveReport, SolveStatus};
use mmfact_core::ndarray::Array2;
use mmfact_core::problem::{generate_instance, ProblemInstance, SolverConfig};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).ok();
    });
}

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmfCode {
    MmfOk = 0,
    MmfNullArgument = 1,
    MmfInvalidArgument = 2,
    MmfBufferTooSmall = 3,
    MmfSolveFailed = 4,
    MmfPanic = 5,
}

/// Terminal state of a solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmfSolveStatus {
    MmfConverged = 0,
    MmfIterationLimit = 1,
    MmfTimeLimit = 2,
}

/// Solver tolerances and limits; plain data, safe to copy.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MmfConfig {
    pub epsilon: f64,
    pub max_iterations: u64,
    /// Wall-clock limit in seconds; pass a non-positive value for no limit.
    pub max_wall_seconds: f64,
    pub workers: u64,
    pub dedup_tau: f64,
    pub zero_tau: f64,
    pub interior_tau: f64,
    pub lp_tol: f64,
    pub qp_tol: f64,
}

impl MmfConfig {
    fn to_core(self) -> SolverConfig {
        SolverConfig {
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            max_wall_seconds: if self.max_wall_seconds > 0.0 {
                self.max_wall_seconds
            } else {
                f64::INFINITY
            },
            workers: self.workers.max(1) as usize,
            dedup_tau: self.dedup_tau,
            zero_tau: self.zero_tau,
            interior_tau: self.interior_tau,
            lp_tol: self.lp_tol,
            qp_tol: self.qp_tol,
        }
    }
}

/// Opaque problem-instance handle.
pub struct MmfInstance {
    inner: ProblemInstance,
}

/// Opaque solve-report handle.
pub struct MmfReport {
    inner: SolveReport,
}

/// Default configuration values.
#[no_mangle]
pub extern "C" fn mmf_config_default() -> MmfConfig {
    let d = SolverConfig::default();
    MmfConfig {
        epsilon: d.epsilon,
        max_iterations: d.max_iterations,
        max_wall_seconds: 0.0,
        workers: d.workers as u64,
        dedup_tau: d.dedup_tau,
        zero_tau: d.zero_tau,
        interior_tau: d.interior_tau,
        lp_tol: d.lp_tol,
        qp_tol: d.qp_tol,
    }
}

/// Creates an instance from a row-major `m × n` observation matrix.
///
/// # Safety
/// `y` must point to `m * n` doubles and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmf_instance_new(
    y: *const f64,
    m: usize,
    n: usize,
    k: usize,
    p: f64,
    epsilon: f64,
    seed: u64,
    out: *mut *mut MmfInstance,
) -> MmfCode {
    if y.is_null() || out.is_null() {
        set_error("null pointer argument");
        return MmfCode::MmfNullArgument;
    }
    if m == 0 || n == 0 || m.checked_mul(n).is_none() {
        set_error("matrix dimensions must be positive");
        return MmfCode::MmfInvalidArgument;
    }
    let data = std::slice::from_raw_parts(y, m * n);
    let matrix = match Array2::from_shape_vec((m, n), data.to_vec()) {
        Ok(mat) => mat,
        Err(e) => {
            set_error(e.to_string());
            return MmfCode::MmfInvalidArgument;
        }
    };
    match ProblemInstance::new(matrix, k, p, epsilon, seed) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(MmfInstance { inner }));
            MmfCode::MmfOk
        }
        Err(e) => {
            set_error(e.to_string());
            MmfCode::MmfInvalidArgument
        }
    }
}

/// Creates a synthetic instance (two subtypes). Optional out buffers receive
/// the ground truth in row-major order: `truth_x` is `m × 2`, `truth_theta`
/// is `2 × n`.
///
/// # Safety
/// `out` must be valid; the truth buffers, when non-null, must hold at least
/// `truth_x_len` and `truth_theta_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mmf_instance_generate(
    m: usize,
    n: usize,
    seed: u64,
    out: *mut *mut MmfInstance,
    truth_x: *mut f64,
    truth_x_len: usize,
    truth_theta: *mut f64,
    truth_theta_len: usize,
) -> MmfCode {
    if out.is_null() {
        set_error("null pointer argument");
        return MmfCode::MmfNullArgument;
    }
    let (instance, truth) = match generate_instance(m, n, seed) {
        Ok(pair) => pair,
        Err(e) => {
            set_error(e.to_string());
            return MmfCode::MmfInvalidArgument;
        }
    };
    if !truth_x.is_null() {
        let need = truth.x.len();
        if truth_x_len < need {
            set_error(format!("truth_x needs {need} doubles"));
            return MmfCode::MmfBufferTooSmall;
        }
        for (slot, v) in
            std::slice::from_raw_parts_mut(truth_x, need).iter_mut().zip(truth.x.iter())
        {
            *slot = *v;
        }
    }
    if !truth_theta.is_null() {
        let need = truth.theta.len();
        if truth_theta_len < need {
            set_error(format!("truth_theta needs {need} doubles"));
            return MmfCode::MmfBufferTooSmall;
        }
        for (slot, v) in std::slice::from_raw_parts_mut(truth_theta, need)
            .iter_mut()
            .zip(truth.theta.iter())
        {
            *slot = *v;
        }
    }
    *out = Box::into_raw(Box::new(MmfInstance { inner: instance }));
    MmfCode::MmfOk
}

/// # Safety
/// `instance` must be a pointer returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mmf_instance_free(instance: *mut MmfInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of features (rows of y). Zero on a null handle.
///
/// # Safety
/// `instance` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mmf_instance_m(instance: *const MmfInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.m())
}

/// Number of samples (columns of y). Zero on a null handle.
///
/// # Safety
/// `instance` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mmf_instance_n(instance: *const MmfInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.n())
}

/// Subtype count K. Zero on a null handle.
///
/// # Safety
/// `instance` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mmf_instance_k(instance: *const MmfInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.k)
}

/// Runs the solver; on success `out` receives a report handle.
///
/// # Safety
/// `instance` must be a valid handle; `config` may be null for defaults;
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mmf_solve(
    instance: *const MmfInstance,
    config: *const MmfConfig,
    out: *mut *mut MmfReport,
) -> MmfCode {
    if instance.is_null() || out.is_null() {
        set_error("null pointer argument");
        return MmfCode::MmfNullArgument;
    }
    let inst = &(*instance).inner;
    let cfg = if config.is_null() {
        let mut c = mmf_config_default().to_core();
        c.epsilon = inst.epsilon;
        c
    } else {
        (*config).to_core()
    };
    let result = catch_unwind(AssertUnwindSafe(|| gop::run(inst, &cfg)));
    match result {
        Ok(Ok(report)) => {
            *out = Box::into_raw(Box::new(MmfReport { inner: report }));
            MmfCode::MmfOk
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            MmfCode::MmfSolveFailed
        }
        Err(_) => {
            set_error("solver panicked");
            MmfCode::MmfPanic
        }
    }
}

/// # Safety
/// `report` must be a pointer returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mmf_report_free(report: *mut MmfReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be valid or null (null reports as iteration limit).
#[no_mangle]
pub unsafe extern "C" fn mmf_report_status(report: *const MmfReport) -> MmfSolveStatus {
    match report.as_ref().map(|r| r.inner.status) {
        Some(SolveStatus::Converged) => MmfSolveStatus::MmfConverged,
        Some(SolveStatus::TimeLimit) => MmfSolveStatus::MmfTimeLimit,
        _ => MmfSolveStatus::MmfIterationLimit,
    }
}

/// Tightest upper bound; NaN on a null handle.
///
/// # Safety
/// `report` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mmf_report_pubd(report: *const MmfReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.pubd)
}

/// Tightest lower bound; NaN on a null handle.
///
/// # Safety
/// `report` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mmf_report_rlbd(report: *const MmfReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.rlbd)
}

/// Final duality gap; NaN on a null handle.
///
/// # Safety
/// `report` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mmf_report_gap(report: *const MmfReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.gap)
}

/// # Safety
/// `report` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mmf_report_iterations(report: *const MmfReport) -> u64 {
    report.as_ref().map_or(0, |r| r.inner.iterations)
}

unsafe fn copy_matrix(matrix: &Array2<f64>, buf: *mut f64, len: usize) -> MmfCode {
    if buf.is_null() {
        set_error("null buffer");
        return MmfCode::MmfNullArgument;
    }
    let need = matrix.len();
    if len < need {
        set_error(format!("buffer needs {need} doubles"));
        return MmfCode::MmfBufferTooSmall;
    }
    let out = std::slice::from_raw_parts_mut(buf, need);
    for (slot, v) in out.iter_mut().zip(matrix.iter()) {
        *slot = *v;
    }
    MmfCode::MmfOk
}

/// Copies the best `x` (row-major M×K) into `buf`.
///
/// # Safety
/// `report` must be valid; `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mmf_report_x(
    report: *const MmfReport,
    buf: *mut f64,
    len: usize,
) -> MmfCode {
    let Some(r) = report.as_ref() else {
        set_error("null report");
        return MmfCode::MmfNullArgument;
    };
    copy_matrix(&r.inner.best.x, buf, len)
}

/// Copies the best `theta` (row-major K×N) into `buf`.
///
/// # Safety
/// `report` must be valid; `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mmf_report_theta(
    report: *const MmfReport,
    buf: *mut f64,
    len: usize,
) -> MmfCode {
    let Some(r) = report.as_ref() else {
        set_error("null report");
        return MmfCode::MmfNullArgument;
    };
    copy_matrix(&r.inner.best.theta, buf, len)
}

/// Full report as a JSON string; free with [`mmf_string_free`]. Null on a
/// null handle.
///
/// # Safety
/// `report` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mmf_report_json(report: *const MmfReport) -> *mut c_char {
    let Some(r) = report.as_ref() else {
        return ptr::null_mut();
    };
    let json = serde_json::to_string(&r.inner.to_json_value())
        .expect("report serialization cannot fail");
    CString::new(json).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must come from [`mmf_report_json`], freed once.
#[no_mangle]
pub unsafe extern "C" fn mmf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread; null when none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mmf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
