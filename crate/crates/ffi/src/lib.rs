//! C ABI for `qsl-core`.
//!
//! States and trajectories are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every entry point returns a
//! [`QslStatus`]; on failure the message is kept per thread and can be read
//! with [`qsl_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qsl_core::bounds::{self, BetaLaw, BoundReport};
use qsl_core::dynamics::{
    appendix_b_trajectory, dephasing_trajectory, gad_trajectory, kraus_trajectory, AppendixBParams, DecayLaw,
    DephasingParams, GADParams, KrausSchedule, ThermalKrausParams, Trajectory,
};
use qsl_core::experiments::{bounds_from_json, parse_input, BoundsOptions};
use qsl_core::metric;
use qsl_core::{purity, ComplexMatrix, DensityMatrix, Error};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QslStatus {
    Ok = 0,
    NullPointer = 1,
    /// The input is not a valid density matrix or has the wrong shape.
    Validation = 2,
    /// Numerical failure: pole, drift, positivity loss, inconsistent path.
    Numerical = 3,
    InvalidArgument = 4,
    /// Malformed JSON or an unreadable file.
    Config = 5,
    Panic = 6,
}

/// Interpolation profile for [`qsl_trajectory_geodesic`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QslBeta {
    Linear = 0,
    Quadratic = 1,
    Sine = 2,
}

/// Opaque density matrix.
pub struct QslDensity(DensityMatrix);

/// Opaque sampled trajectory.
pub struct QslTrajectory(Trajectory);

/// Bounds for one trajectory.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QslReport {
    pub tau: f64,
    pub length_d: f64,
    pub length_e: f64,
    pub dist_d: f64,
    pub dist_e: f64,
    pub dist_phi: f64,
    pub tau_qsl: f64,
    pub tau_e: f64,
    pub tau_phi: f64,
    pub tau_combined: f64,
    pub ratio_qsl: f64,
    pub ratio_e: f64,
    pub ratio_phi: f64,
    pub gap: f64,
    pub nodes: usize,
}

impl From<BoundReport> for QslReport {
    fn from(r: BoundReport) -> Self {
        Self {
            tau: r.tau,
            length_d: r.length_d,
            length_e: r.length_e,
            dist_d: r.dist_d,
            dist_e: r.dist_e,
            dist_phi: r.dist_phi,
            tau_qsl: r.tau_qsl,
            tau_e: r.tau_e,
            tau_phi: r.tau_phi,
            tau_combined: r.tau_combined,
            ratio_qsl: r.ratio_qsl,
            ratio_e: r.ratio_e,
            ratio_phi: r.ratio_phi,
            gap: r.gap,
            nodes: r.nodes,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> QslStatus {
    match e {
        Error::InvalidArgument(_) => QslStatus::InvalidArgument,
        Error::Config(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => QslStatus::Config,
        other => match other.exit_code() {
            2 => QslStatus::Validation,
            3 => QslStatus::Numerical,
            _ => QslStatus::Config,
        },
    }
}

fn guard<F>(f: F) -> QslStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            QslStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            QslStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            let status = status_of(&e);
            set_error(e.to_string());
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            QslStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Nulls `*out`, then stores the trajectory built by `f` on success.
unsafe fn build_trajectory<F>(out: *mut *mut QslTrajectory, f: F) -> QslStatus
where
    F: FnOnce() -> Result<Trajectory, Failure>,
{
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        *out = Box::into_raw(Box::new(QslTrajectory(f()?)));
        Ok(())
    })
}

fn arg(msg: String) -> Failure {
    Failure::Core(Error::InvalidArgument(msg))
}

/// Copies the calling thread's last error message into `buf` as a
/// NUL-terminated string, truncating if needed. Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qsl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qsl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a `dim × dim` density matrix from row-major real and imaginary
/// parts. `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `dim * dim` doubles; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_density_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut QslDensity,
) -> QslStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if dim == 0 {
            return Err(arg("dimension must be positive".into()));
        }
        let n = dim.checked_mul(dim).ok_or_else(|| arg("dimension overflow".into()))?;
        let re = slice(re, n, "re")?;
        let entries: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&r| Complex64::new(r, 0.0)).collect()
        } else {
            let im = slice(im, n, "im")?;
            re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect()
        };
        let m = ComplexMatrix::from_row_major(dim, dim, &entries)?;
        *out = Box::into_raw(Box::new(QslDensity(DensityMatrix::new(m)?)));
        Ok(())
    })
}

/// Qubit state `(I + r·σ)/2`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_density_from_bloch(x: f64, y: f64, z: f64, out: *mut *mut QslDensity) -> QslStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        *out = Box::into_raw(Box::new(QslDensity(DensityMatrix::from_bloch([x, y, z])?)));
        Ok(())
    })
}

/// # Safety
/// `rho` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qsl_density_free(rho: *mut QslDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// # Safety
/// `rho` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_density_dim(rho: *const QslDensity, out: *mut usize) -> QslStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(rho, "rho")?.0.dim();
        Ok(())
    })
}

/// # Safety
/// `rho` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_density_purity(rho: *const QslDensity, out: *mut f64) -> QslStatus {
    guard(|| {
        *out_ref(out, "out")? = purity(&deref(rho, "rho")?.0);
        Ok(())
    })
}

unsafe fn pair_metric(
    a: *const QslDensity,
    b: *const QslDensity,
    out: *mut f64,
    f: fn(&DensityMatrix, &DensityMatrix) -> qsl_core::Result<f64>,
) -> QslStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = f(&deref(a, "a")?.0, &deref(b, "b")?.0)?;
        Ok(())
    })
}

/// Angle between the normalized states, in `[0, π/2]`.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_distance_d(a: *const QslDensity, b: *const QslDensity, out: *mut f64) -> QslStatus {
    pair_metric(a, b, out, metric::distance_d)
}

/// Hilbert–Schmidt distance `‖a − b‖`.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_distance_e(a: *const QslDensity, b: *const QslDensity, out: *mut f64) -> QslStatus {
    pair_metric(a, b, out, metric::distance_e)
}

/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_distance_phi(a: *const QslDensity, b: *const QslDensity, out: *mut f64) -> QslStatus {
    pair_metric(a, b, out, metric::distance_phi)
}

/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_fidelity_gm(a: *const QslDensity, b: *const QslDensity, out: *mut f64) -> QslStatus {
    pair_metric(a, b, out, metric::fidelity_gm)
}

/// Amplitude damping into the ground state at constant rate `gamma`;
/// `excited` holds the `n_excited` excited-level populations.
///
/// # Safety
/// `excited` must point to `n_excited` doubles and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_gad(
    excited: *const f64,
    n_excited: usize,
    gamma: f64,
    tau: f64,
    grid: usize,
    out: *mut *mut QslTrajectory,
) -> QslStatus {
    build_trajectory(out, || {
        let excited = slice(excited, n_excited, "excited")?.to_vec();
        let params = GADParams::new(excited, DecayLaw::Constant(gamma))?;
        Ok(gad_trajectory(&params, tau, grid)?)
    })
}

/// Pure dephasing of `rho0` at constant rate `gamma`.
///
/// # Safety
/// `rho0` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_dephasing(
    rho0: *const QslDensity,
    gamma: f64,
    tau: f64,
    grid: usize,
    out: *mut *mut QslTrajectory,
) -> QslStatus {
    build_trajectory(out, || {
        let params = DephasingParams {
            rho0: deref(rho0, "rho0")?.0.clone(),
            law: DecayLaw::Constant(gamma),
        };
        Ok(dephasing_trajectory(&params, tau, grid)?)
    })
}

/// Thermal Kraus channel on a pure qubit with `p(t) = ln(1 + t/scale)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_thermal_kraus(
    c: f64,
    rho11: f64,
    scale: f64,
    tau: f64,
    grid: usize,
    out: *mut *mut QslTrajectory,
) -> QslStatus {
    build_trajectory(out, || {
        let params = ThermalKrausParams::pure(c, KrausSchedule::LogOnePlus { scale }, rho11)?;
        Ok(kraus_trajectory(&params, tau, grid)?)
    })
}

/// Driven, damped qubit from Bloch vector `r0[3]`.
///
/// # Safety
/// `r0` must point to three doubles and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_appendix_b(
    theta: f64,
    omega_l: f64,
    gamma: f64,
    r0: *const f64,
    tau: f64,
    grid: usize,
    out: *mut *mut QslTrajectory,
) -> QslStatus {
    build_trajectory(out, || {
        let r = slice(r0, 3, "r0")?;
        let params = AppendixBParams::new(theta, omega_l, gamma, [r[0], r[1], r[2]])?;
        Ok(appendix_b_trajectory(&params, tau, grid)?)
    })
}

/// Straight segment from `rho0` to `rho_tau`; `beta` is a [`QslBeta`] value.
///
/// # Safety
/// `rho0` and `rho_tau` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_geodesic(
    rho0: *const QslDensity,
    rho_tau: *const QslDensity,
    beta: u32,
    tau: f64,
    grid: usize,
    out: *mut *mut QslTrajectory,
) -> QslStatus {
    build_trajectory(out, || {
        let law = match beta {
            b if b == QslBeta::Linear as u32 => BetaLaw::Linear,
            b if b == QslBeta::Quadratic as u32 => BetaLaw::Quadratic,
            b if b == QslBeta::Sine as u32 => BetaLaw::Sine,
            other => return Err(arg(format!("unknown beta law {other}"))),
        };
        Ok(bounds::geodesic_path(
            &deref(rho0, "rho0")?.0,
            &deref(rho_tau, "rho_tau")?.0,
            law,
            tau,
            grid,
        )?)
    })
}

/// Trajectory from a JSON model description, e.g.
/// `{"model": "gad", "excited": [0.6], "tau": 1}`, on `grid` nodes.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_from_json(
    json: *const c_char,
    grid: usize,
    out: *mut *mut QslTrajectory,
) -> QslStatus {
    build_trajectory(out, || Ok(parse_input(read_str(json)?)?.trajectory(grid)?))
}

/// # Safety
/// `traj` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_free(traj: *mut QslTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of time nodes.
///
/// # Safety
/// `traj` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_len(traj: *const QslTrajectory, out: *mut usize) -> QslStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(traj, "traj")?.0.len();
        Ok(())
    })
}

/// Copy of the state at node `index`.
///
/// # Safety
/// `traj` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_state(
    traj: *const QslTrajectory,
    index: usize,
    out: *mut *mut QslDensity,
) -> QslStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let traj = &deref(traj, "traj")?.0;
        let state = traj
            .states()
            .get(index)
            .ok_or_else(|| arg(format!("index {index} out of range for {} nodes", traj.len())))?;
        *out = Box::into_raw(Box::new(QslDensity(state.clone())));
        Ok(())
    })
}

/// Every bound for the sampled trajectory.
///
/// # Safety
/// `traj` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_report(traj: *const QslTrajectory, out: *mut QslReport) -> QslStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = bounds::report(&deref(traj, "traj")?.0)?.into();
        Ok(())
    })
}

/// Whether the trajectory is a straight segment within `tol`.
///
/// # Safety
/// `traj` must be a live handle; `is_geodesic` must be valid; `max_residual`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn qsl_trajectory_is_geodesic(
    traj: *const QslTrajectory,
    tol: f64,
    is_geodesic: *mut bool,
    max_residual: *mut f64,
) -> QslStatus {
    guard(|| {
        let flag = out_ref(is_geodesic, "is_geodesic")?;
        let check = bounds::is_geodesic(&deref(traj, "traj")?.0, tol)?;
        *flag = check.is_geodesic;
        if let Some(r) = max_residual.as_mut() {
            *r = check.max_residual;
        }
        Ok(())
    })
}

/// Grid-converged report for a JSON state pair or model description, as
/// accepted by `qsl bounds`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsl_bounds_from_json(json: *const c_char, out: *mut QslReport) -> QslStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = bounds_from_json(read_str(json)?, BoundsOptions::default())?.into();
        Ok(())
    })
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null("json"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| arg(format!("input is not UTF-8: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_follow_error_kinds() {
        let cases = [
            (Error::NotTraceless(1.0), QslStatus::Validation),
            (Error::Shape("x".into()), QslStatus::Validation),
            (Error::InvalidArgument("x".into()), QslStatus::InvalidArgument),
            (Error::PoleAt(1.0), QslStatus::Numerical),
            (Error::InconsistentPath(0.1), QslStatus::Numerical),
            (Error::Numeric("x".into()), QslStatus::Numerical),
            (Error::Config("x".into()), QslStatus::Config),
        ];
        for (e, s) in cases {
            assert_eq!(status_of(&e), s, "{e}");
        }
    }

    #[test]
    fn panics_are_caught() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, QslStatus::Panic);
        let mut buf = [0 as c_char; 64];
        unsafe { qsl_last_error_message(buf.as_mut_ptr(), buf.len()) };
        let msg = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
        assert_eq!(msg, "panic: boom");
    }
}
