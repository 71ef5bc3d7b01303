//! Speed-limit times, path lengths and geodesics.
//!
//! For a trajectory on `[0, τ]` with path length `L = ∫ v_t dt` in some
//! metric and endpoint distance `d`, the bound is `τ_bound = d·τ/L ≤ τ`,
//! with equality exactly when the path is a geodesic of that metric.
//! Straight segments `ρ_t = ρ₀ + β(t)(ρ_τ − ρ₀)` with monotone `β` are
//! geodesics of both the angle metric `D` and the Euclidean metric `E`.

use serde::Serialize;

use crate::dynamics::{GADParams, Trajectory};
use crate::error::{Error, Result};
use crate::matrix::{real_inner, ComplexMatrix};
use crate::metric::{distance_d, distance_e, distance_phi, speed_d, speed_e};
use crate::state::{validate_density, DensityMatrix};

/// Minimum number of nodes accepted by [`path_length`].
pub const MIN_NODES: usize = 16;
/// Default tolerance of [`is_geodesic`].
pub const DEFAULT_GEODESIC_TOL: f64 = 1e-6;
/// Successive refinements must agree to this absolute length difference.
pub const REFINE_TOL: f64 = 1e-8;

const ZERO_LENGTH: f64 = 1e-14;
const ZERO_DISTANCE: f64 = 1e-10;

/// Composite Simpson rule on a possibly nonuniform grid.
///
/// For an odd number of intervals the last one is integrated with the
/// three-point correction of Cartwright, as in `scipy.integrate.simpson`.
pub fn simpson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidArgument(format!(
            "{} abscissae but {} values",
            n,
            y.len()
        )));
    }
    match n {
        0 | 1 => return Ok(0.0),
        2 => return Ok(0.5 * (x[1] - x[0]) * (y[0] + y[1])),
        _ => {}
    }
    let pairs_end = if n % 2 == 1 { n - 1 } else { n - 2 };
    let mut total = 0.0;
    let mut k = 0;
    while k + 2 <= pairs_end {
        let h0 = x[k + 1] - x[k];
        let h1 = x[k + 2] - x[k + 1];
        let hs = h0 + h1;
        total += hs / 6.0 * ((2.0 - h1 / h0) * y[k] + hs * hs / (h0 * h1) * y[k + 1] + (2.0 - h0 / h1) * y[k + 2]);
        k += 2;
    }
    if n.is_multiple_of(2) {
        let h0 = x[n - 2] - x[n - 3];
        let h1 = x[n - 1] - x[n - 2];
        let alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        total += alpha * y[n - 1] + beta * y[n - 2] - eta * y[n - 3];
    }
    Ok(total)
}

fn is_uniform(t: &[f64]) -> bool {
    let h = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    t.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
}

/// Derivative estimates at every node.
///
/// Uniform grids with at least five nodes use fourth-order central stencils
/// and fourth-order one-sided stencils at the two ends on each side; other
/// grids fall back to second-order three-point Lagrange differences.
pub fn central_differences(times: &[f64], values: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let n = times.len();
    if n != values.len() || n < 3 {
        return Err(Error::InvalidArgument("need >= 3 nodes with one value each".into()));
    }
    let comb = |coef: &[(usize, f64)], scale: f64| -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(values[0].rows(), values[0].cols());
        for &(i, c) in coef {
            acc = acc.try_add(&values[i].scale(c))?;
        }
        Ok(acc.scale(scale))
    };
    let mut out = Vec::with_capacity(n);
    if n >= 5 && is_uniform(times) {
        let s = 1.0 / (12.0 * (times[1] - times[0]));
        for k in 0..n {
            let d = match k {
                0 => comb(&[(0, -25.0), (1, 48.0), (2, -36.0), (3, 16.0), (4, -3.0)], s)?,
                1 => comb(&[(0, -3.0), (1, -10.0), (2, 18.0), (3, -6.0), (4, 1.0)], s)?,
                k if k == n - 2 => comb(
                    &[(n - 1, 3.0), (n - 2, 10.0), (n - 3, -18.0), (n - 4, 6.0), (n - 5, -1.0)],
                    s,
                )?,
                k if k == n - 1 => comb(
                    &[
                        (n - 1, 25.0),
                        (n - 2, -48.0),
                        (n - 3, 36.0),
                        (n - 4, -16.0),
                        (n - 5, 3.0),
                    ],
                    s,
                )?,
                k => comb(&[(k - 2, 1.0), (k - 1, -8.0), (k + 1, 8.0), (k + 2, -1.0)], s)?,
            };
            out.push(d);
        }
    } else {
        for k in 0..n {
            let (a, b, c) = match k {
                0 => (0, 1, 2),
                k if k == n - 1 => (n - 3, n - 2, n - 1),
                k => (k - 1, k, k + 1),
            };
            let (ta, tb, tc, t) = (times[a], times[b], times[c], times[k]);
            // derivative of the quadratic interpolant through (a, b, c) at t
            let wa = (2.0 * t - tb - tc) / ((ta - tb) * (ta - tc));
            let wb = (2.0 * t - ta - tc) / ((tb - ta) * (tb - tc));
            let wc = (2.0 * t - ta - tb) / ((tc - ta) * (tc - tb));
            out.push(comb(&[(a, wa), (b, wb), (c, wc)], 1.0)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    D,
    E,
}

fn trajectory_derivatives(traj: &Trajectory) -> Result<Vec<ComplexMatrix>> {
    match traj.derivatives() {
        Some(d) => Ok(d.to_vec()),
        None => {
            let m: Vec<ComplexMatrix> = traj.states().iter().map(|s| s.matrix().clone()).collect();
            central_differences(traj.times(), &m)
        }
    }
}

fn check_nodes(traj: &Trajectory) -> Result<()> {
    if traj.len() < MIN_NODES {
        return Err(Error::InvalidArgument(format!(
            "path length needs >= {MIN_NODES} nodes, trajectory has {}",
            traj.len()
        )));
    }
    Ok(())
}

/// Speeds `(v_D, v_E)` at every node.
pub fn speeds(traj: &Trajectory) -> Result<(Vec<f64>, Vec<f64>)> {
    let derivs = trajectory_derivatives(traj)?;
    let mut vd = Vec::with_capacity(traj.len());
    let mut ve = Vec::with_capacity(traj.len());
    for (rho, dot) in traj.states().iter().zip(&derivs) {
        vd.push(speed_d(rho, dot)?);
        ve.push(speed_e(dot)?);
    }
    Ok((vd, ve))
}

/// `∫₀^τ v_t dt` by composite Simpson on the trajectory grid.
pub fn path_length(traj: &Trajectory, which: Metric) -> Result<f64> {
    check_nodes(traj)?;
    let (vd, ve) = speeds(traj)?;
    let v = match which {
        Metric::D => vd,
        Metric::E => ve,
    };
    simpson(traj.times(), &v)
}

fn bound_from(distance: f64, length: f64, tau: f64) -> Result<f64> {
    if length <= ZERO_LENGTH {
        if distance <= ZERO_DISTANCE {
            return Ok(0.0);
        }
        return Err(Error::InconsistentPath(distance));
    }
    Ok(distance * tau / length)
}

pub fn tau_qsl(traj: &Trajectory) -> Result<f64> {
    let d = distance_d(traj.initial(), traj.last())?;
    bound_from(d, path_length(traj, Metric::D)?, traj.tau())
}

pub fn tau_e(traj: &Trajectory) -> Result<f64> {
    let d = distance_e(traj.initial(), traj.last())?;
    bound_from(d, path_length(traj, Metric::E)?, traj.tau())
}

pub fn tau_phi(traj: &Trajectory) -> Result<f64> {
    let d = distance_phi(traj.initial(), traj.last())?;
    bound_from(d, path_length(traj, Metric::D)?, traj.tau())
}

/// Interpolation profile `β(s)` on `s = t/τ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy)]
pub enum BetaLaw {
    Linear,
    Quadratic,
    /// `sin(πs/2)`.
    Sine,
    /// Returns `(β(s), dβ/ds)`.
    Custom(fn(f64) -> (f64, f64)),
}

impl BetaLaw {
    pub fn eval(&self, s: f64) -> (f64, f64) {
        use std::f64::consts::FRAC_PI_2;
        match self {
            BetaLaw::Linear => (s, 1.0),
            BetaLaw::Quadratic => (s * s, 2.0 * s),
            BetaLaw::Sine => ((FRAC_PI_2 * s).sin(), FRAC_PI_2 * (FRAC_PI_2 * s).cos()),
            BetaLaw::Custom(f) => f(s),
        }
    }

    pub fn all() -> [BetaLaw; 3] {
        [BetaLaw::Linear, BetaLaw::Quadratic, BetaLaw::Sine]
    }
}

/// Straight segment `ρ_t = (1 − β)ρ₀ + β ρ_τ` sampled on a uniform grid.
pub fn geodesic_path(
    rho0: &DensityMatrix,
    rho_tau: &DensityMatrix,
    beta: BetaLaw,
    tau: f64,
    grid: usize,
) -> Result<Trajectory> {
    if rho0.dim() != rho_tau.dim() {
        return Err(Error::DimensionMismatch {
            left: (rho0.dim(), rho0.dim()),
            right: (rho_tau.dim(), rho_tau.dim()),
        });
    }
    let (b0, _) = beta.eval(0.0);
    let (b1, _) = beta.eval(1.0);
    if b0.abs() > 1e-12 || (b1 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "beta must run from 0 to 1, got {b0} to {b1}"
        )));
    }
    let dir = rho_tau.matrix().try_sub(rho0.matrix())?;
    let times = crate::dynamics::uniform_grid(tau, grid)?;
    let mut states = Vec::with_capacity(grid);
    let mut derivs = Vec::with_capacity(grid);
    let mut prev = f64::NEG_INFINITY;
    for &t in &times {
        let (b, db) = beta.eval(t / tau);
        if b < prev - 1e-12 || db < -1e-12 {
            return Err(Error::InvalidArgument(format!("beta is not monotone near t = {t}")));
        }
        prev = b;
        let rho = rho0.matrix().try_add(&dir.scale(b))?;
        states.push(validate_density(rho, crate::dynamics::TRAJECTORY_TOL)?);
        derivs.push(dir.scale(db / tau));
    }
    Trajectory::new(times, states, Some(derivs), "geodesic", tau / (grid - 1) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicCheck {
    pub is_geodesic: bool,
    pub max_residual: f64,
    pub beta_samples: Vec<f64>,
    pub monotone: bool,
    pub tolerance: f64,
}

/// Projects `ρ_t − ρ₀` onto `C = ρ_τ − ρ₀` and measures what is left over.
pub fn is_geodesic(traj: &Trajectory, tol: f64) -> Result<GeodesicCheck> {
    let rho0 = traj.initial().matrix();
    let c = traj.last().matrix().try_sub(rho0)?;
    let cc = real_inner(&c, &c);
    if cc.sqrt() < 1e-12 {
        return Err(Error::InvalidArgument(
            "identical endpoints leave the direction undefined".into(),
        ));
    }
    let mut beta = Vec::with_capacity(traj.len());
    let mut max_residual: f64 = 0.0;
    for s in traj.states() {
        let d = s.matrix().try_sub(rho0)?;
        let b = real_inner(&c, &d) / cc;
        max_residual = max_residual.max(d.try_sub(&c.scale(b))?.hs_norm());
        beta.push(b);
    }
    let monotone = beta.windows(2).all(|w| w[1] >= w[0] - tol);
    let end_ok = (beta[beta.len() - 1] - 1.0).abs() <= tol;
    Ok(GeodesicCheck {
        is_geodesic: max_residual <= tol && monotone && end_ok,
        max_residual,
        beta_samples: beta,
        monotone,
        tolerance: tol,
    })
}

/// Arc length and endpoint distance of amplitude damping from `q = 1` to
/// `q_τ`, for a monotone survival factor.
///
/// With `b = Σ_{k≥1} λ_k`, `c = √Σ_{k≥1} λ_k²` and `a = b² + c²`:
/// `L = |atan((a q_τ − b)/c) − atan((a − b)/c)|` and
/// `cos D = (1 − b(q_τ + 1) + a q_τ) / (f(1) f(q_τ))`, `f(q) = √(1 − 2bq + aq²)`.
pub fn gad_arc_closed_form(params: &GADParams, q_tau: f64) -> Result<(f64, f64)> {
    if !(q_tau > 0.0 && q_tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("q_tau = {q_tau} outside (0, 1]")));
    }
    let b = params.excited_weight();
    let c = params.excited().iter().map(|l| l * l).sum::<f64>().sqrt();
    if c == 0.0 {
        return Ok((0.0, 0.0));
    }
    let a = b * b + c * c;
    let length = (((a * q_tau - b) / c).atan() - ((a - b) / c).atan()).abs();
    let f = |q: f64| (1.0 - 2.0 * b * q + a * q * q).sqrt();
    let cos = (1.0 - b * (q_tau + 1.0) + a * q_tau) / (f(1.0) * f(q_tau));
    Ok((length, clamped_acos(cos)?))
}

/// Arc length and endpoint distance of dephasing with coherence ratio `R`
/// after accumulated exponent `γ_τ`:
/// `L = atan R − atan(e^{−γ_τ} R)`,
/// `cos D = (1 + R² e^{−γ_τ}) / (√(1 + R²) √(1 + R² e^{−2γ_τ}))`.
pub fn dephasing_arc_closed_form(r: f64, gamma_tau: f64) -> Result<(f64, f64)> {
    if !(r >= 0.0 && gamma_tau >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need R >= 0 and gamma_tau >= 0, got {r}, {gamma_tau}"
        )));
    }
    let e = (-gamma_tau).exp();
    let length = r.atan() - (e * r).atan();
    let r2 = r * r;
    let cos = (1.0 + r2 * e) / ((1.0 + r2).sqrt() * (1.0 + r2 * e * e).sqrt());
    // small-angle branch via the sine: sin D = R(1 − e)/(√(1+R²)√(1+R²e²))
    let sin = r * (1.0 - e) / ((1.0 + r2).sqrt() * (1.0 + r2 * e * e).sqrt());
    Ok((length, sin.atan2(cos)))
}

fn clamped_acos(c: f64) -> Result<f64> {
    let slack = crate::metric::ARCCOS_CLAMP;
    if !(-1.0 - slack..=1.0 + slack).contains(&c) {
        return Err(Error::Numeric(format!("cosine {c} outside [-1, 1]")));
    }
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Every bound for one trajectory. Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
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

pub fn report(traj: &Trajectory) -> Result<BoundReport> {
    check_nodes(traj)?;
    let tau = traj.tau();
    let (vd, ve) = speeds(traj)?;
    let length_d = simpson(traj.times(), &vd)?;
    let length_e = simpson(traj.times(), &ve)?;
    let (a, b) = (traj.initial(), traj.last());
    let dist_d = distance_d(a, b)?;
    let dist_e = distance_e(a, b)?;
    let dist_phi = distance_phi(a, b)?;
    let tau_qsl = bound_from(dist_d, length_d, tau)?;
    let tau_e = bound_from(dist_e, length_e, tau)?;
    let tau_phi = bound_from(dist_phi, length_d, tau)?;
    Ok(BoundReport {
        tau,
        length_d,
        length_e,
        dist_d,
        dist_e,
        dist_phi,
        tau_qsl,
        tau_e,
        tau_phi,
        tau_combined: tau_qsl.max(tau_e),
        ratio_qsl: tau_qsl / tau,
        ratio_e: tau_e / tau,
        ratio_phi: tau_phi / tau,
        gap: tau_qsl - tau_e,
        nodes: traj.len(),
    })
}

/// Builds trajectories on nested grids `n, 2n − 1, 4n − 3, …` until both
/// path lengths change by less than [`REFINE_TOL`], and reports on the
/// finest grid.
pub fn converged_report<F>(mut build: F, start_grid: usize, max_grid: usize) -> Result<BoundReport>
where
    F: FnMut(usize) -> Result<Trajectory>,
{
    let mut grid = start_grid.max(MIN_NODES);
    let mut prev = report(&build(grid)?)?;
    loop {
        let next_grid = 2 * grid - 1;
        if next_grid > max_grid {
            return Err(Error::Numeric(format!(
                "path length not converged at {grid} nodes (last change {:.3e})",
                0.0f64.max(prev.length_d)
            )));
        }
        let next = report(&build(next_grid)?)?;
        let dd = (next.length_d - prev.length_d).abs();
        let de = (next.length_e - prev.length_e).abs();
        if dd < REFINE_TOL && de < REFINE_TOL {
            return Ok(next);
        }
        prev = next;
        grid = next_grid;
    }
}
