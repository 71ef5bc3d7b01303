//! Trajectory generation.
//!
//! [`integrate`] is a fixed-step classical RK4 for arbitrary generators
//! `ρ̇ = L_t(ρ)`. The model submodules give exact propagators together with
//! analytic derivatives, which downstream speed integrals prefer over finite
//! differences.

mod appendix_b;
mod bipartite;
mod decay;
mod dephasing;
mod gad;
mod kraus;

pub use appendix_b::{appendix_b_generator, appendix_b_solution, appendix_b_trajectory, AppendixBParams};
pub use bipartite::{bipartite_sample, bipartite_trajectory, BipartiteSample};
pub use decay::{nonmarkov_gamma, DecayLaw, NonMarkovRate, TabulatedRate, POLE_EPS};
pub use dephasing::{
    coherence_ratio, dephasing_derivative, dephasing_generator, dephasing_solution, dephasing_trajectory,
    DephasingParams,
};
pub use gad::{gad_derivative, gad_generator, gad_solution, gad_trajectory, GADParams};
pub use kraus::{
    apply_kraus, kraus_operators, kraus_thermal, kraus_thermal_derivative, kraus_trajectory, KrausSchedule,
    ThermalKrausParams,
};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, I};
use crate::state::{validate_density, DensityMatrix};

/// Validation tolerance for states on a trajectory.
pub const TRAJECTORY_TOL: f64 = 1e-6;
/// Largest tolerated `|Tr ρ − 1|` during integration.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Time grid from `0` to `τ` with one state per node.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    derivatives: Option<Vec<ComplexMatrix>>,
    model_tag: String,
    dt_nominal: f64,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        states: Vec<DensityMatrix>,
        derivatives: Option<Vec<ComplexMatrix>>,
        model_tag: impl Into<String>,
        dt_nominal: f64,
    ) -> Result<Self> {
        if times.len() < 2 || times.len() != states.len() {
            return Err(Error::InvalidArgument(format!(
                "trajectory needs >= 2 nodes and one state per time ({} times, {} states)",
                times.len(),
                states.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidArgument("trajectory must start at t = 0".into()));
        }
        if times
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::InvalidArgument(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::InvalidArgument("trajectory states differ in dimension".into()));
        }
        if let Some(d) = &derivatives {
            if d.len() != states.len() || d.iter().any(|m| m.dim() != dim || !m.is_square()) {
                return Err(Error::InvalidArgument("one derivative per state is required".into()));
            }
        }
        Ok(Self {
            times,
            states,
            derivatives,
            model_tag: model_tag.into(),
            dt_nominal,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// Analytic derivatives when the producing model supplied them.
    pub fn derivatives(&self) -> Option<&[ComplexMatrix]> {
        self.derivatives.as_deref()
    }

    pub fn model_tag(&self) -> &str {
        &self.model_tag
    }

    pub fn dt_nominal(&self) -> f64 {
        self.dt_nominal
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn tau(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn initial(&self) -> &DensityMatrix {
        &self.states[0]
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().unwrap()
    }

    /// Same trajectory without analytic derivatives.
    pub fn without_derivatives(mut self) -> Self {
        self.derivatives = None;
        self
    }
}

/// `n` uniformly spaced nodes on `[0, τ]` with the last node exactly `τ`.
pub fn uniform_grid(tau: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("grid needs >= 2 points, got {n}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon tau = {tau} must be positive")));
    }
    let mut t: Vec<f64> = (0..n).map(|k| tau * k as f64 / (n - 1) as f64).collect();
    t[n - 1] = tau;
    Ok(t)
}

/// Samples a closed-form model on a uniform grid. `state_at` returns the
/// unvalidated state matrix and its derivative.
pub fn sample_closed_form(
    tag: &str,
    tau: f64,
    grid: usize,
    mut state_at: impl FnMut(f64) -> Result<(ComplexMatrix, ComplexMatrix)>,
) -> Result<Trajectory> {
    let times = uniform_grid(tau, grid)?;
    let mut states = Vec::with_capacity(grid);
    let mut derivs = Vec::with_capacity(grid);
    for &t in &times {
        let (rho, dot) = state_at(t)?;
        states.push(validate_density(rho, TRAJECTORY_TOL)?);
        derivs.push(dot);
    }
    Trajectory::new(times, states, Some(derivs), tag, tau / (grid - 1) as f64)
}

/// Closed evolution `ρ_t = e^{−iHt} ρ₀ e^{iHt}` with derivative `−i[H, ρ_t]`.
pub fn unitary_trajectory(
    hamiltonian: &ComplexMatrix,
    rho0: &DensityMatrix,
    tau: f64,
    grid: usize,
) -> Result<Trajectory> {
    if hamiltonian.rows() != rho0.dim() || !hamiltonian.is_square() {
        return Err(Error::DimensionMismatch {
            left: (hamiltonian.rows(), hamiltonian.cols()),
            right: (rho0.dim(), rho0.dim()),
        });
    }
    if hamiltonian.hermiticity_defect() > 1e-12 {
        return Err(Error::InvalidArgument("Hamiltonian is not Hermitian".into()));
    }
    let (vals, vecs) = hamiltonian.hermitian_eigen();
    let vecs_dag = vecs.dagger();
    sample_closed_form("unitary", tau, grid, |t| {
        let phases: Vec<_> = vals.iter().map(|&e| (-I * e * t).exp()).collect();
        let u = vecs.try_mul(&ComplexMatrix::diagonal(&phases))?.try_mul(&vecs_dag)?;
        let rho = u.try_mul(rho0.matrix())?.try_mul(&u.dagger())?.hermitian_part();
        let dot = hamiltonian.commutator(&rho)?.scale_complex(-I);
        Ok((rho, dot))
    })
}

/// `−i[H, ρ] + Σ γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`.
pub fn lindblad_rhs(
    hamiltonian: Option<&ComplexMatrix>,
    jumps: &[(f64, &ComplexMatrix)],
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let mut out = match hamiltonian {
        Some(h) => h.commutator(rho)?.scale_complex(-I),
        None => ComplexMatrix::zeros(rho.rows(), rho.cols()),
    };
    for &(rate, l) in jumps {
        if rate == 0.0 {
            continue;
        }
        let ld = l.dagger();
        let jump = l.try_mul(rho)?.try_mul(&ld)?;
        let ldl = ld.try_mul(l)?;
        let anti = ldl.anticommutator(rho)?.scale(0.5);
        out = out.try_add(&jump.try_sub(&anti)?.scale(rate))?;
    }
    Ok(out)
}

/// Fixed-step classical RK4 from `rho0` over `[0, τ]`.
///
/// The step is `τ/n` with `n = ⌈τ/dt⌉`, so the last node lands on `τ`. After
/// every step the state is projected onto its Hermitian part; the trace drift
/// and the minimum eigenvalue are checked against `1e-6`. The generator's
/// value at each node is stored as the trajectory derivative.
pub fn integrate<G>(generator: G, rho0: &DensityMatrix, tau: f64, dt: f64, tag: &str) -> Result<Trajectory>
where
    G: Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix>,
{
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon tau = {tau} must be positive")));
    }
    if !(dt > 0.0 && dt <= tau / 10.0 + f64::EPSILON * tau) {
        return Err(Error::InvalidArgument(format!("dt = {dt} must lie in (0, tau/10]")));
    }
    let steps = ((tau / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = tau / steps as f64;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut derivs = Vec::with_capacity(steps + 1);

    let mut rho = rho0.matrix().clone();
    let mut k1 = generator(0.0, &rho)?;
    times.push(0.0);
    states.push(rho0.clone());
    derivs.push(k1.clone());

    for n in 0..steps {
        let t = n as f64 * h;
        let k2 = generator(t + 0.5 * h, &rho.try_add(&k1.scale(0.5 * h))?)?;
        let k3 = generator(t + 0.5 * h, &rho.try_add(&k2.scale(0.5 * h))?)?;
        let k4 = generator(t + h, &rho.try_add(&k3.scale(h))?)?;
        let incr = k1
            .try_add(&k2.scale(2.0))?
            .try_add(&k3.scale(2.0))?
            .try_add(&k4)?
            .scale(h / 6.0);
        rho = rho.try_add(&incr)?.hermitian_part();

        let t_next = if n + 1 == steps { tau } else { (n + 1) as f64 * h };
        let drift = (rho.trace().re - 1.0).abs();
        if drift > TRACE_DRIFT_LIMIT || !drift.is_finite() {
            return Err(Error::TraceDrift { time: t_next, drift });
        }
        let min_eigenvalue = rho.hermitian_eigenvalues()[0];
        if min_eigenvalue < -TRAJECTORY_TOL {
            return Err(Error::PositivityLoss {
                time: t_next,
                min_eigenvalue,
            });
        }
        let state = validate_density(rho.clone(), TRAJECTORY_TOL)?;
        k1 = generator(t_next, &rho)?;
        times.push(t_next);
        states.push(state);
        derivs.push(k1.clone());
    }
    Trajectory::new(times, states, Some(derivs), tag, dt)
}
