//! Reduced dynamics of a qubit under a random joint unitary with a qubit
//! environment: `ρ_t = Tr_E(U_t ρ_S ⊗ ρ_E U_t†)`.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, I};
use crate::random::{sample_density, sample_hamiltonian, RngSeed};
use crate::state::{partial_trace_matrix, purity, DensityMatrix, Subsystem};

use super::{sample_closed_form, Trajectory};

/// Minimum grid size accepted by the sampler.
pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone)]
pub struct BipartiteSample {
    pub seed: RngSeed,
    pub trajectory: Trajectory,
    pub initial_purity: f64,
    pub hamiltonian: ComplexMatrix,
    pub rho_s: DensityMatrix,
    pub rho_e: DensityMatrix,
}

/// Draws `H` (4×4), then `ρ_S`, then `ρ_E` from one stream seeded by `seed`.
pub fn bipartite_sample(seed: RngSeed, tau: f64, grid: usize, diagonal_h: bool) -> Result<BipartiteSample> {
    let mut rng = seed.rng();
    let hamiltonian = sample_hamiltonian(&mut rng, 4, diagonal_h)?;
    let rho_s = sample_density(&mut rng, 2, None)?;
    let rho_e = sample_density(&mut rng, 2, None)?;
    let trajectory = bipartite_trajectory(&hamiltonian, &rho_s, &rho_e, tau, grid)?;
    Ok(BipartiteSample {
        seed,
        trajectory,
        initial_purity: purity(&rho_s),
        hamiltonian,
        rho_s,
        rho_e,
    })
}

pub fn bipartite_trajectory(
    hamiltonian: &ComplexMatrix,
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
    tau: f64,
    grid: usize,
) -> Result<Trajectory> {
    if grid < MIN_GRID {
        return Err(Error::InvalidArgument(format!(
            "grid needs >= {MIN_GRID} points, got {grid}"
        )));
    }
    let ds = rho_s.dim();
    let de = rho_e.dim();
    if hamiltonian.rows() != ds * de || !hamiltonian.is_square() {
        return Err(Error::DimensionMismatch {
            left: (hamiltonian.rows(), hamiltonian.cols()),
            right: (ds * de, ds * de),
        });
    }
    let joint = rho_s.tensor(rho_e).into_matrix();
    let (vals, vecs) = hamiltonian.hermitian_eigen();
    let vecs_dag = vecs.dagger();
    sample_closed_form("bipartite", tau, grid, |t| {
        let phases: Vec<_> = vals.iter().map(|&e| (-I * e * t).exp()).collect();
        let u = vecs.try_mul(&ComplexMatrix::diagonal(&phases))?.try_mul(&vecs_dag)?;
        let rho_ab = u.try_mul(&joint)?.try_mul(&u.dagger())?.hermitian_part();
        let dot_ab = hamiltonian.commutator(&rho_ab)?.scale_complex(-I);
        Ok((
            partial_trace_matrix(&rho_ab, (ds, de), Subsystem::A)?,
            partial_trace_matrix(&dot_ab, (ds, de), Subsystem::A)?,
        ))
    })
}
