//! Quantum speed limit times for open-system trajectories.
//!
//! The distance between states is the angle between their Hilbert–Schmidt
//! normalized matrices, `D(ρ‖σ) = arccos ⟨ρ,σ⟩/(‖ρ‖‖σ‖)`. Given a
//! [`Trajectory`](dynamics::Trajectory), [`bounds::report`] computes the
//! bound `τ_qsl = D(ρ₀‖ρ_τ) τ / ∫ v_t dt` together with the Euclidean and
//! `Φ` variants, and [`bounds::is_geodesic`] decides whether the path is a
//! straight segment `ρ₀ + β(t) C`.

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod metric;
pub mod model;
pub mod random;
pub mod state;

pub use error::{Error, Result, ValidationError};
pub use matrix::{hs_inner, ComplexMatrix};
pub use random::{random_density, random_hamiltonian, RngSeed};
pub use state::{partial_trace, purity, validate_density, DensityMatrix, Subsystem};
