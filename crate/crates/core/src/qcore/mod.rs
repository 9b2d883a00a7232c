//! Exact one- and two-qubit quantum states.
//!
//! Conventions used throughout the crate:
//!
//! - `ħ = 1`; the sensing Hamiltonian is `ωσ_z/2` and evolution is exact.
//! - In a two-qubit register the first tensor factor is the client-bound
//!   (transmitted) qubit, the second stays with the server.
//! - A single-qubit Pauli readout reports bit 1 for the projector `(I + σ)/2`.

mod eigen;
pub mod matrix;
mod measure;
mod state;

pub use matrix::{pauli, Matrix};
pub use measure::{born_probability, measure_first_qubit, pauli_pair_measure, sample_outcome, Axis};
pub use state::{
    bell_state, bell_vector, bloch_from_density, density_from_bloch, evolve_by_phase, evolve_phase,
    fidelity_maximally_mixed, fidelity_pure, partial_trace, phi_plus, BlochVector, DensityMatrix, Outcome,
    SensingField, Subsystem, BLOCH_TOL, HERMITIAN_TOL, PSD_TOL, TRACE_TOL,
};
