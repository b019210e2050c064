//! Hamiltonian, Lindblad generator and steady states.
//!
//! The master equation is
//!
//! ```text
//! dρ/dt = −i[H, ρ] + 2κ_L D[a_L]ρ + 2κ_R D[a_R]ρ,
//! D[o]ρ = oρo† − (o†oρ + ρo†o)/2,
//! ```
//!
//! and it is vectorized by stacking columns: `vec(ρ)[i + j·D] = ρ[i, j]`,
//! so that `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

mod density;
mod hamiltonian;
mod integrate;
mod steady;
mod superop;

pub use density::DensityMatrix;
pub(crate) use hamiltonian::phase_factor;
pub use hamiltonian::{build_hamiltonian, Hamiltonian};
pub use integrate::IntegrationOptions;
pub use steady::{
    integrate_steady_state, relative_residual, solve_direct, steady_state, steady_state_with,
    SteadyState, SteadyStateMethod, SteadyStateOptions,
};
pub use superop::{liouvillian, unvectorize, vectorize, Liouvillian, SparseMatrix};

use crate::error::Result;
use crate::fock::FockDims;
use crate::params::ModelParams;

/// Builds H and L for `m` and solves for the steady state with default
/// options.
pub fn solve_model(m: &ModelParams, dims: FockDims) -> Result<SteadyState> {
    solve_model_with(m, dims, &SteadyStateOptions::default())
}

pub fn solve_model_with(
    m: &ModelParams,
    dims: FockDims,
    options: &SteadyStateOptions,
) -> Result<SteadyState> {
    let h = build_hamiltonian(m, dims)?;
    let l = liouvillian(&h, m)?;
    steady_state_with(&l, options)
}
