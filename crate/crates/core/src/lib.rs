//! Steady-state transmission and photon statistics of two spinning optical
//! cavities coupled through a pair of shared drop-filter waveguides.
//!
//! The left cavity carries a Kerr nonlinearity, the right one is linear.
//! Light entering Port 1 excites the clockwise modes, light entering Port 2
//! the counter-clockwise ones; the rotation-induced Fizeau shift moves the
//! two cavities in opposite directions, so each propagation direction is
//! routed through a different cavity. Transmission stays reciprocal while
//! the output photon statistics do not.
//!
//! Layout:
//!
//! - [`params`]: SI experimental parameters and their reduction to model rates.
//! - [`fock`]: truncated two-mode Fock space and its operators.
//! - [`dynamics`]: Hamiltonian, Liouvillian and the steady-state solvers.
//! - [`observables`]: transmission breakdown and second-order correlations.
//! - [`analytic`]: the two-photon-truncated weak-drive solution, used as an
//!   independent oracle for the numerics.
//!
//! All model rates are expressed in units of the left cavity's per-waveguide
//! decay rate κ once [`ModelParams::normalized`] has been applied.

pub mod analytic;
pub mod dynamics;
mod error;
pub mod fock;
pub mod observables;
pub mod params;

pub use faer::c64;

pub use analytic::{AmplitudeSet, TwoPhotonAmplitudes};
pub use dynamics::{DensityMatrix, Hamiltonian, Liouvillian, SteadyState};
pub use error::{Error, Result};
pub use fock::{FockDims, FockOperator, Mode};
pub use observables::{CorrelationReport, G2Terms, TransmissionBreakdown};
pub use params::{Direction, ModelParams, PhysicalParams};
