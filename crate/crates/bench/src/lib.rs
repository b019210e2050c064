//! Shared fixtures for the benchmarks.

use spincav_core::params::{derive_model, PhysicalParams};
use spincav_core::{Direction, ModelParams};

/// Reference device tuned to the left cavity's resonance for `direction`,
/// in units of κ.
pub fn reference_model(direction: Direction) -> ModelParams {
    let base = derive_model(&PhysicalParams::default(), 0.0, direction)
        .expect("default parameters are valid");
    let detuning = match direction {
        Direction::Cw => base.fizeau_l,
        Direction::Ccw => -base.fizeau_l,
    };
    base.with_detuning(detuning).normalized()
}
