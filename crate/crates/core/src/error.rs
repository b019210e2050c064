use thiserror::Error;

use crate::fock::{FockDims, Mode};

/// Errors produced by the simulation core.
///
/// Every variant maps onto a stable, upper-case code (see [`Error::code`])
/// which the sweep layer records in its output tables.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("operator dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: FockDims, right: FockDims },

    #[error("cutoff {0} is too small, each mode must hold at least two photons")]
    CutoffTooSmall(FockDims),

    #[error("waveguide phase {theta} rad makes the coupling non-Hermitian; enable the override to build it anyway")]
    NonHermitianPhase { theta: f64 },

    #[error("steady state is not unique (bordered system condition estimate {condition:.3e})")]
    NonUnique { condition: f64 },

    #[error("time integration did not settle by t = {t}: last change {change:.3e}")]
    NoConvergence { t: f64, change: f64 },

    #[error("density matrix invariant violated: {0}")]
    InvalidState(String),

    #[error("input photon flux is zero")]
    ZeroDrive,

    #[error("output flux squared {value:.3e} is below the 1e-30 floor")]
    ZeroFlux { value: f64 },

    #[error("mode {0} has no population")]
    ZeroPopulation(Mode),

    #[error("{size}x{size} amplitude system is singular")]
    SingularSystem { size: usize },

    #[error("one-photon amplitude vanishes")]
    ZeroAmplitude,

    #[error("optimal condition violated: {0}")]
    ConditionViolated(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Validation(_) => "VALIDATION_ERROR",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::CutoffTooSmall(_) => "CUTOFF_TOO_SMALL",
            Error::NonHermitianPhase { .. } => "NON_HERMITIAN_PHASE",
            Error::NonUnique { .. } => "NON_UNIQUE",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::InvalidState(_) => "INVALID_STATE",
            Error::ZeroDrive => "ZERO_DRIVE",
            Error::ZeroFlux { .. } => "ZERO_FLUX",
            Error::ZeroPopulation(_) => "ZERO_POPULATION",
            Error::SingularSystem { .. } => "SINGULAR_SYSTEM",
            Error::ZeroAmplitude => "ZERO_AMPLITUDE",
            Error::ConditionViolated(_) => "CONDITION_VIOLATED",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
