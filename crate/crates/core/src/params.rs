//! Experimental parameters and their reduction to model rates.
//!
//! [`PhysicalParams`] holds SI quantities. The free functions in this module
//! turn them into the angular rates entering the Hamiltonian, and
//! [`derive_model`] assembles a [`ModelParams`]. Nothing downstream of this
//! module touches SI units: call [`ModelParams::normalized`] to express every
//! rate in units of the left cavity's decay rate.
//!
//! Decay convention: each cavity couples to two waveguides with rate κ each,
//! so its energy decays at 2κ = ω/Q, i.e. κ = ω/(2Q).

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::Mode;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

const PHASE_TOLERANCE: f64 = 1e-12;

/// Propagation direction of the drive.
///
/// `Cw` is light entering Port 1 (clockwise modes, transmission T₂₁),
/// `Ccw` is light entering Port 2 (counter-clockwise modes, T₁₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Cw,
    Ccw,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Cw, Direction::Ccw];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Cw => "cw",
            Direction::Ccw => "ccw",
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Cw => Direction::Ccw,
            Direction::Ccw => Direction::Cw,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cw" => Ok(Direction::Cw),
            "ccw" => Ok(Direction::Ccw),
            other => Err(format!("unknown direction `{other}` (expected cw or ccw)")),
        }
    }
}

/// Experimental parameters in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Vacuum wavelength of the drive and of both resonances, m.
    pub wavelength: f64,
    pub quality_factor_l: f64,
    pub quality_factor_r: f64,
    pub refractive_index_l: f64,
    pub refractive_index_r: f64,
    /// Nonlinear refractive index n₂, m²/W.
    pub nonlinear_index: f64,
    /// Effective mode volume of the Kerr cavity, m³.
    pub mode_volume: f64,
    pub radius_l: f64,
    pub radius_r: f64,
    /// Rotation frequency Ω/2π of the left cavity, Hz.
    pub rotation_freq_l: f64,
    /// Rotation frequency Ω/2π of the right cavity, Hz.
    pub rotation_freq_r: f64,
    /// Drive power, W.
    pub drive_power: f64,
    /// Material dispersion dn/dλ, 1/m.
    pub dispersion: f64,
    /// Phase accumulated between the cavities along the waveguides, rad.
    pub waveguide_phase: f64,
}

impl Default for PhysicalParams {
    /// Reference parameter set: a 1550 nm, Q = 2.5×10⁹ pair of 30 μm
    /// resonators spinning at 9.4 kHz, driven with 0.2 fW.
    fn default() -> Self {
        Self {
            wavelength: 1550e-9,
            quality_factor_l: 2.5e9,
            quality_factor_r: 2.5e9,
            refractive_index_l: 1.4,
            refractive_index_r: 1.4,
            nonlinear_index: 3e-14,
            mode_volume: 147e-18,
            radius_l: 30e-6,
            radius_r: 30e-6,
            rotation_freq_l: 9.4e3,
            rotation_freq_r: 9.4e3,
            drive_power: 0.2e-15,
            dispersion: 0.0,
            waveguide_phase: FRAC_PI_2,
        }
    }
}

impl PhysicalParams {
    /// Checks every invariant and reports all violations at once.
    ///
    /// A zero drive power and a zero Kerr coefficient are allowed; they
    /// describe the dark and linear limits respectively.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut positive = |name: &str, value: f64| {
            if !(value.is_finite() && value > 0.0) {
                problems.push(format!("{name} must be positive and finite, got {value}"));
            }
        };
        positive("wavelength", self.wavelength);
        positive("quality_factor_l", self.quality_factor_l);
        positive("quality_factor_r", self.quality_factor_r);
        positive("mode_volume", self.mode_volume);
        positive("radius_l", self.radius_l);
        positive("radius_r", self.radius_r);

        let mut non_negative = |name: &str, value: f64| {
            if !(value.is_finite() && value >= 0.0) {
                problems.push(format!("{name} must be non-negative and finite, got {value}"));
            }
        };
        non_negative("rotation_freq_l", self.rotation_freq_l);
        non_negative("rotation_freq_r", self.rotation_freq_r);
        non_negative("drive_power", self.drive_power);
        non_negative("nonlinear_index", self.nonlinear_index);

        for (name, n) in [
            ("refractive_index_l", self.refractive_index_l),
            ("refractive_index_r", self.refractive_index_r),
        ] {
            if !(n.is_finite() && n > 1.0) {
                problems.push(format!("{name} must exceed 1, got {n}"));
            }
        }
        if !self.dispersion.is_finite() {
            problems.push(format!("dispersion must be finite, got {}", self.dispersion));
        }
        if !self.waveguide_phase.is_finite() {
            problems.push(format!(
                "waveguide_phase must be finite, got {}",
                self.waveguide_phase
            ));
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Angular optical frequency ω = 2πc/λ, rad/s.
    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.wavelength
    }

    /// Input photon flux P/(ħω), photons per second.
    pub fn input_photon_flux(&self) -> f64 {
        self.drive_power / (HBAR * self.angular_frequency())
    }

    fn side(&self, side: Mode) -> (f64, f64, f64, f64) {
        match side {
            Mode::Left => (
                self.refractive_index_l,
                self.radius_l,
                self.rotation_freq_l,
                self.quality_factor_l,
            ),
            Mode::Right => (
                self.refractive_index_r,
                self.radius_r,
                self.rotation_freq_r,
                self.quality_factor_r,
            ),
        }
    }
}

/// Rotation-induced Fizeau shift of one cavity, rad/s.
///
/// Δ_F = (n r Ω ω / c)(1 − 1/n² − (λ/n) dn/dλ), with Ω = 2π × rotation frequency.
pub fn fizeau_shift(p: &PhysicalParams, side: Mode) -> f64 {
    let (n, r, freq, _) = p.side(side);
    let omega_rot = 2.0 * PI * freq;
    let drag = 1.0 - 1.0 / (n * n) - (p.wavelength / n) * p.dispersion;
    n * r * omega_rot * p.angular_frequency() / SPEED_OF_LIGHT * drag
}

/// Kerr interaction strength U = ħω²c n₂ / (n_L² V_eff), rad/s.
pub fn kerr_strength(p: &PhysicalParams) -> f64 {
    let omega = p.angular_frequency();
    let n = p.refractive_index_l;
    HBAR * omega * omega * SPEED_OF_LIGHT * p.nonlinear_index / (n * n * p.mode_volume)
}

/// Per-waveguide decay rate κ = ω/(2Q), rad/s.
pub fn decay_rate(p: &PhysicalParams, side: Mode) -> f64 {
    let (_, _, _, q) = p.side(side);
    p.angular_frequency() / (2.0 * q)
}

/// Drive amplitude ε = √(κ P/(ħω)) for a cavity with decay rate `kappa`.
pub fn drive_amplitude(p: &PhysicalParams, kappa: f64) -> f64 {
    (kappa * p.input_photon_flux()).sqrt()
}

/// Model rates entering the Hamiltonian and the master equation.
///
/// The rates share whatever unit they were constructed in (rad/s from
/// [`derive_model`], units of κ after [`ModelParams::normalized`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub kappa_l: f64,
    pub kappa_r: f64,
    /// Common detuning Δ = ω_cavity − ω_drive of both (non-spinning) cavities.
    pub detuning: f64,
    pub fizeau_l: f64,
    pub fizeau_r: f64,
    pub kerr: f64,
    pub drive_l: f64,
    pub drive_r: f64,
    /// Waveguide-mediated coupling J_eff = i√(κ_L κ_R) e^{iθ}.
    pub coupling: Complex64,
    /// Waveguide phase θ, rad.
    pub waveguide_phase: f64,
    pub direction: Direction,
}

impl ModelParams {
    /// Symmetric model in units of κ (κ_L = κ_R = 1, θ = π/2, equal Fizeau
    /// shifts and equal drive amplitudes).
    pub fn symmetric(detuning: f64, fizeau: f64, kerr: f64, drive: f64, direction: Direction) -> Self {
        Self {
            kappa_l: 1.0,
            kappa_r: 1.0,
            detuning,
            fizeau_l: fizeau,
            fizeau_r: fizeau,
            kerr,
            drive_l: drive,
            drive_r: drive,
            coupling: Complex64::new(-1.0, 0.0),
            waveguide_phase: FRAC_PI_2,
            direction,
        }
    }

    /// Direction-resolved cavity detunings (Δ_L,σ, Δ_R,σ).
    ///
    /// The left cavity spins clockwise and the right one counter-clockwise,
    /// so the clockwise drive sees (Δ − Δ_F,L, Δ + Δ_F,R) and the
    /// counter-clockwise drive sees (Δ + Δ_F,L, Δ − Δ_F,R).
    pub fn cavity_detunings(&self) -> (f64, f64) {
        match self.direction {
            Direction::Cw => (self.detuning - self.fizeau_l, self.detuning + self.fizeau_r),
            Direction::Ccw => (self.detuning + self.fizeau_l, self.detuning - self.fizeau_r),
        }
    }

    /// Rescales every rate so that κ_L = 1.
    pub fn normalized(&self) -> Self {
        let k = self.kappa_l;
        Self {
            kappa_l: 1.0,
            kappa_r: self.kappa_r / k,
            detuning: self.detuning / k,
            fizeau_l: self.fizeau_l / k,
            fizeau_r: self.fizeau_r / k,
            kerr: self.kerr / k,
            drive_l: self.drive_l / k,
            drive_r: self.drive_r / k,
            coupling: self.coupling / k,
            waveguide_phase: self.waveguide_phase,
            direction: self.direction,
        }
    }

    pub fn with_direction(&self, direction: Direction) -> Self {
        Self { direction, ..self.clone() }
    }

    pub fn with_detuning(&self, detuning: f64) -> Self {
        Self { detuning, ..self.clone() }
    }

    pub fn with_kerr(&self, kerr: f64) -> Self {
        Self { kerr, ..self.clone() }
    }

    pub fn with_drive(&self, drive_l: f64, drive_r: f64) -> Self {
        Self { drive_l, drive_r, ..self.clone() }
    }

    /// True when the waveguide coupling has no imaginary part.
    pub fn is_hermitian(&self) -> bool {
        self.coupling.im == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (name, k) in [("kappa_l", self.kappa_l), ("kappa_r", self.kappa_r)] {
            if !(k.is_finite() && k > 0.0) {
                problems.push(format!("{name} must be positive and finite, got {k}"));
            }
        }
        if !(self.kerr.is_finite() && self.kerr >= 0.0) {
            problems.push(format!("kerr must be non-negative and finite, got {}", self.kerr));
        }
        for (name, v) in [
            ("detuning", self.detuning),
            ("fizeau_l", self.fizeau_l),
            ("fizeau_r", self.fizeau_r),
            ("drive_l", self.drive_l),
            ("drive_r", self.drive_r),
            ("coupling.re", self.coupling.re),
            ("coupling.im", self.coupling.im),
        ] {
            if !v.is_finite() {
                problems.push(format!("{name} must be finite, got {v}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// Options for [`derive_model_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DeriveOptions {
    /// Accept θ ≠ π/2, which leaves a complex coupling in the Hamiltonian.
    pub allow_non_hermitian: bool,
}

/// Assembles model rates (rad/s) from SI parameters at detuning `detuning`
/// (rad/s) for the given drive direction.
pub fn derive_model(p: &PhysicalParams, detuning: f64, direction: Direction) -> Result<ModelParams> {
    derive_model_with(p, detuning, direction, DeriveOptions::default())
}

pub fn derive_model_with(
    p: &PhysicalParams,
    detuning: f64,
    direction: Direction,
    options: DeriveOptions,
) -> Result<ModelParams> {
    p.validate()?;
    if !detuning.is_finite() {
        return Err(Error::Validation(vec![format!("detuning must be finite, got {detuning}")]));
    }
    let theta = p.waveguide_phase;
    let hermitian = (theta - FRAC_PI_2).abs() <= PHASE_TOLERANCE;
    if !hermitian && !options.allow_non_hermitian {
        return Err(Error::NonHermitianPhase { theta });
    }

    let kappa_l = decay_rate(p, Mode::Left);
    let kappa_r = decay_rate(p, Mode::Right);
    let strength = (kappa_l * kappa_r).sqrt();
    // i·e^{iπ/2} = −1 exactly; avoid the 6e-17 imaginary residue of the
    // floating-point exponential.
    let coupling = if hermitian {
        Complex64::new(-strength, 0.0)
    } else {
        Complex64::i() * Complex64::from_polar(strength, theta)
    };

    Ok(ModelParams {
        kappa_l,
        kappa_r,
        detuning,
        fizeau_l: fizeau_shift(p, Mode::Left),
        fizeau_r: fizeau_shift(p, Mode::Right),
        kerr: kerr_strength(p),
        drive_l: drive_amplitude(p, kappa_l),
        drive_r: drive_amplitude(p, kappa_r),
        coupling,
        waveguide_phase: if hermitian { FRAC_PI_2 } else { theta },
        direction,
    })
}
