//! TOML run configuration.
//!
//! Every physical field carries its unit in its name. Anything left out
//! falls back to the reference device (see [`PhysicalParams::default`]):
//!
//! ```toml
//! [device]
//! wavelength_nm = 1550.0
//! quality_factor = 2.5e9          # or quality_factor_l / quality_factor_r
//! refractive_index = 1.4          # or refractive_index_l / refractive_index_r
//! nonlinear_index_m2_per_w = 3e-14
//! mode_volume_um3 = 147.0
//! radius_um = 30.0                # or radius_l_um / radius_r_um
//! rotation_freq_khz = 9.4         # or rotation_freq_l_khz / rotation_freq_r_khz
//! power_fw = 0.2
//! dispersion_per_um = 0.0         # dn/dλ
//! waveguide_phase_rad = 1.5707963267948966
//!
//! [sweep]
//! detuning_range_kappa = [-40.0, 40.0]
//! rotation_range_khz = [0.0, 20.0]
//! points = 801
//! directions = ["cw", "ccw"]
//! engine = "both"                 # numeric | analytic | both
//! cutoff = 4                      # or cutoff_l / cutoff_r
//! observables = ["transmission_breakdown", "g2_output", "g2_cavity", "analytic_g2"]
//! detuning_kappa = 20.0           # pins Δ in rotation sweeps
//! tolerance = 1e-8
//! ```
//!
//! A per-side field wins over its shared counterpart.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::Deserialize;

use spincav_core::params::{derive_model, PhysicalParams};
use spincav_core::{Direction, FockDims};

use crate::error::{violations, CliError};
use crate::sweep::{Engine, Observable, SweepSpec, SweepVariable};

pub const DEFAULT_SPECTRUM_RANGE: [f64; 2] = [-40.0, 40.0];
pub const DEFAULT_SPECTRUM_POINTS: usize = 801;
pub const DEFAULT_ROTATION_RANGE_KHZ: [f64; 2] = [0.0, 20.0];
pub const DEFAULT_ROTATION_POINTS: usize = 201;
pub const DEFAULT_CUTOFF: usize = 4;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    device: DeviceSection,
    #[serde(default)]
    sweep: SweepSettings,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct DeviceSection {
    wavelength_nm: Option<f64>,
    quality_factor: Option<f64>,
    quality_factor_l: Option<f64>,
    quality_factor_r: Option<f64>,
    refractive_index: Option<f64>,
    refractive_index_l: Option<f64>,
    refractive_index_r: Option<f64>,
    nonlinear_index_m2_per_w: Option<f64>,
    mode_volume_um3: Option<f64>,
    radius_um: Option<f64>,
    radius_l_um: Option<f64>,
    radius_r_um: Option<f64>,
    rotation_freq_khz: Option<f64>,
    rotation_freq_l_khz: Option<f64>,
    rotation_freq_r_khz: Option<f64>,
    power_fw: Option<f64>,
    dispersion_per_um: Option<f64>,
    waveguide_phase_rad: Option<f64>,
}

impl DeviceSection {
    fn apply(&self, p: &mut PhysicalParams) {
        let set = |target: &mut f64, value: Option<f64>, scale: f64| {
            if let Some(v) = value {
                *target = v * scale;
            }
        };
        set(&mut p.wavelength, self.wavelength_nm, 1e-9);
        set(&mut p.quality_factor_l, self.quality_factor, 1.0);
        set(&mut p.quality_factor_r, self.quality_factor, 1.0);
        set(&mut p.quality_factor_l, self.quality_factor_l, 1.0);
        set(&mut p.quality_factor_r, self.quality_factor_r, 1.0);
        set(&mut p.refractive_index_l, self.refractive_index, 1.0);
        set(&mut p.refractive_index_r, self.refractive_index, 1.0);
        set(&mut p.refractive_index_l, self.refractive_index_l, 1.0);
        set(&mut p.refractive_index_r, self.refractive_index_r, 1.0);
        set(&mut p.nonlinear_index, self.nonlinear_index_m2_per_w, 1.0);
        set(&mut p.mode_volume, self.mode_volume_um3, 1e-18);
        set(&mut p.radius_l, self.radius_um, 1e-6);
        set(&mut p.radius_r, self.radius_um, 1e-6);
        set(&mut p.radius_l, self.radius_l_um, 1e-6);
        set(&mut p.radius_r, self.radius_r_um, 1e-6);
        set(&mut p.rotation_freq_l, self.rotation_freq_khz, 1e3);
        set(&mut p.rotation_freq_r, self.rotation_freq_khz, 1e3);
        set(&mut p.rotation_freq_l, self.rotation_freq_l_khz, 1e3);
        set(&mut p.rotation_freq_r, self.rotation_freq_r_khz, 1e3);
        set(&mut p.drive_power, self.power_fw, 1e-15);
        set(&mut p.dispersion, self.dispersion_per_um, 1e6);
        set(&mut p.waveguide_phase, self.waveguide_phase_rad, 1.0);
    }
}

/// Sweep knobs as read from the file. Each one may still be overridden on
/// the command line before [`SweepSettings::to_spec`] fixes the grid.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub detuning_range_kappa: Option<[f64; 2]>,
    pub rotation_range_khz: Option<[f64; 2]>,
    pub points: Option<usize>,
    pub directions: Option<Vec<String>>,
    pub engine: Option<Engine>,
    pub cutoff: Option<usize>,
    pub cutoff_l: Option<usize>,
    pub cutoff_r: Option<usize>,
    pub observables: Option<Vec<Observable>>,
    pub detuning_kappa: Option<f64>,
    pub tolerance: Option<f64>,
}

impl SweepSettings {
    /// Resolves defaults for `variable` and validates the result.
    pub fn to_spec(&self, variable: SweepVariable) -> Result<SweepSpec, CliError> {
        let mut problems = Vec::new();

        let (range, points) = match variable {
            SweepVariable::Detuning => (
                self.detuning_range_kappa.unwrap_or(DEFAULT_SPECTRUM_RANGE),
                self.points.unwrap_or(DEFAULT_SPECTRUM_POINTS),
            ),
            SweepVariable::RotationFreq => {
                let [a, b] = self.rotation_range_khz.unwrap_or(DEFAULT_ROTATION_RANGE_KHZ);
                ([a * 1e3, b * 1e3], self.points.unwrap_or(DEFAULT_ROTATION_POINTS))
            }
        };

        let mut directions = Vec::new();
        for name in self.directions.clone().unwrap_or_else(|| vec!["cw".into(), "ccw".into()]) {
            match name.parse::<Direction>() {
                Ok(d) if !directions.contains(&d) => directions.push(d),
                Ok(d) => problems.push(format!("sweep.directions lists {d} twice")),
                Err(e) => problems.push(format!("sweep.directions: {e}")),
            }
        }
        directions.sort();

        let shared = self.cutoff.unwrap_or(DEFAULT_CUTOFF);
        let (nl, nr) = (self.cutoff_l.unwrap_or(shared), self.cutoff_r.unwrap_or(shared));
        let cutoff = match FockDims::new(nl, nr) {
            Ok(d) if d.supports_two_photons() => Some(d),
            _ => {
                problems.push(format!("sweep.cutoff must be at least 2 photons per mode, got ({nl}, {nr})"));
                None
            }
        };

        let observables: BTreeSet<Observable> = match &self.observables {
            Some(list) => list.iter().copied().collect(),
            None => Observable::ALL.into_iter().collect(),
        };
        if observables.is_empty() {
            problems.push("sweep.observables must not be empty".into());
        }

        let tolerance = self.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance.is_finite() && tolerance > 0.0) {
            problems.push(format!("sweep.tolerance must be positive, got {tolerance}"));
        }
        if let Some(d) = self.detuning_kappa {
            if !d.is_finite() {
                problems.push(format!("sweep.detuning_kappa must be finite, got {d}"));
            }
        }

        let spec = SweepSpec {
            variable,
            start: range[0],
            stop: range[1],
            points,
            directions,
            observables,
            cutoff: cutoff.unwrap_or(FockDims::new(2, 2).expect("2 is a valid cutoff")),
            engine: self.engine.unwrap_or(Engine::Both),
            detuning_override: self.detuning_kappa,
            tolerance,
            timing: false,
        };
        if let Err(CliError::Validation(more)) = spec.validate() {
            problems.extend(more);
        }
        if problems.is_empty() {
            Ok(spec)
        } else {
            Err(CliError::Validation(problems))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub physical: PhysicalParams,
    pub sweep: SweepSettings,
}

impl Default for Config {
    fn default() -> Self {
        Self { physical: PhysicalParams::default(), sweep: SweepSettings::default() }
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Parse { message, .. } => CliError::Parse { path: path.to_path_buf(), message },
        other => other,
    })
}

/// Parses config text. Parse errors carry the line and the offending key.
pub fn parse_config(text: &str) -> Result<Config, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Parse {
        path: "<config>".into(),
        message: e.to_string().trim_end().to_owned(),
    })?;
    let mut physical = PhysicalParams::default();
    file.device.apply(&mut physical);
    validate_physical(&physical)?;
    Ok(Config { physical, sweep: file.sweep })
}

fn validate_physical(p: &PhysicalParams) -> Result<(), CliError> {
    let mut problems = match p.validate() {
        Ok(()) => Vec::new(),
        Err(e) => violations(e),
    };
    if p.waveguide_phase.is_finite() && (p.waveguide_phase - FRAC_PI_2).abs() > 1e-12 {
        problems.push(format!(
            "waveguide_phase_rad must be π/2 for the output-field expansion, got {}",
            p.waveguide_phase
        ));
    }
    if problems.is_empty() {
        // Catch anything the reduction to model rates still rejects.
        derive_model(p, 0.0, Direction::Cw).map_err(|e| CliError::Validation(violations(e)))?;
        Ok(())
    } else {
        Err(CliError::Validation(problems))
    }
}
