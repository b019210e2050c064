//! Grid sweeps over detuning or rotation frequency.

use std::collections::BTreeSet;
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Deserialize;

use spincav_core::analytic::{g2_cavity_analytic, g2_output_full, steady_amplitudes};
use spincav_core::dynamics::{solve_model_with, SteadyStateOptions};
use spincav_core::observables::{g2_output, photon_flux_in, transmission};
use spincav_core::params::{derive_model, PhysicalParams};
use spincav_core::{Direction, Error, FockDims, ModelParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    /// Drive detuning Δ, in units of κ.
    Detuning,
    /// Rotation frequency Ω/2π of both cavities, in Hz.
    RotationFreq,
}

impl SweepVariable {
    /// Column label, including the unit of `sweep_value`.
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::Detuning => "detuning_kappa",
            SweepVariable::RotationFreq => "rotation_freq_hz",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "detuning_kappa" => Some(SweepVariable::Detuning),
            "rotation_freq_hz" => Some(SweepVariable::RotationFreq),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Numeric,
    Analytic,
    Both,
}

impl Engine {
    pub fn numeric(self) -> bool {
        matches!(self, Engine::Numeric | Engine::Both)
    }

    pub fn analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }
}

/// Observable groups a sweep can fill in. Columns of groups that were not
/// requested stay empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    TransmissionBreakdown,
    G2Output,
    G2Cavity,
    /// Analytic output and cavity g², whatever the other groups say.
    AnalyticG2,
}

impl Observable {
    pub const ALL: [Observable; 4] = [
        Observable::TransmissionBreakdown,
        Observable::G2Output,
        Observable::G2Cavity,
        Observable::AnalyticG2,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub directions: Vec<Direction>,
    pub observables: BTreeSet<Observable>,
    pub cutoff: FockDims,
    pub engine: Engine,
    /// Fixed detuning (κ) for rotation sweeps. Without it Δ follows the
    /// left cavity's Fizeau shift: +Δ_F,L for CW, −Δ_F,L for CCW.
    pub detuning_override: Option<f64>,
    pub tolerance: f64,
    /// Record per-row wall time. Off by default so reruns are byte-identical.
    pub timing: bool,
}

impl SweepSpec {
    /// A single point is allowed when `start == stop`; otherwise the grid
    /// needs `points ≥ 2` and `start < stop`.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut problems = Vec::new();
        if !(self.start.is_finite() && self.stop.is_finite()) {
            problems.push(format!("sweep range must be finite, got [{}, {}]", self.start, self.stop));
        } else if self.points == 1 {
            if self.start != self.stop {
                problems.push("a single-point sweep needs start == stop".into());
            }
        } else if self.points < 2 {
            problems.push(format!("sweep.points must be at least 2, got {}", self.points));
        } else if self.start >= self.stop {
            problems.push(format!("sweep start {} must be below stop {}", self.start, self.stop));
        }
        if self.variable == SweepVariable::RotationFreq && self.start < 0.0 {
            problems.push(format!("rotation frequencies must be non-negative, got {}", self.start));
        }
        if self.directions.is_empty() {
            problems.push("sweep.directions must not be empty".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(problems))
        }
    }

    /// Evenly spaced grid; endpoints are exact.
    pub fn grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (k as f64 / last)
                }
            })
            .collect()
    }

    /// Model rates, in units of κ, at one grid value.
    pub fn model_at(&self, physical: &PhysicalParams, value: f64, direction: Direction) -> Result<ModelParams, Error> {
        match self.variable {
            SweepVariable::Detuning => {
                Ok(derive_model(physical, 0.0, direction)?.normalized().with_detuning(value))
            }
            SweepVariable::RotationFreq => {
                let spun = PhysicalParams { rotation_freq_l: value, rotation_freq_r: value, ..physical.clone() };
                let m = derive_model(&spun, 0.0, direction)?.normalized();
                let detuning = self.detuning_override.unwrap_or(match direction {
                    Direction::Cw => m.fizeau_l,
                    Direction::Ccw => -m.fizeau_l,
                });
                Ok(m.with_detuning(detuning))
            }
        }
    }

    fn wants(&self, o: Observable) -> bool {
        self.observables.contains(&o)
    }
}

/// One grid point in one direction. Empty fields were either not requested
/// or failed; `status` lists the error codes of any failures.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub variable: SweepVariable,
    pub sweep_value: f64,
    pub direction: Direction,
    /// Δ in units of κ.
    pub detuning: Option<f64>,
    pub t_left: Option<f64>,
    pub t_right: Option<f64>,
    pub t_interference: Option<f64>,
    pub t_total: Option<f64>,
    pub g2_output_numeric: Option<f64>,
    pub g2_output_analytic: Option<f64>,
    pub g2_cavity_l_numeric: Option<f64>,
    pub g2_cavity_l_analytic: Option<f64>,
    pub g2_cavity_r_numeric: Option<f64>,
    pub solver_residual: Option<f64>,
    pub status: String,
    pub wall_time_ms: Option<f64>,
}

pub const STATUS_OK: &str = "ok";

impl SweepRow {
    fn empty(variable: SweepVariable, sweep_value: f64, direction: Direction) -> Self {
        Self {
            variable,
            sweep_value,
            direction,
            detuning: None,
            t_left: None,
            t_right: None,
            t_interference: None,
            t_total: None,
            g2_output_numeric: None,
            g2_output_analytic: None,
            g2_cavity_l_numeric: None,
            g2_cavity_l_analytic: None,
            g2_cavity_r_numeric: None,
            solver_residual: None,
            status: STATUS_OK.into(),
            wall_time_ms: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

/// Runs every (grid value, direction) pair on a pool of `workers` threads.
///
/// Rows come back grouped by grid value, directions in CW, CCW order,
/// independent of `workers`.
pub fn run_sweep(spec: &SweepSpec, physical: &PhysicalParams, workers: usize) -> Result<Vec<SweepRow>, CliError> {
    spec.validate()?;
    let tasks: Vec<(f64, Direction)> = spec
        .grid()
        .into_iter()
        .flat_map(|v| spec.directions.iter().map(move |&d| (v, d)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Validation(vec![format!("cannot start {workers} workers: {e}")]))?;
    Ok(pool.install(|| tasks.par_iter().map(|&(v, d)| run_point(spec, physical, v, d)).collect()))
}

/// Evaluates a single sweep row. Failures are recorded, never raised.
pub fn run_point(spec: &SweepSpec, physical: &PhysicalParams, value: f64, direction: Direction) -> SweepRow {
    let started = Instant::now();
    let mut row = SweepRow::empty(spec.variable, value, direction);
    let mut errors: Vec<&'static str> = Vec::new();
    fn record(e: Error, errors: &mut Vec<&'static str>) {
        if !errors.contains(&e.code()) {
            errors.push(e.code());
        }
    }

    match spec.model_at(physical, value, direction) {
        Err(e) => record(e, &mut errors),
        Ok(m) => {
            row.detuning = Some(m.detuning);
            if photon_flux_in(&m) == 0.0 {
                record(Error::ZeroDrive, &mut errors);
            } else {
                if spec.engine.numeric() {
                    numeric(spec, &m, &mut row).unwrap_or_else(|e| record(e, &mut errors));
                }
                let analytic_wanted = spec.wants(Observable::AnalyticG2)
                    || spec.wants(Observable::G2Output)
                    || spec.wants(Observable::G2Cavity);
                if spec.engine.analytic() && analytic_wanted {
                    analytic(spec, &m, &mut row).unwrap_or_else(|e| record(e, &mut errors));
                }
            }
        }
    }

    if !errors.is_empty() {
        row.status = errors.join("|");
    }
    if spec.timing {
        row.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    row
}

fn numeric(spec: &SweepSpec, m: &ModelParams, row: &mut SweepRow) -> Result<(), Error> {
    let options = SteadyStateOptions { tolerance: spec.tolerance, ..Default::default() };
    let s = solve_model_with(m, spec.cutoff, &options)?;
    row.solver_residual = Some(s.residual);
    if spec.wants(Observable::TransmissionBreakdown) {
        let t = transmission(&s.rho, m)?;
        row.t_left = Some(t.t_left);
        row.t_right = Some(t.t_right);
        row.t_interference = Some(t.t_interference);
        row.t_total = Some(t.t_total);
    }
    if spec.wants(Observable::G2Output) || spec.wants(Observable::G2Cavity) {
        let c = g2_output(&s.rho, m)?;
        if spec.wants(Observable::G2Output) {
            row.g2_output_numeric = Some(c.g2_output);
        }
        if spec.wants(Observable::G2Cavity) {
            row.g2_cavity_l_numeric = Some(c.g2_cavity_l);
            row.g2_cavity_r_numeric = Some(c.g2_cavity_r);
        }
    }
    Ok(())
}

fn analytic(spec: &SweepSpec, m: &ModelParams, row: &mut SweepRow) -> Result<(), Error> {
    let a = steady_amplitudes(m)?;
    let all = spec.wants(Observable::AnalyticG2);
    if all || spec.wants(Observable::G2Output) {
        row.g2_output_analytic = Some(g2_output_full(&a, m.kappa_l, m.kappa_r)?);
    }
    if all || spec.wants(Observable::G2Cavity) {
        row.g2_cavity_l_analytic = Some(g2_cavity_analytic(&a)?);
    }
    Ok(())
}
