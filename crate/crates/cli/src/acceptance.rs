//! The acceptance suite: ten checks of the simulator against the reference
//! device, each at a fixed tolerance.
//!
//! [`Evidence::collect`] runs the two shared sweeps once; every criterion
//! then reads from it and solves whatever extra points it needs.

use std::fmt;
use std::time::Instant;

use spincav_core::analytic::{g2_cavity_analytic, g2_optimal, g2_output_full, steady_amplitudes};
use spincav_core::dynamics::solve_model;
use spincav_core::fock::coherent_product_state;
use spincav_core::observables::{g2_output, transmission};
use spincav_core::params::{derive_model, PhysicalParams};
use spincav_core::{CorrelationReport, Direction, Error, FockDims, ModelParams, TransmissionBreakdown};

use crate::error::CliError;
use crate::sweep::{run_sweep, Engine, Observable, SweepRow, SweepSpec, SweepVariable};

/// Pinned tolerances, one block per criterion.
pub mod tol {
    pub const RECIPROCITY_MAX_DIFF: f64 = 0.01;
    pub const PEAK_MIN: f64 = 0.95;
    pub const PEAK_OFFSET_KAPPA: f64 = 0.5;
    pub const SPECTRUM_RUNTIME_S: f64 = 300.0;

    pub const PATH_MIN: f64 = 0.9;
    pub const INTERFERENCE_MAX: f64 = 0.05;

    pub const G2_CW_MAX: f64 = 3e-5;
    pub const G2_CCW_RANGE: (f64, f64) = (0.005, 0.02);
    pub const SEPARATION_MIN: f64 = 300.0;

    pub const CCW_OVER_CAVITY: (f64, f64) = (3.0, 5.0);
    pub const CAVITY_OVER_CW: (f64, f64) = (150.0, 400.0);

    pub const CLOSED_FORM_FACTOR: f64 = 1.5;
    pub const CLOSED_FORM_ANALYTIC_REL: f64 = 0.02;
    pub const CLOSED_FORM_U: f64 = 20.0;

    pub const ROTATION_MIN_KHZ: f64 = 9.4;
    pub const ROTATION_WINDOW_KHZ: f64 = 0.5;
    pub const STILL_REL: f64 = 0.05;

    pub const ORACLE_REL: f64 = 0.10;
    pub const ORACLE_G2_FLOOR: f64 = 1e-7;
    pub const ORACLE_T_FLOOR: f64 = 0.1;

    pub const LINEAR_G2: f64 = 1e-4;
    pub const LINEAR_FIDELITY: f64 = 0.999;

    pub const RESIDUAL_MAX: f64 = 1e-8;
    pub const CUTOFF_REL: f64 = 0.01;

    pub const SCALING_REL: f64 = 0.05;
    pub const SCALING_U: [f64; 3] = [10.0, 20.0, 40.0];
}

/// Result of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} [{verdict}] {}: {}", self.id, self.title, self.detail)
    }
}

/// The shared sweeps at the reference device and default cutoff.
#[derive(Debug, Clone)]
pub struct Evidence {
    pub physical: PhysicalParams,
    pub cutoff: FockDims,
    /// Δ/κ ∈ [−40, 40], 801 points, both directions and both engines.
    pub spectrum: Vec<SweepRow>,
    pub spectrum_seconds: f64,
    /// Ω/2π ∈ [0, 20] kHz with Δ locked to ±Δ_F,L.
    pub rotation: Vec<SweepRow>,
}

pub fn spectrum_spec(cutoff: FockDims) -> SweepSpec {
    SweepSpec {
        variable: SweepVariable::Detuning,
        start: -40.0,
        stop: 40.0,
        points: 801,
        directions: Direction::BOTH.to_vec(),
        observables: Observable::ALL.into_iter().collect(),
        cutoff,
        engine: Engine::Both,
        detuning_override: None,
        tolerance: tol::RESIDUAL_MAX,
        timing: false,
    }
}

pub fn rotation_spec(cutoff: FockDims) -> SweepSpec {
    SweepSpec {
        variable: SweepVariable::RotationFreq,
        start: 0.0,
        stop: 20e3,
        points: 201,
        ..spectrum_spec(cutoff)
    }
}

impl Evidence {
    pub fn collect(workers: usize) -> Result<Self, CliError> {
        let physical = PhysicalParams::default();
        let cutoff = FockDims::square(4)?;
        let started = Instant::now();
        let spectrum = run_sweep(&spectrum_spec(cutoff), &physical, workers)?;
        let spectrum_seconds = started.elapsed().as_secs_f64();
        let rotation = run_sweep(&rotation_spec(cutoff), &physical, workers)?;
        Ok(Self { physical, cutoff, spectrum, spectrum_seconds, rotation })
    }

    /// Reference model in units of κ at detuning `delta`.
    fn model(&self, delta: f64, direction: Direction) -> ModelParams {
        derive_model(&self.physical, 0.0, direction)
            .expect("reference parameters are valid")
            .normalized()
            .with_detuning(delta)
    }

    /// Fizeau shift of the left cavity, in units of κ.
    pub fn fizeau(&self) -> f64 {
        self.model(0.0, Direction::Cw).fizeau_l
    }

    fn rows(&self, direction: Direction) -> impl Iterator<Item = &SweepRow> {
        self.spectrum.iter().filter(move |r| r.direction == direction)
    }
}

/// Numeric steady state at one point.
struct Point {
    t: TransmissionBreakdown,
    c: CorrelationReport,
}

fn solve_point(m: &ModelParams, dims: FockDims) -> Result<Point, Error> {
    let s = solve_model(m, dims)?;
    s.rho.check_invariants()?;
    Ok(Point { t: transmission(&s.rho, m)?, c: g2_output(&s.rho, m)? })
}

fn outcome(id: u8, title: &'static str, result: Result<(bool, String), Error>) -> Outcome {
    match result {
        Ok((passed, detail)) => Outcome { id, title, passed, detail },
        Err(e) => Outcome { id, title, passed: false, detail: format!("{} ({})", e.code(), e) },
    }
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo && x <= hi
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Location and height of the highest transmission on each side of Δ = 0.
fn peaks(e: &Evidence, direction: Direction) -> [(f64, f64); 2] {
    let best = |positive: bool| {
        e.rows(direction)
            .filter(|r| if positive { r.sweep_value > 0.0 } else { r.sweep_value < 0.0 })
            .filter_map(|r| r.t_total.map(|t| (r.sweep_value, t)))
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
    };
    [best(false), best(true)]
}

/// Largest |T₂₁ − T₁₂| over the spectrum grid.
pub fn reciprocity_gap(e: &Evidence) -> f64 {
    let cw: Vec<_> = e.rows(Direction::Cw).collect();
    let ccw: Vec<_> = e.rows(Direction::Ccw).collect();
    cw.iter()
        .zip(&ccw)
        .map(|(a, b)| match (a.t_total, b.t_total) {
            (Some(x), Some(y)) => (x - y).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Peaks and runtime parts of criterion 1, which hold independently of the
/// reciprocity gap.
pub fn spectrum_peaks_ok(e: &Evidence) -> (bool, String) {
    let f = e.fizeau();
    let mut ok = e.spectrum_seconds <= tol::SPECTRUM_RUNTIME_S;
    let mut parts = Vec::new();
    for dir in Direction::BOTH {
        for (sign, (at, height)) in [-1.0, 1.0].into_iter().zip(peaks(e, dir)) {
            ok &= height >= tol::PEAK_MIN && (at - sign * f).abs() <= tol::PEAK_OFFSET_KAPPA;
            parts.push(format!("{dir} peak {height:.4} at {at:+.2}"));
        }
    }
    parts.push(format!("sweep {:.1} s", e.spectrum_seconds));
    (ok, parts.join(", "))
}

pub fn classical_reciprocity(e: &Evidence) -> Outcome {
    let gap = reciprocity_gap(e);
    let (peaks_ok, peaks) = spectrum_peaks_ok(e);
    let passed = gap <= tol::RECIPROCITY_MAX_DIFF && peaks_ok;
    let detail = format!(
        "max |T21 - T12| = {gap:.4} (limit {}), {peaks}, Δ_F = {:.3}κ",
        tol::RECIPROCITY_MAX_DIFF,
        e.fizeau()
    );
    Outcome { id: 1, title: "classical reciprocity", passed, detail }
}

pub fn path_separation(e: &Evidence) -> Outcome {
    let f = e.fizeau();
    let result = (|| {
        let cw_plus = solve_point(&e.model(f, Direction::Cw), e.cutoff)?.t;
        let ccw_plus = solve_point(&e.model(f, Direction::Ccw), e.cutoff)?.t;
        let cw_minus = solve_point(&e.model(-f, Direction::Cw), e.cutoff)?.t;
        let ccw_minus = solve_point(&e.model(-f, Direction::Ccw), e.cutoff)?.t;
        let paths = [cw_plus.t_left, ccw_plus.t_right, cw_minus.t_right, ccw_minus.t_left];
        let interference = [cw_plus, ccw_plus, cw_minus, ccw_minus]
            .iter()
            .map(|t| t.t_interference.abs())
            .fold(0.0, f64::max);
        let passed = paths.iter().all(|&p| p >= tol::PATH_MIN) && interference <= tol::INTERFERENCE_MAX;
        Ok((
            passed,
            format!(
                "+Δ_F: T21^L = {:.4}, T12^R = {:.4}; -Δ_F: T21^R = {:.4}, T12^L = {:.4}; max |T^I| = {:.2e}",
                paths[0], paths[1], paths[2], paths[3], interference
            ),
        ))
    })();
    outcome(2, "path separation", result)
}

pub fn nonreciprocal_blockade(e: &Evidence) -> Outcome {
    let f = e.fizeau();
    let result = (|| {
        let g21 = solve_point(&e.model(f, Direction::Cw), e.cutoff)?.c.g2_output;
        let g12 = solve_point(&e.model(-f, Direction::Ccw), e.cutoff)?.c.g2_output;
        let separation = g12 / g21;
        let passed = g21 <= tol::G2_CW_MAX
            && within(g12, tol::G2_CCW_RANGE)
            && separation >= tol::SEPARATION_MIN;
        Ok((passed, format!("g21 = {g21:.3e}, g12 = {g12:.3e}, g12/g21 = {separation:.0}")))
    })();
    outcome(3, "nonreciprocal blockade", result)
}

pub fn enhancement_ratios(e: &Evidence) -> Outcome {
    let f = e.fizeau();
    let result = (|| {
        let cw = solve_point(&e.model(f, Direction::Cw), e.cutoff)?.c;
        let ccw = solve_point(&e.model(-f, Direction::Ccw), e.cutoff)?.c;
        let up = ccw.g2_output / ccw.g2_cavity_l;
        let down = cw.g2_cavity_l / cw.g2_output;
        let passed = within(up, tol::CCW_OVER_CAVITY) && within(down, tol::CAVITY_OVER_CW);
        Ok((passed, format!("g12/g2_L,ccw = {up:.3}, g2_L,cw/g21 = {down:.1}")))
    })();
    outcome(4, "enhancement ratios", result)
}

/// Symmetric model at Δ = ±Δ_F = ±U with the reference drive strength.
fn optimum(e: &Evidence, u: f64, direction: Direction) -> ModelParams {
    let drive = e.model(0.0, direction).drive_l;
    let delta = match direction {
        Direction::Cw => u,
        Direction::Ccw => -u,
    };
    ModelParams::symmetric(delta, u, u, drive, direction)
}

pub fn closed_form_agreement(e: &Evidence) -> Outcome {
    let u = tol::CLOSED_FORM_U;
    let result = (|| {
        let (g21_cf, cav_cf) = g2_optimal(Direction::Cw, u);
        let (g12_cf, _) = g2_optimal(Direction::Ccw, u);
        let cw_m = optimum(e, u, Direction::Cw);
        let ccw_m = optimum(e, u, Direction::Ccw);
        let cw = solve_point(&cw_m, e.cutoff)?.c;
        let ccw = solve_point(&ccw_m, e.cutoff)?.c;
        let numeric = [
            cw.g2_output / g21_cf,
            ccw.g2_output / g12_cf,
            cw.g2_cavity_l / cav_cf,
            ccw.g2_cavity_l / cav_cf,
        ];
        let a_cw = steady_amplitudes(&cw_m)?;
        let a_ccw = steady_amplitudes(&ccw_m)?;
        let analytic = [
            rel(g2_output_full(&a_cw, 1.0, 1.0)?, g21_cf),
            rel(g2_output_full(&a_ccw, 1.0, 1.0)?, g12_cf),
            rel(g2_cavity_analytic(&a_cw)?, cav_cf),
            rel(g2_cavity_analytic(&a_ccw)?, cav_cf),
        ];
        let f = tol::CLOSED_FORM_FACTOR;
        let passed = numeric.iter().all(|&r| r >= 1.0 / f && r <= f)
            && analytic.iter().all(|&d| d <= tol::CLOSED_FORM_ANALYTIC_REL);
        Ok((
            passed,
            format!(
                "numeric/closed form = {:.3}, {:.3}, {:.3}, {:.3}; analytic worst deviation {:.2}%",
                numeric[0],
                numeric[1],
                numeric[2],
                numeric[3],
                100.0 * analytic.iter().fold(0.0f64, |a, &b| a.max(b))
            ),
        ))
    })();
    outcome(5, "closed-form agreement", result)
}

pub fn rotation_sweep(e: &Evidence) -> Outcome {
    let cw: Vec<&SweepRow> = e.rotation.iter().filter(|r| r.direction == Direction::Cw).collect();
    let minimum = cw
        .iter()
        .filter_map(|r| r.g2_output_numeric.map(|g| (r.sweep_value, g)))
        .fold((f64::NAN, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let at_rest = |dir: Direction| {
        e.rotation
            .iter()
            .find(|r| r.direction == dir && r.sweep_value == 0.0)
            .and_then(|r| r.g2_output_numeric)
    };
    let (g21, g12) = (at_rest(Direction::Cw), at_rest(Direction::Ccw));
    let min_khz = minimum.0 / 1e3;
    let still = match (g21, g12) {
        (Some(a), Some(b)) => rel(a, b),
        _ => f64::INFINITY,
    };
    let passed = (min_khz - tol::ROTATION_MIN_KHZ).abs() <= tol::ROTATION_WINDOW_KHZ
        && still <= tol::STILL_REL;
    Outcome {
        id: 6,
        title: "rotation sweep",
        passed,
        detail: format!(
            "g21 minimum {:.3e} at {min_khz:.2} kHz; at rest |g21 - g12|/g12 = {still:.2e}",
            minimum.1
        ),
    }
}

pub fn oracle_equivalence(e: &Evidence) -> Outcome {
    let mut checked = 0usize;
    let mut worst = (0.0f64, String::new());
    let mut missing = 0usize;
    for row in e.spectrum.iter().chain(&e.rotation) {
        let t = match row.t_total {
            Some(t) => t,
            None => {
                missing += 1;
                continue;
            }
        };
        if t <= tol::ORACLE_T_FLOOR {
            continue;
        }
        let pairs = [
            ("g2_out", row.g2_output_numeric, row.g2_output_analytic),
            ("g2_L", row.g2_cavity_l_numeric, row.g2_cavity_l_analytic),
        ];
        for (name, numeric, analytic) in pairs {
            match (numeric, analytic) {
                (Some(n), Some(a)) if n > tol::ORACLE_G2_FLOOR => {
                    checked += 1;
                    let d = rel(a, n);
                    if d > worst.0 {
                        worst = (
                            d,
                            format!("{name} {} {} = {:.4}", row.direction, row.variable.label(), row.sweep_value),
                        );
                    }
                }
                (Some(_), Some(_)) => {}
                _ => missing += 1,
            }
        }
    }
    let passed = missing == 0 && checked > 0 && worst.0 <= tol::ORACLE_REL;
    Outcome {
        id: 7,
        title: "oracle equivalence",
        passed,
        detail: format!(
            "{checked} comparisons, worst {:.2}% ({}), {missing} incomplete rows",
            100.0 * worst.0,
            worst.1
        ),
    }
}

/// Right-mode amplitude below this fraction of the left one counts as dark;
/// g²_R is 0/0 there and is not compared.
pub const DARK_MODE_RATIO: f64 = 1e-6;

pub fn linear_limit(e: &Evidence) -> Outcome {
    let f = e.fizeau();
    let result = (|| {
        let mut worst_g2 = 0.0f64;
        let mut worst_fidelity = 1.0f64;
        let mut dark = 0usize;
        for delta in [-f, -7.3, 0.0, 7.3, f, 30.0] {
            for dir in Direction::BOTH {
                let m = e.model(delta, dir).with_kerr(0.0);
                let s = solve_model(&m, e.cutoff)?;
                let c = g2_output(&s.rho, &m)?;
                let a = steady_amplitudes(&m)?;
                worst_g2 = worst_g2.max((c.g2_output - 1.0).abs()).max((c.g2_cavity_l - 1.0).abs());
                if a.c01.norm() > DARK_MODE_RATIO * a.c10.norm() {
                    worst_g2 = worst_g2.max((c.g2_cavity_r - 1.0).abs());
                } else {
                    dark += 1;
                }
                let fidelity = s.rho.fidelity_with_pure(&coherent_product_state(e.cutoff, a.c10, a.c01));
                worst_fidelity = worst_fidelity.min(fidelity);
            }
        }
        let passed = worst_g2 <= tol::LINEAR_G2 && worst_fidelity >= tol::LINEAR_FIDELITY;
        Ok((
            passed,
            format!(
                "max |g2 - 1| = {worst_g2:.2e}, min fidelity = {worst_fidelity:.9}, right mode dark at {dark} of 12 points"
            ),
        ))
    })();
    outcome(8, "linear limit", result)
}

pub fn numerical_hygiene(e: &Evidence) -> Outcome {
    let rows = e.spectrum.iter().chain(&e.rotation);
    let mut bad = 0usize;
    let mut worst = 0.0f64;
    for row in rows {
        match row.solver_residual {
            Some(r) if row.is_ok() => {
                worst = worst.max(r);
                if r > tol::RESIDUAL_MAX {
                    bad += 1;
                }
            }
            _ => bad += 1,
        }
    }
    let f = e.fizeau();
    let result = (|| {
        let fine = FockDims::square(5)?;
        let mut drift = 0.0f64;
        for (delta, dir) in [(f, Direction::Cw), (-f, Direction::Ccw), (-f, Direction::Cw), (f, Direction::Ccw)] {
            let m = e.model(delta, dir);
            let a = solve_point(&m, e.cutoff)?;
            let b = solve_point(&m, fine)?;
            for (x, y) in [
                (a.t.t_total, b.t.t_total),
                (a.c.g2_output, b.c.g2_output),
                (a.c.g2_cavity_l, b.c.g2_cavity_l),
                (a.c.g2_cavity_r, b.c.g2_cavity_r),
            ] {
                drift = drift.max(rel(x, y));
            }
        }
        let passed = bad == 0 && drift <= tol::CUTOFF_REL;
        Ok((
            passed,
            format!("max residual {worst:.2e} over all sweep rows, {bad} bad rows, (4,4) vs (5,5) drift {:.3}%", 100.0 * drift),
        ))
    })();
    outcome(9, "numerical hygiene", result)
}

pub fn scaling_law(e: &Evidence) -> Outcome {
    let result = (|| {
        let mut scaled = Vec::new();
        for u in tol::SCALING_U {
            let g = solve_point(&optimum(e, u, Direction::Cw), e.cutoff)?.c.g2_output;
            scaled.push(g * u.powi(4));
        }
        let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().copied().fold(0.0, f64::max);
        let spread = hi / lo - 1.0;
        Ok((
            spread <= tol::SCALING_REL,
            format!(
                "g21·(U/κ)⁴ = {:.4}, {:.4}, {:.4} for U/κ = 10, 20, 40 (spread {:.2}%)",
                scaled[0],
                scaled[1],
                scaled[2],
                100.0 * spread
            ),
        ))
    })();
    outcome(10, "scaling law", result)
}

pub type Criterion = fn(&Evidence) -> Outcome;

pub const CRITERIA: [Criterion; 10] = [
    classical_reciprocity,
    path_separation,
    nonreciprocal_blockade,
    enhancement_ratios,
    closed_form_agreement,
    rotation_sweep,
    oracle_equivalence,
    linear_limit,
    numerical_hygiene,
    scaling_law,
];

pub fn run_all(e: &Evidence) -> Vec<Outcome> {
    CRITERIA.iter().map(|c| c(e)).collect()
}
