//! Adaptive Dormand–Prince 5(4) integration of vec(ρ)' = L vec(ρ).

use faer::c64;

use super::density::trace_norm_hermitian;
use super::superop::{unvectorize, SparseMatrix};

/// Controls the long-time integration used as the steady-state fallback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// 1/κ in the units of the generator. Convergence is tested once per
    /// `time_unit`.
    pub time_unit: f64,
    /// Give up after this many time units.
    pub max_time_units: f64,
    /// Stop once ‖ρ(t + 1/κ) − ρ(t)‖₁ falls to this value.
    pub settle_tolerance: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            time_unit: 1.0,
            max_time_units: 50.0,
            settle_tolerance: 1e-10,
            rtol: 1e-10,
            atol: 1e-13,
        }
    }
}

pub(crate) enum Outcome {
    Settled { state: Vec<c64> },
    Exhausted { t: f64, change: f64 },
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

pub(crate) fn integrate(l: &SparseMatrix, d: usize, start: Vec<c64>, opts: &IntegrationOptions) -> Outcome {
    let n = start.len();
    let zero = c64::new(0.0, 0.0);
    let mut y = start;
    let mut k: Vec<Vec<c64>> = vec![vec![zero; n]; 7];
    let mut stage = vec![zero; n];
    let mut y_new = vec![zero; n];
    l.matvec_into(&y, &mut k[0]);

    let t_end = opts.time_unit * opts.max_time_units;
    let mut t = 0.0;
    let mut h = 0.01 * opts.time_unit;
    let mut next_check = opts.time_unit;
    let mut last_checkpoint = y.clone();
    let mut change = f64::INFINITY;

    while t < t_end {
        let step = h.min(next_check - t);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (a, kj) in A[s].iter().zip(&k).take(s) {
                    if *a != 0.0 {
                        acc += kj[i] * (step * a);
                    }
                }
                stage[i] = acc;
            }
            // The last stage is the fifth-order solution itself, so k[6]
            // doubles as k[0] of the next step.
            l.matvec_into(&stage, &mut k[s]);
        }
        y_new.copy_from_slice(&stage);

        let mut err = 0.0;
        for i in 0..n {
            let mut e = zero;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * (step * E[j]);
                }
            }
            let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            err += (e.norm() / scale).powi(2);
        }
        let err = (err / n as f64).sqrt();

        if err <= 1.0 {
            t += step;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            if (t - next_check).abs() <= 1e-12 * opts.time_unit {
                t = next_check;
                let diff: Vec<c64> = y.iter().zip(&last_checkpoint).map(|(a, b)| a - b).collect();
                change = trace_norm_hermitian(&unvectorize(&diff, d));
                if change <= opts.settle_tolerance {
                    return Outcome::Settled { state: y };
                }
                last_checkpoint.copy_from_slice(&y);
                next_check += opts.time_unit;
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        // Only grow h from accepted full steps; a step clipped to a checkpoint
        // says nothing about the admissible size.
        if err > 1.0 || step == h {
            h = step * factor;
        }
    }
    Outcome::Exhausted { t, change }
}
