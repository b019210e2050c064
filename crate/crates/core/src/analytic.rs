//! Weak-drive amplitude solution truncated at two photons.
//!
//! Between quantum jumps the state evolves under
//! H̃ = H − iκ_L a_L†a_L − iκ_R a_R†a_R. Writing
//! |ψ⟩ = Σ C_{n_L n_R} |n_L, n_R⟩ with C₀₀ = 1 and keeping the leading order
//! in the drive, the stationary conditions split into a 2×2 block for the
//! one-photon amplitudes and a 3×3 block for the two-photon ones:
//!
//! ```text
//! (Δ_L − iκ_L) C₁₀ + J C₀₁ + iε_L = 0
//! (Δ_R − iκ_R) C₀₁ + J C₁₀ − iε_R e^{iθ} = 0
//!
//! 2(Δ_L + U − iκ_L) C₂₀ + √2 J C₁₁ + √2 iε_L C₁₀ = 0
//! (Δ_L + Δ_R − iκ_L − iκ_R) C₁₁ + √2 J (C₂₀ + C₀₂) + iε_L C₀₁ − iε_R e^{iθ} C₁₀ = 0
//! 2(Δ_R − iκ_R) C₀₂ + √2 J C₁₁ − √2 iε_R e^{iθ} C₀₁ = 0
//! ```

use std::f64::consts::SQRT_2;

use faer::c64;

use crate::dynamics::phase_factor;
use crate::error::{Error, Result};
use crate::params::{Direction, ModelParams};

/// Relative tolerance on the optimal-point conditions.
pub const CONDITION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSet {
    pub c00: c64,
    pub c10: c64,
    pub c01: c64,
    pub c11: c64,
    pub c20: c64,
    pub c02: c64,
}

impl AmplitudeSet {
    pub fn two_photon(&self) -> TwoPhotonAmplitudes {
        TwoPhotonAmplitudes { c20: self.c20, c11: self.c11, c02: self.c02 }
    }

    /// |C₁₀| ≤ 0.3 and |C₂₀| ≤ 0.3 |C₁₀|.
    pub fn is_weak_drive(&self) -> bool {
        self.c10.norm() <= 0.3 && self.c20.norm() <= 0.3 * self.c10.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonAmplitudes {
    pub c20: c64,
    pub c11: c64,
    pub c02: c64,
}

impl TwoPhotonAmplitudes {
    /// C₂₀ − √2 i C₁₁, the combination the two output paths share.
    pub fn path_pair(&self) -> c64 {
        self.c20 - c64::new(0.0, SQRT_2) * self.c11
    }

    fn as_array(&self) -> [c64; 3] {
        [self.c20, self.c11, self.c02]
    }

    /// Largest componentwise relative deviation of `self` from `reference`
    /// after removing the best common phase.
    ///
    /// The closed forms fix C₀₀ to a real number while the amplitude solver
    /// keeps whatever global phase the drive convention produces, so the two
    /// are only comparable up to one shared factor e^{iφ}.
    pub fn deviation_up_to_phase(&self, reference: &Self) -> f64 {
        let a = self.as_array();
        let b = reference.as_array();
        let overlap: c64 = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c64::new(1.0, 0.0) };
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - phase * y).norm() / y.norm())
            .fold(0.0, f64::max)
    }
}

/// Leading-order stationary amplitudes of the non-Hermitian problem.
pub fn steady_amplitudes(m: &ModelParams) -> Result<AmplitudeSet> {
    m.validate()?;
    let i = c64::new(0.0, 1.0);
    let (dl, dr) = m.cavity_detunings();
    let (kl, kr) = (m.kappa_l, m.kappa_r);
    let j = m.coupling;
    let u = m.kerr;
    let drive_l = i * m.drive_l;
    let drive_r = -i * m.drive_r * phase_factor(m.waveguide_phase);
    let s = c64::new(SQRT_2, 0.0);

    let one = solve(
        [[c64::new(dl, -kl), j], [j, c64::new(dr, -kr)]],
        [-drive_l, -drive_r],
    )
    .ok_or(Error::SingularSystem { size: 2 })?;
    let [c10, c01] = one;

    let zero = c64::new(0.0, 0.0);
    let two = solve(
        [
            [c64::new(2.0 * (dl + u), -2.0 * kl), s * j, zero],
            [s * j, c64::new(dl + dr, -(kl + kr)), s * j],
            [zero, s * j, c64::new(2.0 * dr, -2.0 * kr)],
        ],
        [-s * drive_l * c10, -(drive_l * c01 + drive_r * c10), -s * drive_r * c01],
    )
    .ok_or(Error::SingularSystem { size: 3 })?;
    let [c20, c11, c02] = two;

    Ok(AmplitudeSet { c00: c64::new(1.0, 0.0), c10, c01, c11, c20, c02 })
}

/// Gaussian elimination with partial pivoting; `None` when a pivot vanishes
/// relative to its row scale.
fn solve<const N: usize>(mut a: [[c64; N]; N], mut b: [c64; N]) -> Option<[c64; N]> {
    let scale: Vec<f64> = a.iter().map(|r| r.iter().map(|z| z.norm()).fold(0.0, f64::max)).collect();
    if scale.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return None;
    }
    for col in 0..N {
        let pivot = (col..N).max_by(|&p, &q| a[p][col].norm().total_cmp(&a[q][col].norm()))?;
        if a[pivot][col].norm() <= 1e-14 * scale[pivot] {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [c64::new(0.0, 0.0); N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// g² ≈ 2{|C₂₀ − √2iC₁₁|² + |C₀₂|² − 2Re[(C₂₀ − √2iC₁₁)C₀₂*]}/|C₁₀|⁴.
///
/// Normalizes by the left cavity alone, so it only describes the output
/// where the right cavity is far off resonance. See [`g2_output_full`].
pub fn g2_output_analytic(a: &AmplitudeSet) -> Result<f64> {
    let n = a.c10.norm_sqr();
    if n == 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    let p = a.two_photon().path_pair();
    let num = p.norm_sqr() + a.c02.norm_sqr() - 2.0 * (p * a.c02.conj()).re;
    Ok(2.0 * num / (n * n))
}

/// Output g² from the same amplitudes without dropping the right cavity's
/// one-photon amplitude:
///
/// ```text
/// |√2 κ_L C₂₀ − 2i√(κ_Lκ_R) C₁₁ − √2 κ_R C₀₂|² / |√κ_L C₁₀ − i√κ_R C₀₁|⁴
/// ```
///
/// Reduces to [`g2_output_analytic`] for κ_L = κ_R and C₀₁ = 0.
pub fn g2_output_full(a: &AmplitudeSet, kappa_l: f64, kappa_r: f64) -> Result<f64> {
    let i = c64::new(0.0, 1.0);
    let one = a.c10 * kappa_l.sqrt() - i * kappa_r.sqrt() * a.c01;
    let n = one.norm_sqr();
    if n == 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    let two = a.c20 * (SQRT_2 * kappa_l) - i * 2.0 * (kappa_l * kappa_r).sqrt() * a.c11
        - a.c02 * (SQRT_2 * kappa_r);
    Ok(two.norm_sqr() / (n * n))
}

/// 2|C₂₀|²/|C₁₀|⁴.
pub fn g2_cavity_analytic(a: &AmplitudeSet) -> Result<f64> {
    pair_ratio(a.c20, a.c10)
}

/// 2|C₀₂|²/|C₀₁|⁴.
pub fn g2_cavity_r_analytic(a: &AmplitudeSet) -> Result<f64> {
    pair_ratio(a.c02, a.c01)
}

fn pair_ratio(two: c64, one: c64) -> Result<f64> {
    let n = one.norm_sqr();
    if n == 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    Ok(2.0 * two.norm_sqr() / (n * n))
}

/// Closed-form two-photon amplitudes at the blockade optimum.
///
/// CW needs Δ = Δ_F,L = U, CCW needs Δ = −Δ_F,L = −U; both put the left
/// cavity on resonance. The closed forms also assume equal decay rates and
/// equal drives. With κ, ε, U from `m` and the upper sign for CW:
///
/// ```text
/// C₂₀ = −ε²[(2U² − κ²)i ± 4Uκ] / (2√2 U³κ)
/// C₁₁ =  ε²[iUκ + (κ² ∓ 2U²)] / (4U³κ)
/// C₀₂ = −ε² / (4√2 U²)
/// ```
pub fn optimal_amplitudes(m: &ModelParams) -> Result<TwoPhotonAmplitudes> {
    m.validate()?;
    let u = m.kerr;
    if u <= 0.0 {
        return Err(Error::ConditionViolated("the Kerr shift must be positive".into()));
    }
    let target = match m.direction {
        Direction::Cw => u,
        Direction::Ccw => -u,
    };
    let checks = [
        ("detuning", m.detuning, target, u),
        ("left Fizeau shift", m.fizeau_l, u, u),
        ("right decay rate", m.kappa_r, m.kappa_l, m.kappa_l),
        ("right drive", m.drive_r, m.drive_l, m.drive_l.abs().max(f64::MIN_POSITIVE)),
    ];
    for (name, got, want, scale) in checks {
        if (got - want).abs() > CONDITION_TOLERANCE * scale {
            return Err(Error::ConditionViolated(format!("{name} is {got}, expected {want}")));
        }
    }

    let (k, e2) = (m.kappa_l, m.drive_l * m.drive_l);
    let sign = match m.direction {
        Direction::Cw => 1.0,
        Direction::Ccw => -1.0,
    };
    let u3k = u * u * u * k;
    let c20 = -c64::new(sign * 4.0 * u * k, 2.0 * u * u - k * k) * (e2 / (2.0 * SQRT_2 * u3k));
    let c11 = c64::new(k * k - sign * 2.0 * u * u, u * k) * (e2 / (4.0 * u3k));
    let c02 = c64::new(-e2 / (4.0 * SQRT_2 * u * u), 0.0);
    Ok(TwoPhotonAmplitudes { c20, c11, c02 })
}

/// (output g², left-cavity g²) at the optimum for a given U/κ.
pub fn g2_optimal(direction: Direction, u_over_kappa: f64) -> (f64, f64) {
    let u2 = u_over_kappa * u_over_kappa;
    let cavity = 1.0 / u2;
    match direction {
        Direction::Cw => (25.0 / (16.0 * u2 * u2), cavity),
        Direction::Ccw => (4.0 / u2, cavity),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Drive amplitude of the reference device, in units of κ.
    const DRIVE: f64 = 0.080_13;

    fn optimum(u: f64, direction: Direction) -> ModelParams {
        let delta = match direction {
            Direction::Cw => u,
            Direction::Ccw => -u,
        };
        ModelParams::symmetric(delta, u, u, DRIVE, direction)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn no_drive_leaves_vacuum() {
        let a = steady_amplitudes(&optimum(20.0, Direction::Cw).with_drive(0.0, 0.0)).unwrap();
        assert_eq!(a.c00, c64::new(1.0, 0.0));
        for c in [a.c10, a.c01, a.c20, a.c11, a.c02] {
            assert_eq!(c.norm(), 0.0);
        }
        assert_eq!(g2_output_analytic(&a), Err(Error::ZeroAmplitude));
    }

    #[test]
    fn linear_amplitudes_factorize() {
        for (delta, dir) in [(0.0, Direction::Cw), (7.5, Direction::Ccw), (-19.0, Direction::Cw)] {
            let a = steady_amplitudes(&ModelParams::symmetric(delta, 20.0, 0.0, 0.3, dir)).unwrap();
            assert!(rel(a.c20.norm(), (a.c10 * a.c10 / SQRT_2).norm()) < 1e-10);
            assert!((a.c20 - a.c10 * a.c10 / SQRT_2).norm() <= 1e-10 * a.c20.norm());
            assert!((a.c02 - a.c01 * a.c01 / SQRT_2).norm() <= 1e-10 * a.c02.norm());
            assert!((a.c11 - a.c10 * a.c01).norm() <= 1e-10 * a.c11.norm());
            assert!((g2_output_full(&a, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-10);
            assert!((g2_cavity_analytic(&a).unwrap() - 1.0).abs() < 1e-10);
            assert!((g2_cavity_r_analytic(&a).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn printed_formula_limits() {
        let zero = c64::new(0.0, 0.0);
        let c = c64::new(0.3, -0.2);
        let destructive = AmplitudeSet {
            c00: c64::new(1.0, 0.0),
            c10: c64::new(0.05, 0.0),
            c01: zero,
            c11: c / SQRT_2,
            c20: c64::new(0.0, 1.0) * c,
            c02: zero,
        };
        assert!(g2_output_analytic(&destructive).unwrap() < 1e-30);

        let c10 = c64::new(0.04, 0.03);
        let coherent = AmplitudeSet {
            c00: c64::new(1.0, 0.0),
            c10,
            c01: zero,
            c11: zero,
            c20: c10 * c10 / SQRT_2,
            c02: zero,
        };
        assert!((g2_output_analytic(&coherent).unwrap() - 1.0).abs() < 1e-6);
        assert!((g2_cavity_analytic(&coherent).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(g2_cavity_analytic(&AmplitudeSet { c20: zero, ..coherent }).unwrap(), 0.0);
    }

    #[test]
    fn full_form_reduces_to_printed_one_without_right_amplitude() {
        let a = steady_amplitudes(&optimum(20.0, Direction::Cw)).unwrap();
        let without_right = AmplitudeSet { c01: c64::new(0.0, 0.0), ..a };
        let full = g2_output_full(&without_right, 1.0, 1.0).unwrap();
        assert!(rel(full, g2_output_analytic(&without_right).unwrap()) < 1e-12);
    }

    #[test]
    fn solver_matches_closed_forms_at_the_optimum() {
        for u in [20.0, 40.0, 80.0] {
            for dir in Direction::BOTH {
                let m = optimum(u, dir);
                let solved = steady_amplitudes(&m).unwrap();
                assert!(solved.is_weak_drive());
                let dev = solved.two_photon().deviation_up_to_phase(&optimal_amplitudes(&m).unwrap());
                assert!(dev <= 0.02, "U = {u}, {dir}: deviation {dev}");
            }
        }
    }

    #[test]
    fn closed_forms_reproduce_the_optimal_correlations() {
        for u in [10.0, 20.0, 40.0] {
            for dir in Direction::BOTH {
                let m = optimum(u, dir);
                let two = optimal_amplitudes(&m).unwrap();
                let a = AmplitudeSet {
                    c00: c64::new(1.0, 0.0),
                    c10: c64::new(DRIVE, 0.0),
                    c01: c64::new(0.0, 0.0),
                    c11: two.c11,
                    c20: two.c20,
                    c02: two.c02,
                };
                let (g_out, g_cav) = g2_optimal(dir, u);
                // The closed forms keep subleading κ/U pieces, the limits drop them.
                assert!(rel(g2_output_analytic(&a).unwrap(), g_out) < 0.2 / u, "{dir} U = {u}");
                assert!(rel(g2_cavity_analytic(&a).unwrap(), g_cav) < 1.0 / u);
            }
        }
    }

    #[test]
    fn pairing_is_destructive_only_for_clockwise_input() {
        let cw = steady_amplitudes(&optimum(20.0, Direction::Cw)).unwrap().two_photon();
        let ccw = steady_amplitudes(&optimum(20.0, Direction::Ccw)).unwrap().two_photon();
        assert!(cw.path_pair().norm() < 0.1 * ccw.path_pair().norm());

        let big = optimal_amplitudes(&optimum(400.0, Direction::Cw)).unwrap();
        assert!(big.path_pair().norm() < 0.01 * big.c20.norm());
        let big = optimal_amplitudes(&optimum(400.0, Direction::Ccw)).unwrap();
        assert!((big.path_pair() - 2.0 * big.c20).norm() < 0.01 * big.c20.norm());
    }

    #[test]
    fn two_photon_right_amplitude_is_direction_independent() {
        let cw = optimal_amplitudes(&optimum(20.0, Direction::Cw)).unwrap();
        let ccw = optimal_amplitudes(&optimum(20.0, Direction::Ccw)).unwrap();
        assert_eq!(cw.c02, ccw.c02);
        assert!(rel(cw.c02.re, -DRIVE * DRIVE / (4.0 * SQRT_2 * 400.0)) < 1e-15);
    }

    #[test]
    fn optimum_condition_is_enforced() {
        let m = optimum(20.0, Direction::Cw).with_detuning(20.1);
        assert!(matches!(optimal_amplitudes(&m), Err(Error::ConditionViolated(_))));
        let m = optimum(20.0, Direction::Ccw).with_detuning(20.0);
        assert!(matches!(optimal_amplitudes(&m), Err(Error::ConditionViolated(_))));
    }

    #[test]
    fn optimal_values_and_ratios() {
        let (cw, cav) = g2_optimal(Direction::Cw, 20.0);
        assert!(rel(cw, 9.765_625e-6) < 1e-12);
        assert!(rel(cav, 2.5e-3) < 1e-12);
        assert!(rel(g2_optimal(Direction::Ccw, 20.0).0, 0.01) < 1e-12);
        for u in [10.0, 20.0, 40.0, 80.0, 3.7] {
            let (cw, cav) = g2_optimal(Direction::Cw, u);
            let (ccw, _) = g2_optimal(Direction::Ccw, u);
            assert!(rel(cw * u.powi(4), 25.0 / 16.0) < 1e-14);
            assert!(rel(ccw / cav, 4.0) < 1e-14);
            assert!(rel(cav / cw, 16.0 * u * u / 25.0) < 1e-14);
        }
        // The cavity-to-output ratio grows as (U/κ)²; it is 256 at U = 20κ.
        let (cw, cav) = g2_optimal(Direction::Cw, 20.0);
        assert!(rel(cav / cw, 256.0) < 1e-12);
    }
}
