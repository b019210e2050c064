use std::f64::consts::FRAC_PI_2;

use faer::c64;

use crate::error::{Error, Result};
use crate::fock::{annihilation, FockDims, FockOperator, Mode};
use crate::params::{Direction, ModelParams};

/// Rotating-frame Hamiltonian for one drive direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    op: FockOperator,
    direction: Direction,
}

impl Hamiltonian {
    pub fn operator(&self) -> &FockOperator {
        &self.op
    }

    pub fn dims(&self) -> FockDims {
        self.op.dims()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }
}

/// e^{iθ}, exact at θ = π/2.
pub(crate) fn phase_factor(theta: f64) -> c64 {
    if theta == FRAC_PI_2 {
        c64::new(0.0, 1.0)
    } else {
        c64::from_polar(1.0, theta)
    }
}

/// H_σ = Δ_L,σ a_L†a_L + U a_L†a_L†a_L a_L + Δ_R,σ a_R†a_R
///       + J (a_L†a_R + a_R†a_L) + i(ε_L a_L† − ε_R e^{iθ} a_R† − h.c.)
///
/// Both cavities are driven for either direction; the direction only enters
/// through the detunings.
pub fn build_hamiltonian(m: &ModelParams, dims: FockDims) -> Result<Hamiltonian> {
    m.validate()?;
    if !dims.supports_two_photons() {
        return Err(Error::CutoffTooSmall(dims));
    }
    let a_l = annihilation(dims, Mode::Left);
    let a_r = annihilation(dims, Mode::Right);
    let ad_l = a_l.adjoint();
    let ad_r = a_r.adjoint();

    let (delta_l, delta_r) = m.cavity_detunings();
    let n_l = &ad_l * &a_l;
    let n_r = &ad_r * &a_r;
    let kerr = &(&ad_l * &ad_l) * &(&a_l * &a_l);
    let hopping = &(&ad_l * &a_r) + &(&ad_r * &a_l);

    let raise = &(c64::new(m.drive_l, 0.0) * &ad_l)
        - &((phase_factor(m.waveguide_phase) * m.drive_r) * &ad_r);
    let i = c64::new(0.0, 1.0);
    let drive = &(i * &raise) - &(i * &raise.adjoint());

    let op = &(&(&(delta_l * &n_l) + &(m.kerr * &kerr)) + &(delta_r * &n_r))
        + &(&(m.coupling * &hopping) + &drive);
    Ok(Hamiltonian { op, direction: m.direction })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims() -> FockDims {
        FockDims::new(3, 3).unwrap()
    }

    #[test]
    fn decoupled_linear_modes_are_diagonal() {
        let mut m = ModelParams::symmetric(2.5, 7.0, 0.0, 0.0, Direction::Cw);
        m.coupling = c64::new(0.0, 0.0);
        let h = build_hamiltonian(&m, dims()).unwrap();
        let (dl, dr) = m.cavity_detunings();
        let d = dims();
        for i in 0..d.dim() {
            for j in 0..d.dim() {
                let (nl, nr) = d.occupation(i);
                let expected = if i == j { nl as f64 * dl + nr as f64 * dr } else { 0.0 };
                assert!((h.operator().get(i, j) - c64::new(expected, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn kerr_anharmonicity_of_left_mode() {
        let m = ModelParams::symmetric(1.0, 3.0, 20.0, 0.08, Direction::Cw);
        let h = build_hamiltonian(&m, dims()).unwrap();
        let e2 = h.operator().element((2, 0), (2, 0)).re;
        let e1 = h.operator().element((1, 0), (1, 0)).re;
        assert!((e2 - 2.0 * e1 - 2.0 * m.kerr).abs() < 1e-12);
    }

    #[test]
    fn direction_flips_the_fizeau_sign() {
        let cw = ModelParams::symmetric(1.5, 20.0, 20.0, 0.08, Direction::Cw);
        let ccw = cw.with_direction(Direction::Ccw);
        let mut flipped = cw.clone();
        flipped.fizeau_l = -cw.fizeau_l;
        flipped.fizeau_r = -cw.fizeau_r;
        let h_ccw = build_hamiltonian(&ccw, dims()).unwrap();
        let h_flip = build_hamiltonian(&flipped, dims()).unwrap();
        assert!((h_ccw.operator() - h_flip.operator()).max_abs() < 1e-14);
        assert_eq!(h_ccw.direction(), Direction::Ccw);
    }

    #[test]
    fn hermitian_at_quarter_wave_phase() {
        let m = ModelParams::symmetric(-3.0, 20.0, 20.0, 0.3, Direction::Ccw);
        let h = build_hamiltonian(&m, dims()).unwrap();
        assert!(h.operator().hermiticity_error() <= 1e-12);
    }

    #[test]
    fn drive_matrix_elements() {
        // i ε_L a_L† puts +iε_L on ⟨1,0|H|0,0⟩; −i ε_R e^{iπ/2} a_R† puts +ε_R on ⟨0,1|H|0,0⟩.
        let mut m = ModelParams::symmetric(0.0, 0.0, 0.0, 0.0, Direction::Cw);
        m.drive_l = 0.3;
        m.drive_r = 0.7;
        let h = build_hamiltonian(&m, dims()).unwrap();
        assert!((h.operator().element((1, 0), (0, 0)) - c64::new(0.0, 0.3)).norm() < 1e-15);
        assert!((h.operator().element((0, 1), (0, 0)) - c64::new(0.7, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_single_photon_cutoff() {
        let m = ModelParams::symmetric(0.0, 20.0, 20.0, 0.08, Direction::Cw);
        let small = FockDims::new(1, 3).unwrap();
        assert!(matches!(build_hamiltonian(&m, small), Err(Error::CutoffTooSmall(_))));
    }
}
