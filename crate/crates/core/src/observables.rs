//! Transmission and second-order correlations of the output field.
//!
//! With vacuum at the two unused ports the field leaving the output port is,
//! up to the input term that does not contribute to normally ordered
//! moments,
//!
//! ```text
//! a_out = √κ_L a_L − i √κ_R a_R
//! ```
//!
//! for a quarter-wave waveguide phase. Every formula below is the normally
//! ordered expansion of ⟨a_out†a_out⟩ and ⟨a_out†a_out†a_out a_out⟩ in cavity
//! moments; `docs/output-field.md` derives the signs.

use faer::c64;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::fock::{annihilation, expectation, FockOperator, Mode};
use crate::params::{Direction, ModelParams};

/// Squared output flux below which g² is reported as [`Error::ZeroFlux`].
pub const FLUX_FLOOR: f64 = 1e-30;

/// Input photon flux ⟨a_in†a_in⟩ = ε_L²/κ_L, in the units of the model.
pub fn photon_flux_in(m: &ModelParams) -> f64 {
    m.drive_l * m.drive_l / m.kappa_l
}

/// Transmission split into the two cavity paths and their interference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionBreakdown {
    pub t_left: f64,
    pub t_right: f64,
    /// Signed cross term between the two paths.
    pub t_interference: f64,
    pub t_total: f64,
    pub direction: Direction,
}

/// The six signed pieces of ⟨a_out†²a_out²⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Terms {
    /// κ_L² ⟨a_L†²a_L²⟩
    pub left_pair: f64,
    /// κ_R² ⟨a_R†²a_R²⟩
    pub right_pair: f64,
    /// 4κ_Lκ_R ⟨a_L†a_R†a_L a_R⟩
    pub cross_number: f64,
    /// −4κ_L√(κ_Lκ_R) Re[i⟨a_L†²a_L a_R⟩]
    pub left_heavy: f64,
    /// −4κ_R√(κ_Lκ_R) Re[i⟨a_L†a_R†a_R²⟩]
    pub right_heavy: f64,
    /// −2κ_Lκ_R Re⟨a_L†²a_R²⟩
    pub pair_exchange: f64,
}

impl G2Terms {
    pub fn sum(&self) -> f64 {
        self.left_pair
            + self.right_pair
            + self.cross_number
            + self.left_heavy
            + self.right_heavy
            + self.pair_exchange
    }

    /// Labelled values in the fixed order used by the reports.
    pub fn labelled(&self) -> [(&'static str, f64); 6] {
        [
            ("left_pair", self.left_pair),
            ("right_pair", self.right_pair),
            ("cross_number", self.cross_number),
            ("left_heavy", self.left_heavy),
            ("right_heavy", self.right_heavy),
            ("pair_exchange", self.pair_exchange),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub g2_output: f64,
    pub g2_cavity_l: f64,
    pub g2_cavity_r: f64,
    pub terms: G2Terms,
    /// ⟨a_out†a_out⟩.
    pub output_flux: f64,
}

/// Cavity moments shared by the transmission and correlation formulas.
struct Moments {
    n_l: f64,
    n_r: f64,
    /// ⟨a_L†a_R⟩
    hop: c64,
}

struct Ladder {
    a_l: FockOperator,
    a_r: FockOperator,
    ad_l: FockOperator,
    ad_r: FockOperator,
}

impl Ladder {
    fn new(rho: &DensityMatrix) -> Self {
        let dims = rho.dims();
        let a_l = annihilation(dims, Mode::Left);
        let a_r = annihilation(dims, Mode::Right);
        Self { ad_l: a_l.adjoint(), ad_r: a_r.adjoint(), a_l, a_r }
    }

    fn moments(&self, rho: &DensityMatrix) -> Result<Moments> {
        Ok(Moments {
            n_l: expectation(rho, &(&self.ad_l * &self.a_l))?.re,
            n_r: expectation(rho, &(&self.ad_r * &self.a_r))?.re,
            hop: expectation(rho, &(&self.ad_l * &self.a_r))?,
        })
    }
}

fn i_times(z: c64) -> c64 {
    c64::new(-z.im, z.re)
}

pub fn transmission(rho: &DensityMatrix, m: &ModelParams) -> Result<TransmissionBreakdown> {
    let flux = photon_flux_in(m);
    if flux == 0.0 {
        return Err(Error::ZeroDrive);
    }
    let mom = Ladder::new(rho).moments(rho)?;
    let t_left = m.kappa_l * mom.n_l / flux;
    let t_right = m.kappa_r * mom.n_r / flux;
    let t_interference = -2.0 * (m.kappa_l * m.kappa_r).sqrt() * i_times(mom.hop).re / flux;
    Ok(TransmissionBreakdown {
        t_left,
        t_right,
        t_interference,
        t_total: t_left + t_right + t_interference,
        direction: m.direction,
    })
}

/// Output-field g² with its term breakdown, plus both intracavity g².
pub fn g2_output(rho: &DensityMatrix, m: &ModelParams) -> Result<CorrelationReport> {
    let ops = Ladder::new(rho);
    let mom = ops.moments(rho)?;
    let (kl, kr) = (m.kappa_l, m.kappa_r);
    let root = (kl * kr).sqrt();

    let output_flux = kl * mom.n_l + kr * mom.n_r - 2.0 * root * i_times(mom.hop).re;
    let denom = output_flux * output_flux;
    if !(denom >= FLUX_FLOOR) {
        return Err(Error::ZeroFlux { value: denom });
    }

    let ad_l2 = &ops.ad_l * &ops.ad_l;
    let a_l2 = &ops.a_l * &ops.a_l;
    let a_r2 = &ops.a_r * &ops.a_r;
    let ad_lr = &ops.ad_l * &ops.ad_r;
    let ev = |op: FockOperator| expectation(rho, &op);

    let pair_l = ev(&ad_l2 * &a_l2)?.re;
    let pair_r = ev(&(&ops.ad_r * &ops.ad_r) * &a_r2)?.re;
    let terms = G2Terms {
        left_pair: kl * kl * pair_l,
        right_pair: kr * kr * pair_r,
        cross_number: 4.0 * kl * kr * ev(&ad_lr * &(&ops.a_l * &ops.a_r))?.re,
        left_heavy: -4.0 * kl * root * i_times(ev(&ad_l2 * &(&ops.a_l * &ops.a_r))?).re,
        right_heavy: -4.0 * kr * root * i_times(ev(&ad_lr * &a_r2)?).re,
        pair_exchange: -2.0 * kl * kr * ev(&ad_l2 * &a_r2)?.re,
    };

    Ok(CorrelationReport {
        g2_output: terms.sum() / denom,
        g2_cavity_l: ratio(pair_l, mom.n_l, Mode::Left)?,
        g2_cavity_r: ratio(pair_r, mom.n_r, Mode::Right)?,
        terms,
        output_flux,
    })
}

/// ⟨a†a†aa⟩/⟨a†a⟩² for one cavity.
pub fn g2_cavity(rho: &DensityMatrix, mode: Mode) -> Result<f64> {
    let a = annihilation(rho.dims(), mode);
    let ad = a.adjoint();
    let n = expectation(rho, &(&ad * &a))?.re;
    let pair = expectation(rho, &(&(&ad * &ad) * &(&a * &a)))?.re;
    ratio(pair, n, mode)
}

fn ratio(pair: f64, n: f64, mode: Mode) -> Result<f64> {
    if !(n * n >= FLUX_FLOOR) {
        return Err(Error::ZeroPopulation(mode));
    }
    Ok(pair / (n * n))
}
