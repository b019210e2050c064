use faer::{c64, Mat, Side};

use crate::error::{Error, Result};
use crate::fock::FockDims;

const TRACE_TOLERANCE: f64 = 1e-10;
const HERMITICITY_TOLERANCE: f64 = 1e-10;
const POSITIVITY_FLOOR: f64 = -1e-10;

/// A trace-one, Hermitian, positive semidefinite operator on the truncated
/// space. Constructors check all three properties.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: FockDims,
    matrix: Mat<c64>,
}

impl DensityMatrix {
    pub fn new(dims: FockDims, matrix: Mat<c64>) -> Result<Self> {
        let d = dims.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, dims {dims} need {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let rho = Self { dims, matrix };
        rho.check_invariants()?;
        Ok(rho)
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) state vector.
    pub fn pure(dims: FockDims, psi: &[c64]) -> Result<Self> {
        let d = dims.dim();
        if psi.len() != d {
            return Err(Error::InvalidState(format!("state has length {}, expected {d}", psi.len())));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        let matrix = Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm);
        Self::new(dims, matrix)
    }

    pub fn maximally_mixed(dims: FockDims) -> Self {
        let d = dims.dim();
        let p = 1.0 / d as f64;
        let matrix =
            Mat::from_fn(d, d, |i, j| if i == j { c64::new(p, 0.0) } else { c64::new(0.0, 0.0) });
        Self { dims, matrix }
    }

    pub fn dims(&self) -> FockDims {
        self.dims
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn trace(&self) -> c64 {
        (0..self.dims.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Population of |n_l, n_r⟩.
    pub fn population(&self, n_l: usize, n_r: usize) -> f64 {
        let i = self.dims.index(n_l, n_r);
        self.matrix[(i, i)].re
    }

    /// max |ρ − ρ†| over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dims.dim();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("Hermitian eigensolver failed on a density matrix")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// ⟨ψ|ρ|ψ⟩ / ⟨ψ|ψ⟩, the fidelity with a pure state.
    pub fn fidelity_with_pure(&self, psi: &[c64]) -> f64 {
        let d = self.dims.dim();
        assert_eq!(psi.len(), d, "state length does not match density matrix");
        let mut acc = c64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += psi[i].conj() * self.matrix[(i, j)] * psi[j];
            }
        }
        acc.re / psi.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Trace norm ‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        trace_norm_hermitian(&Mat::from_fn(self.dims.dim(), self.dims.dim(), |i, j| {
            self.matrix[(i, j)] - other.matrix[(i, j)]
        }))
    }

    pub fn check_invariants(&self) -> Result<()> {
        let trace = self.trace();
        if (trace - c64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {trace}")));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidState(format!("max |ρ − ρ†| = {herm:.3e}")));
        }
        let min = self.min_eigenvalue();
        if min < POSITIVITY_FLOOR {
            return Err(Error::InvalidState(format!("smallest eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

/// Sum of |eigenvalues| of the Hermitian part of `m`.
pub(crate) fn trace_norm_hermitian(m: &Mat<c64>) -> f64 {
    let n = m.nrows();
    let h = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    h.self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigensolver failed")
        .iter()
        .map(|e| e.abs())
        .sum()
}
