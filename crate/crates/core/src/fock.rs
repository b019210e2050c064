//! Truncated two-mode Fock space.
//!
//! Basis states |n_L, n_R⟩ are ordered row-major in (n_L, n_R): the state
//! |n_L, n_R⟩ sits at index `n_L * (n_max_R + 1) + n_R`. Operators are stored
//! as dense complex matrices; the largest space used here is 36-dimensional.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::{c64, Mat};

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};

/// One of the two cavity modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Left,
    Right,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Left => "L",
            Mode::Right => "R",
        })
    }
}

/// Photon-number cutoffs of the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockDims {
    n_max_l: usize,
    n_max_r: usize,
}

impl FockDims {
    /// Any cutoff of at least one photon per mode is a valid operator space.
    /// The dynamics additionally require two photons per mode, see
    /// [`FockDims::supports_two_photons`].
    pub fn new(n_max_l: usize, n_max_r: usize) -> Result<Self> {
        if n_max_l == 0 || n_max_r == 0 {
            return Err(Error::Validation(vec![format!(
                "photon cutoffs must be at least 1, got ({n_max_l}, {n_max_r})"
            )]));
        }
        Ok(Self { n_max_l, n_max_r })
    }

    pub fn square(n_max: usize) -> Result<Self> {
        Self::new(n_max, n_max)
    }

    pub fn n_max_l(&self) -> usize {
        self.n_max_l
    }

    pub fn n_max_r(&self) -> usize {
        self.n_max_r
    }

    pub fn n_max(&self, mode: Mode) -> usize {
        match mode {
            Mode::Left => self.n_max_l,
            Mode::Right => self.n_max_r,
        }
    }

    /// Hilbert-space dimension (n_max_L + 1)(n_max_R + 1).
    pub fn dim(&self) -> usize {
        (self.n_max_l + 1) * (self.n_max_r + 1)
    }

    pub fn supports_two_photons(&self) -> bool {
        self.n_max_l >= 2 && self.n_max_r >= 2
    }

    /// Basis index of |n_l, n_r⟩.
    pub fn index(&self, n_l: usize, n_r: usize) -> usize {
        debug_assert!(n_l <= self.n_max_l && n_r <= self.n_max_r);
        n_l * (self.n_max_r + 1) + n_r
    }

    /// Occupation numbers (n_L, n_R) of basis index `i`.
    pub fn occupation(&self, i: usize) -> (usize, usize) {
        (i / (self.n_max_r + 1), i % (self.n_max_r + 1))
    }

    /// Basis vector |n_l, n_r⟩.
    pub fn basis_state(&self, n_l: usize, n_r: usize) -> Vec<c64> {
        let mut v = vec![c64::new(0.0, 0.0); self.dim()];
        v[self.index(n_l, n_r)] = c64::new(1.0, 0.0);
        v
    }
}

impl fmt::Display for FockDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n_max_l, self.n_max_r)
    }
}

/// A linear operator on the truncated two-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dims: FockDims,
    matrix: Mat<c64>,
}

impl FockOperator {
    pub fn from_matrix(dims: FockDims, matrix: Mat<c64>) -> Result<Self> {
        let d = dims.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Validation(vec![format!(
                "matrix is {}x{}, dims {dims} need {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )]));
        }
        Ok(Self { dims, matrix })
    }

    pub(crate) fn from_fn(dims: FockDims, f: impl FnMut(usize, usize) -> c64) -> Self {
        let d = dims.dim();
        Self { dims, matrix: Mat::from_fn(d, d, f) }
    }

    pub fn zero(dims: FockDims) -> Self {
        Self::from_fn(dims, |_, _| c64::new(0.0, 0.0))
    }

    pub fn identity(dims: FockDims) -> Self {
        Self::from_fn(dims, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
    }

    pub fn dims(&self) -> FockDims {
        self.dims
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.matrix[(row, col)]
    }

    /// ⟨n_l', n_r'| O |n_l, n_r⟩.
    pub fn element(&self, bra: (usize, usize), ket: (usize, usize)) -> c64 {
        self.get(self.dims.index(bra.0, bra.1), self.dims.index(ket.0, ket.1))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dims, |i, j| self.matrix[(j, i)].conj())
    }

    pub fn scale(&self, factor: c64) -> Self {
        Self::from_fn(self.dims, |i, j| self.matrix[(i, j)] * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c64::new(factor, 0.0))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self::from_fn(self.dims, |i, j| self.matrix[(i, j)] + other.matrix[(i, j)]))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self::from_fn(self.dims, |i, j| self.matrix[(i, j)] - other.matrix[(i, j)]))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self { dims: self.dims, matrix: &self.matrix * &other.matrix })
    }

    /// [A, B] = AB − BA.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    /// O|ψ⟩ for a state vector in the documented basis order.
    pub fn apply(&self, state: &[c64]) -> Vec<c64> {
        let d = self.dims.dim();
        assert_eq!(state.len(), d, "state length does not match operator dimension");
        (0..d)
            .map(|i| (0..d).map(|j| self.matrix[(i, j)] * state[j]).sum())
            .collect()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        let d = self.dims.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                m = m.max(self.matrix[(i, j)].norm());
            }
        }
        m
    }

    /// max |O − O†| relative to max |O| (0 for the zero operator).
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dims.dim();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Iterator over the structurally nonzero entries `(row, col, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        let d = self.dims.dim();
        (0..d).flat_map(move |j| {
            (0..d).filter_map(move |i| {
                let v = self.matrix[(i, j)];
                (v != c64::new(0.0, 0.0)).then_some((i, j, v))
            })
        })
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { left: self.dims, right: other.dims });
        }
        Ok(())
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;

    /// Panics on mismatched dimensions; use [`FockOperator::checked_add`] to
    /// handle that case.
    fn add(self, rhs: Self) -> FockOperator {
        self.checked_add(rhs).expect("FockOperator addition")
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;

    fn sub(self, rhs: Self) -> FockOperator {
        self.checked_sub(rhs).expect("FockOperator subtraction")
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;

    fn mul(self, rhs: Self) -> FockOperator {
        self.checked_mul(rhs).expect("FockOperator product")
    }
}

impl Mul<&FockOperator> for c64 {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        rhs.scale(self)
    }
}

impl Mul<&FockOperator> for f64 {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        rhs.scale_real(self)
    }
}

impl Neg for &FockOperator {
    type Output = FockOperator;

    fn neg(self) -> FockOperator {
        self.scale_real(-1.0)
    }
}

/// Bosonic annihilation operator of `mode`, tensored with the identity on
/// the other mode: ⟨n−1|a|n⟩ = √n.
pub fn annihilation(dims: FockDims, mode: Mode) -> FockOperator {
    FockOperator::from_fn(dims, |row, col| {
        let (rl, rr) = dims.occupation(row);
        let (cl, cr) = dims.occupation(col);
        let hit = match mode {
            Mode::Left => rr == cr && cl >= 1 && rl == cl - 1,
            Mode::Right => rl == cl && cr >= 1 && rr == cr - 1,
        };
        if hit {
            let n = match mode {
                Mode::Left => cl,
                Mode::Right => cr,
            };
            c64::new((n as f64).sqrt(), 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

pub fn creation(dims: FockDims, mode: Mode) -> FockOperator {
    annihilation(dims, mode).adjoint()
}

/// Number operator a†a of `mode`, built directly on the diagonal.
pub fn number(dims: FockDims, mode: Mode) -> FockOperator {
    FockOperator::from_fn(dims, |row, col| {
        if row != col {
            return c64::new(0.0, 0.0);
        }
        let (nl, nr) = dims.occupation(row);
        let n = match mode {
            Mode::Left => nl,
            Mode::Right => nr,
        };
        c64::new(n as f64, 0.0)
    })
}

/// ⟨O⟩ = Tr(ρ O).
pub fn expectation(rho: &DensityMatrix, op: &FockOperator) -> Result<c64> {
    if rho.dims() != op.dims() {
        return Err(Error::DimensionMismatch { left: rho.dims(), right: op.dims() });
    }
    let d = op.dims().dim();
    let r = rho.matrix();
    let m = op.matrix();
    let mut acc = c64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += r[(i, j)] * m[(j, i)];
        }
    }
    Ok(acc)
}

/// Product of truncated coherent states |α_L⟩ ⊗ |α_R⟩, renormalized on the
/// truncated space.
pub fn coherent_product_state(dims: FockDims, alpha_l: c64, alpha_r: c64) -> Vec<c64> {
    let single = |alpha: c64, n_max: usize| -> Vec<c64> {
        let mut amps = Vec::with_capacity(n_max + 1);
        let mut term = c64::new(1.0, 0.0);
        amps.push(term);
        for n in 1..=n_max {
            term = term * alpha / (n as f64).sqrt();
            amps.push(term);
        }
        amps
    };
    let left = single(alpha_l, dims.n_max_l());
    let right = single(alpha_r, dims.n_max_r());
    let mut state = vec![c64::new(0.0, 0.0); dims.dim()];
    for (nl, al) in left.iter().enumerate() {
        for (nr, ar) in right.iter().enumerate() {
            state[dims.index(nl, nr)] = al * ar;
        }
    }
    let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    state.iter_mut().for_each(|z| *z /= norm);
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dims(l: usize, r: usize) -> FockDims {
        FockDims::new(l, r).unwrap()
    }

    fn assert_close(a: &[c64], b: &[c64]) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() < 1e-14, "{x} vs {y}");
        }
    }

    #[test]
    fn basis_order_is_row_major() {
        let d = dims(2, 3);
        assert_eq!(d.dim(), 12);
        assert_eq!(d.index(1, 2), 6);
        assert_eq!(d.occupation(6), (1, 2));
        assert_eq!(d.occupation(11), (2, 3));
    }

    #[test]
    fn ladder_action_on_basis_states() {
        let d = dims(2, 2);
        let a_l = annihilation(d, Mode::Left);
        assert_close(&a_l.apply(&d.basis_state(1, 0)), &d.basis_state(0, 0));
        let out = a_l.apply(&d.basis_state(2, 1));
        let expected: Vec<c64> = d.basis_state(1, 1).iter().map(|z| z * 2f64.sqrt()).collect();
        assert_close(&out, &expected);
        assert_close(&a_l.apply(&d.basis_state(0, 2)), &vec![c64::new(0.0, 0.0); 9]);
    }

    #[test]
    fn number_operator_counts_photons() {
        let d = dims(3, 4);
        for mode in [Mode::Left, Mode::Right] {
            let a = annihilation(d, mode);
            let n = &a.adjoint() * &a;
            for i in 0..d.dim() {
                let (nl, nr) = d.occupation(i);
                let expected = if mode == Mode::Left { nl } else { nr } as f64;
                let out = n.apply(&d.basis_state(nl, nr));
                let scaled: Vec<c64> =
                    d.basis_state(nl, nr).iter().map(|z| z * expected).collect();
                assert_close(&out, &scaled);
            }
            assert!((&n - &number(d, mode)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn number_spectrum_is_zero_to_cutoff() {
        let d = dims(4, 2);
        let n = number(d, Mode::Left);
        let mut eig = n.matrix().self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        eig.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert_eq!(eig.len(), 5);
        for (k, e) in eig.iter().enumerate() {
            assert!((e - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn truncated_commutator_is_identity_below_cutoff() {
        let d = dims(3, 2);
        let a = annihilation(d, Mode::Left);
        let c = a.commutator(&a.adjoint()).unwrap();
        for i in 0..d.dim() {
            let (nl, _) = d.occupation(i);
            for j in 0..d.dim() {
                let v = c.get(i, j);
                if i != j {
                    assert_eq!(v, c64::new(0.0, 0.0));
                } else if nl < d.n_max_l() {
                    assert!((v - c64::new(1.0, 0.0)).norm() < 1e-14);
                } else {
                    // a a† − a† a = −n_max on the top level.
                    assert!((v - c64::new(-(d.n_max_l() as f64), 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn distinct_modes_commute() {
        let d = dims(3, 3);
        let c = annihilation(d, Mode::Left).commutator(&annihilation(d, Mode::Right)).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn mismatched_dims_are_rejected() {
        let a = annihilation(dims(2, 2), Mode::Left);
        let b = annihilation(dims(3, 2), Mode::Left);
        assert!(matches!(a.checked_mul(&b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.checked_add(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn expectation_on_simple_states() {
        let d = dims(2, 2);
        let n_l = number(d, Mode::Left);
        let vac = DensityMatrix::pure(d, &d.basis_state(0, 0)).unwrap();
        assert_eq!(expectation(&vac, &n_l).unwrap(), c64::new(0.0, 0.0));
        let one = DensityMatrix::pure(d, &d.basis_state(1, 0)).unwrap();
        assert!((expectation(&one, &n_l).unwrap() - c64::new(1.0, 0.0)).norm() < 1e-15);

        let small = dims(1, 1);
        let mixed = DensityMatrix::maximally_mixed(small);
        let id = FockOperator::identity(small);
        assert!((expectation(&mixed, &id).unwrap() - c64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(expectation(&mixed, &n_l), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn coherent_state_is_eigenstate_below_cutoff() {
        let d = dims(12, 12);
        let alpha = c64::new(0.1, -0.05);
        let psi = coherent_product_state(d, alpha, c64::new(0.0, 0.02));
        let out = annihilation(d, Mode::Left).apply(&psi);
        let residual: f64 =
            out.iter().zip(&psi).map(|(o, p)| (o - alpha * p).norm_sqr()).sum::<f64>().sqrt();
        assert!(residual < 1e-12);
    }

    fn arb_operator(d: FockDims) -> impl Strategy<Value = FockOperator> {
        let n = d.dim() * d.dim();
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |v| {
            FockOperator::from_fn(d, |i, j| {
                let (re, im) = v[i * d.dim() + j];
                c64::new(re, im)
            })
        })
    }

    proptest! {
        #[test]
        fn adjoint_reverses_products(
            (a, b) in (arb_operator(FockDims::new(2, 1).unwrap()), arb_operator(FockDims::new(2, 1).unwrap()))
        ) {
            let lhs = (&a * &b).adjoint();
            let rhs = &b.adjoint() * &a.adjoint();
            prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
            prop_assert_eq!(a.adjoint().adjoint(), a);
        }

        #[test]
        fn hermitian_expectations_are_real(
            (o, v) in (arb_operator(FockDims::new(2, 2).unwrap()),
                       prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9))
        ) {
            let d = FockDims::new(2, 2).unwrap();
            let h = &o + &o.adjoint();
            let psi: Vec<c64> = v.iter().map(|&(re, im)| c64::new(re, im)).collect();
            prop_assume!(psi.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
            let rho = DensityMatrix::pure(d, &psi).unwrap();
            let e = expectation(&rho, &h).unwrap();
            prop_assert!(e.im.abs() <= 1e-12 * e.norm().max(1.0));
        }
    }
}
