use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::fock::{annihilation, FockDims, FockOperator, Mode};
use crate::params::ModelParams;

use super::hamiltonian::Hamiltonian;

/// Compressed sparse row matrix of complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<c64>,
}

impl SparseMatrix {
    /// Square `n × n` matrix from `(row, col, value)` triplets. Duplicates
    /// are summed and exact zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, c64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<c64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        // Drop cancelled entries after summation.
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != c64::new(0.0, 0.0) {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { n, row_ptr, col_idx: keep_cols, values: keep_vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, c64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> c64 {
        self.row(r).find(|&(j, _)| j == c).map_or(c64::new(0.0, 0.0), |(_, v)| v)
    }

    /// y = A x.
    pub fn matvec_into(&self, x: &[c64], y: &mut [c64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = c64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    pub fn matvec(&self, x: &[c64]) -> Vec<c64> {
        let mut y = vec![c64::new(0.0, 0.0); self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut m = Mat::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// Column-stacking vectorization of a square matrix.
pub fn vectorize(m: &Mat<c64>) -> Vec<c64> {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..m.ncols() {
        for i in 0..d {
            v.push(m[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vectorize`] for a `d × d` matrix.
pub fn unvectorize(v: &[c64], d: usize) -> Mat<c64> {
    assert_eq!(v.len(), d * d, "vector length is not a square of {d}");
    Mat::from_fn(d, d, |i, j| v[i + j * d])
}

/// The generator L with vec(dρ/dt) = L vec(ρ), stored sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    dims: FockDims,
    matrix: SparseMatrix,
}

impl Liouvillian {
    /// L = −i[H, ·] + Σ_k γ_k D[o_k] for jump operators `(γ_k, o_k)`.
    pub fn from_parts(h: &FockOperator, jumps: &[(f64, FockOperator)]) -> Result<Self> {
        let dims = h.dims();
        for (_, o) in jumps {
            if o.dims() != dims {
                return Err(Error::DimensionMismatch { left: dims, right: o.dims() });
            }
        }
        let d = dims.dim();
        let identity: Vec<(usize, usize, c64)> =
            (0..d).map(|i| (i, i, c64::new(1.0, 0.0))).collect();
        let entries = |op: &FockOperator| op.nonzeros().collect::<Vec<_>>();
        let transposed = |op: &FockOperator| op.nonzeros().map(|(i, j, v)| (j, i, v)).collect::<Vec<_>>();

        let mut triplets = Vec::new();
        let h_entries = entries(h);
        // vec(Hρ) = (I ⊗ H) vec ρ,  vec(ρH) = (Hᵀ ⊗ I) vec ρ
        push_kron(&mut triplets, c64::new(0.0, -1.0), &identity, &h_entries, d);
        push_kron(&mut triplets, c64::new(0.0, 1.0), &transposed(h), &identity, d);

        for (rate, o) in jumps {
            let o_entries = entries(o);
            let o_conj: Vec<_> = o_entries.iter().map(|&(i, j, v)| (i, j, v.conj())).collect();
            let od_o = &o.adjoint() * o;
            let half = c64::new(-0.5 * rate, 0.0);
            // vec(oρo†) = (ō ⊗ o) vec ρ
            push_kron(&mut triplets, c64::new(*rate, 0.0), &o_conj, &o_entries, d);
            push_kron(&mut triplets, half, &identity, &entries(&od_o), d);
            push_kron(&mut triplets, half, &transposed(&od_o), &identity, d);
        }
        Ok(Self { dims, matrix: SparseMatrix::from_triplets(d * d, triplets) })
    }

    pub fn dims(&self) -> FockDims {
        self.dims
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// L(ρ) as a matrix.
    pub fn apply(&self, rho: &Mat<c64>) -> Mat<c64> {
        unvectorize(&self.matrix.matvec(&vectorize(rho)), self.dims.dim())
    }

    pub fn norm_inf(&self) -> f64 {
        self.matrix.norm_inf()
    }
}

/// coef · (X ⊗ Y) for d × d factors given as entry lists.
fn push_kron(
    out: &mut Vec<(usize, usize, c64)>,
    coef: c64,
    x: &[(usize, usize, c64)],
    y: &[(usize, usize, c64)],
    d: usize,
) {
    out.reserve(x.len() * y.len());
    for &(xr, xc, xv) in x {
        let scaled = coef * xv;
        for &(yr, yc, yv) in y {
            out.push((xr * d + yr, xc * d + yc, scaled * yv));
        }
    }
}

/// Master-equation generator with decay 2κ_L on a_L and 2κ_R on a_R.
pub fn liouvillian(h: &Hamiltonian, m: &ModelParams) -> Result<Liouvillian> {
    let dims = h.dims();
    Liouvillian::from_parts(
        h.operator(),
        &[
            (2.0 * m.kappa_l, annihilation(dims, Mode::Left)),
            (2.0 * m.kappa_r, annihilation(dims, Mode::Right)),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian::build_hamiltonian;
    use crate::params::Direction;

    /// Direct evaluation of −i[H, ρ] + Σ γ D[o]ρ by matrix products.
    fn master_rhs(h: &FockOperator, jumps: &[(f64, FockOperator)], rho: &FockOperator) -> FockOperator {
        let i = c64::new(0.0, 1.0);
        let mut out = (-i) * &h.commutator(rho).unwrap();
        for (g, o) in jumps {
            let od = o.adjoint();
            let odo = &od * o;
            let d = &(&(o * rho) * &od) - &(0.5 * &(&(&odo * rho) + &(rho * &odo)));
            out = &out + &(*g * &d);
        }
        out
    }

    fn sample(dims: FockDims, seed: u64) -> FockOperator {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let raw = FockOperator::from_fn(dims, |_, _| c64::new(next(), next()));
        &raw + &raw.adjoint()
    }

    #[test]
    fn matches_direct_master_equation() {
        let dims = FockDims::new(3, 2).unwrap();
        let m = ModelParams::symmetric(1.3, 4.0, 2.2, 0.4, Direction::Ccw);
        let h = build_hamiltonian(&m, dims).unwrap();
        let l = liouvillian(&h, &m).unwrap();
        let jumps = [
            (2.0, annihilation(dims, Mode::Left)),
            (2.0, annihilation(dims, Mode::Right)),
        ];
        for seed in 1..4 {
            let rho = sample(dims, seed);
            let expected = master_rhs(h.operator(), &jumps, &rho);
            let got = l.apply(rho.matrix());
            for i in 0..dims.dim() {
                for j in 0..dims.dim() {
                    assert!((got[(i, j)] - expected.get(i, j)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn preserves_trace() {
        let dims = FockDims::new(3, 3).unwrap();
        let m = ModelParams::symmetric(-2.0, 20.0, 20.0, 0.5, Direction::Cw);
        let l = liouvillian(&build_hamiltonian(&m, dims).unwrap(), &m).unwrap();
        for seed in 10..15 {
            let rho = sample(dims, seed);
            let d_rho = l.apply(rho.matrix());
            let tr: c64 = (0..dims.dim()).map(|i| d_rho[(i, i)]).sum();
            assert!(tr.norm() < 1e-12, "trace drift {tr}");
        }
    }

    #[test]
    fn linear_in_the_state() {
        let dims = FockDims::new(2, 2).unwrap();
        let m = ModelParams::symmetric(0.7, 3.0, 5.0, 0.2, Direction::Cw);
        let l = liouvillian(&build_hamiltonian(&m, dims).unwrap(), &m).unwrap();
        let (a, b) = (sample(dims, 3), sample(dims, 4));
        let (alpha, beta) = (c64::new(0.3, -1.2), c64::new(-2.0, 0.5));
        let combo = &(alpha * &a) + &(beta * &b);
        let lhs = l.apply(combo.matrix());
        let la = l.apply(a.matrix());
        let lb = l.apply(b.matrix());
        for i in 0..dims.dim() {
            for j in 0..dims.dim() {
                let rhs = alpha * la[(i, j)] + beta * lb[(i, j)];
                assert!((lhs[(i, j)] - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spectrum_in_closed_left_half_plane() {
        // Dense eigensolve on a small instance.
        let dims = FockDims::new(2, 2).unwrap();
        let m = ModelParams::symmetric(0.37, 1.9, 2.6, 0.45, Direction::Ccw);
        let l = liouvillian(&build_hamiltonian(&m, dims).unwrap(), &m).unwrap();
        let eig = l.matrix().to_dense().eigenvalues().unwrap();
        assert_eq!(eig.len(), 81);
        let max_re = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        assert!(max_re <= 1e-10, "max Re λ = {max_re}");
        assert!(max_re.abs() <= 1e-10, "steady state should give a zero eigenvalue");
    }

    #[test]
    fn sparse_triplets_sum_and_cancel() {
        let one = c64::new(1.0, 0.0);
        let s = SparseMatrix::from_triplets(3, vec![(0, 1, one), (0, 1, one), (2, 2, one), (2, 2, -one)]);
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.get(0, 1), c64::new(2.0, 0.0));
        assert_eq!(s.get(2, 2), c64::new(0.0, 0.0));
        assert_eq!(s.matvec(&[one, one, one]), vec![c64::new(2.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 0.0)]);
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let m = Mat::from_fn(2, 2, |i, j| c64::new((i + 2 * j) as f64, 0.0));
        let v = vectorize(&m);
        assert_eq!(v.iter().map(|z| z.re).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(unvectorize(&v, 2), m);
    }
}
