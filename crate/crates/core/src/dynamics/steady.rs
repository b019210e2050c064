use faer::linalg::solvers::Solve;
use faer::{c64, Mat};

use crate::error::{Error, Result};

use super::density::DensityMatrix;
use super::integrate::{integrate, IntegrationOptions, Outcome};
use super::superop::{unvectorize, vectorize, Liouvillian};

/// Above this condition estimate the bordered system is treated as singular,
/// i.e. the kernel of L has more than one dimension.
const SINGULAR_CONDITION: f64 = 1e13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyStateMethod {
    /// Bordered linear solve: one row of L replaced by the trace condition.
    Direct,
    /// Long-time integration from the vacuum.
    Integrate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateOptions {
    /// Accepted relative residual, see [`relative_residual`].
    pub tolerance: f64,
    /// Which route to try first.
    pub method: SteadyStateMethod,
    /// Fall back to integration when the direct route misses the tolerance.
    pub fallback: bool,
    pub integration: IntegrationOptions,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            method: SteadyStateMethod::Direct,
            fallback: true,
            integration: IntegrationOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// ‖L vec ρ‖_∞ / (‖L‖_∞ ‖vec ρ‖_∞).
    pub residual: f64,
    pub method: SteadyStateMethod,
}

/// ‖L vec ρ‖_∞ / (‖L‖_∞ ‖vec ρ‖_∞), with ‖L‖_∞ the maximum absolute row sum.
pub fn relative_residual(l: &Liouvillian, rho: &Mat<c64>) -> f64 {
    let x = vectorize(rho);
    let r = l.matrix().matvec(&x);
    let max = |v: &[c64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let denom = l.norm_inf() * max(&x);
    if denom == 0.0 {
        max(&r)
    } else {
        max(&r) / denom
    }
}

pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    steady_state_with(l, &SteadyStateOptions::default())
}

/// Solves L vec ρ = 0 with Tr ρ = 1.
///
/// A degenerate kernel is reported as [`Error::NonUnique`] and never falls
/// back. Any other miss of the tolerance on the first route triggers the
/// second one when `fallback` is set; [`Error::NoConvergence`] is returned if
/// nothing meets the tolerance.
pub fn steady_state_with(l: &Liouvillian, options: &SteadyStateOptions) -> Result<SteadyState> {
    let first = match options.method {
        SteadyStateMethod::Direct => solve_direct(l),
        SteadyStateMethod::Integrate => integrate_steady_state(l, &options.integration),
    };
    let failure = match first {
        Ok(s) if s.residual <= options.tolerance => return Ok(s),
        Err(e @ Error::NonUnique { .. }) => return Err(e),
        Ok(s) => Error::NoConvergence { t: 0.0, change: s.residual },
        Err(e) => e,
    };
    if !options.fallback {
        return Err(failure);
    }
    let second = match options.method {
        SteadyStateMethod::Direct => integrate_steady_state(l, &options.integration),
        SteadyStateMethod::Integrate => solve_direct(l),
    }?;
    if second.residual <= options.tolerance {
        Ok(second)
    } else {
        Err(Error::NoConvergence { t: f64::NAN, change: second.residual })
    }
}

/// Bordered direct solve with one step of iterative refinement.
pub fn solve_direct(l: &Liouvillian) -> Result<SteadyState> {
    let dims = l.dims();
    let d = dims.dim();
    let n = d * d;

    let mut a = l.matrix().to_dense();
    for c in 0..n {
        a[(0, c)] = c64::new(0.0, 0.0);
    }
    for i in 0..d {
        a[(0, i + i * d)] = c64::new(1.0, 0.0);
    }
    let a_norm = (0..n)
        .map(|r| (0..n).map(|c| a[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max);

    let lu = a.partial_piv_lu();
    let mut b = Mat::<c64>::zeros(n, 1);
    b[(0, 0)] = c64::new(1.0, 0.0);
    let mut x = lu.solve(&b);

    // Condition estimate from a fixed, dense probe right-hand side.
    let probe = Mat::<c64>::from_fn(n, 1, |i, _| {
        let t = i as f64;
        c64::new((0.7 * t + 0.3).sin(), (1.3 * t + 0.1).cos())
    });
    let y = lu.solve(&probe);
    let y_max = (0..n).map(|i| y[(i, 0)].norm()).fold(0.0, f64::max);
    let probe_max = (0..n).map(|i| probe[(i, 0)].norm()).fold(0.0, f64::max);
    let condition = a_norm * y_max / probe_max;
    let x_finite = (0..n).all(|i| x[(i, 0)].re.is_finite() && x[(i, 0)].im.is_finite());
    if !condition.is_finite() || condition > SINGULAR_CONDITION || !x_finite {
        return Err(Error::NonUnique { condition });
    }

    // r = b − A x, evaluated through the sparse generator.
    let xv: Vec<c64> = (0..n).map(|i| x[(i, 0)]).collect();
    let lx = l.matrix().matvec(&xv);
    let mut r = Mat::<c64>::zeros(n, 1);
    let trace: c64 = (0..d).map(|i| xv[i + i * d]).sum();
    r[(0, 0)] = c64::new(1.0, 0.0) - trace;
    for i in 1..n {
        r[(i, 0)] = -lx[i];
    }
    let dx = lu.solve(&r);
    for i in 0..n {
        x[(i, 0)] += dx[(i, 0)];
    }

    let raw = unvectorize(&(0..n).map(|i| x[(i, 0)]).collect::<Vec<_>>(), d);
    finish(l, raw, SteadyStateMethod::Direct)
}

/// Integrates from the vacuum until the state settles.
pub fn integrate_steady_state(l: &Liouvillian, options: &IntegrationOptions) -> Result<SteadyState> {
    let d = l.dims().dim();
    let mut start = vec![c64::new(0.0, 0.0); d * d];
    start[0] = c64::new(1.0, 0.0);
    match integrate(l.matrix(), d, start, options) {
        Outcome::Settled { state } => finish(l, unvectorize(&state, d), SteadyStateMethod::Integrate),
        Outcome::Exhausted { t, change } => Err(Error::NoConvergence { t, change }),
    }
}

/// Symmetrizes, normalizes and validates a raw kernel vector.
fn finish(l: &Liouvillian, raw: Mat<c64>, method: SteadyStateMethod) -> Result<SteadyState> {
    let d = raw.nrows();
    let herm = Mat::from_fn(d, d, |i, j| (raw[(i, j)] + raw[(j, i)].conj()) * 0.5);
    let trace: f64 = (0..d).map(|i| herm[(i, i)].re).sum();
    if !(trace.is_finite() && trace.abs() > 0.0) {
        return Err(Error::InvalidState(format!("kernel vector has trace {trace}")));
    }
    let normalized = Mat::from_fn(d, d, |i, j| herm[(i, j)] / trace);
    let residual = relative_residual(l, &normalized);
    let rho = DensityMatrix::new(l.dims(), normalized)?;
    Ok(SteadyState { rho, residual, method })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_hamiltonian, liouvillian};
    use crate::fock::{annihilation, FockDims, FockOperator, Mode};
    use crate::params::{Direction, ModelParams};

    fn generator(m: &ModelParams, dims: FockDims) -> Liouvillian {
        liouvillian(&build_hamiltonian(m, dims).unwrap(), m).unwrap()
    }

    #[test]
    fn pure_decay_relaxes_to_vacuum() {
        let dims = FockDims::new(2, 2).unwrap();
        let h = FockOperator::zero(dims);
        let l = Liouvillian::from_parts(&h, &[(2.0, annihilation(dims, Mode::Left)), (2.0, annihilation(dims, Mode::Right))]).unwrap();
        let s = steady_state(&l).unwrap();
        assert!((s.rho.population(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_drive_gives_vacuum() {
        let dims = FockDims::new(3, 3).unwrap();
        let m = ModelParams::symmetric(4.0, 20.0, 20.0, 0.0, Direction::Cw);
        let s = steady_state(&generator(&m, dims)).unwrap();
        assert!((s.rho.population(0, 0) - 1.0).abs() < 1e-12);
        assert_eq!(s.method, SteadyStateMethod::Direct);
    }

    #[test]
    fn direct_and_integrated_states_agree() {
        let dims = FockDims::new(3, 3).unwrap();
        let m = ModelParams::symmetric(20.0, 20.0, 20.0, 0.3, Direction::Cw);
        let l = generator(&m, dims);
        let direct = solve_direct(&l).unwrap();
        let integrated = integrate_steady_state(&l, &IntegrationOptions::default()).unwrap();
        assert!(direct.residual <= 1e-8, "direct residual {}", direct.residual);
        assert!(integrated.residual <= 1e-8, "integrated residual {}", integrated.residual);
        assert_eq!(integrated.method, SteadyStateMethod::Integrate);
        assert!(direct.rho.trace_distance(&integrated.rho) < 1e-8);
    }

    #[test]
    fn integration_first_route() {
        let dims = FockDims::new(2, 2).unwrap();
        let m = ModelParams::symmetric(-5.0, 3.0, 2.0, 0.2, Direction::Ccw);
        let opts = SteadyStateOptions { method: SteadyStateMethod::Integrate, ..Default::default() };
        let s = steady_state_with(&generator(&m, dims), &opts).unwrap();
        assert_eq!(s.method, SteadyStateMethod::Integrate);
    }

    #[test]
    fn decoupled_undamped_mode_is_non_unique() {
        // The right mode neither decays nor couples: every |n_R⟩ population is conserved.
        let dims = FockDims::new(2, 2).unwrap();
        let h = FockOperator::zero(dims);
        let l = Liouvillian::from_parts(&h, &[(2.0, annihilation(dims, Mode::Left))]).unwrap();
        assert!(matches!(steady_state(&l), Err(Error::NonUnique { .. })));
    }

    #[test]
    fn integration_budget_exhaustion_is_reported() {
        let dims = FockDims::new(2, 2).unwrap();
        let m = ModelParams::symmetric(0.0, 1.0, 1.0, 0.3, Direction::Cw);
        let opts = IntegrationOptions { max_time_units: 2.0, ..Default::default() };
        assert!(matches!(
            integrate_steady_state(&generator(&m, dims), &opts),
            Err(Error::NoConvergence { .. })
        ));
    }
}
