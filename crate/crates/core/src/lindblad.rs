//! Dense density-matrix integration of the master equation
//!
//! `dρ/dt = −i[H(t), ρ] + LρL† − ½{L†L, ρ}`
//!
//! used as a brute-force reference for the trajectory ensemble, together with
//! the closed-form steady state of the driven harmonic oscillator.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{build_hamiltonian, build_lindblad, BandedOperator, PhysicalParams, StateVector};
use crate::ode::{self, GridError, Tolerances};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest dimension accepted for the Duffing oscillator.
pub const MAX_DIM: usize = 64;
/// Largest dimension accepted in harmonic mode, where the populated block
/// stays narrow around a coherent state.
pub const MAX_DIM_SHO: usize = 256;

const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Row-major `dim × dim` density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    elements: Vec<C64>,
}

impl DensityMatrix {
    pub fn from_elements(dim: usize, elements: Vec<C64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        if elements.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: elements.len(),
            });
        }
        Ok(Self { dim, elements })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &StateVector) -> Self {
        let psi = state.amplitudes();
        let dim = psi.len();
        let elements = (0..dim * dim).map(|k| psi[k / dim] * psi[k % dim].conj()).collect();
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[C64] {
        &self.elements
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.elements[i * self.dim + j]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `tr(ρA)`.
    pub fn expectation(&self, op: &BandedOperator) -> Result<C64> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: op.dim(),
            });
        }
        let (n, bw) = (self.dim, op.bandwidth());
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            for i in j.saturating_sub(bw)..(j + bw + 1).min(n) {
                acc += self.get(i, j) * op.get(j, i);
            }
        }
        Ok(acc)
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Whether `ρ + eps·I` admits a Cholesky factorization, i.e. all
    /// eigenvalues are above `−eps`. Uses the hermitian part of `ρ`.
    pub fn is_positive_within(&self, eps: f64) -> bool {
        let n = self.dim;
        let mut l = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re + eps;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d <= 0.0 {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = C64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = 0.5 * (self.get(i, j) + self.get(j, i).conj());
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }

    /// Population of Fock level `k`.
    pub fn population(&self, k: usize) -> f64 {
        self.get(k, k).re
    }
}

/// Levels whose population stays below this are treated as empty.
const EMPTY_POP: f64 = 1e-24;
/// Extra levels kept above the highest occupied one.
const BLOCK_GUARD: usize = 16;

/// `out = A·X` on the leading `m × m` block, for banded `A` and dense
/// row-major `X` with row stride `n`.
fn left_mul(a: &BandedOperator, x: &[C64], out: &mut [C64], n: usize, m: usize) {
    let bw = a.bandwidth();
    for i in 0..m {
        let row = &mut out[i * n..i * n + m];
        row.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
        for k in i.saturating_sub(bw)..(i + bw + 1).min(m) {
            let aik = a.get(i, k);
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, &xv) in row.iter_mut().zip(&x[k * n..k * n + m]) {
                *o += aik * xv;
            }
        }
    }
}

/// Size of the leading block outside which `ρ` is negligible.
fn occupied_block(rho: &[C64], n: usize) -> usize {
    let top = (0..n).rev().find(|&k| rho[k * n + k].re.abs() > EMPTY_POP).unwrap_or(0);
    (top + 1 + BLOCK_GUARD).min(n)
}

/// Matrix-free Liouvillian: `dρ = Kρ + ρK† + LρL†` with
/// `K(t) = −iH(t) − ½L†L`.
struct Liouvillian {
    k_static: BandedOperator,
    k_drive: BandedOperator,
    l: BandedOperator,
    n: usize,
    scratch: Vec<C64>,
    scratch2: Vec<C64>,
}

impl Liouvillian {
    fn new(params: &PhysicalParams, dim: usize) -> Result<Self> {
        let parts = build_hamiltonian(params, dim)?;
        let l = build_lindblad(params, dim)?;
        let ldl = l.adjoint().mul(&l)?;
        let k_static = parts.h_static.scale(-I).add_scaled(&ldl, C64::new(-0.5, 0.0))?;
        let k_drive = parts.h_drive.scale(-I);
        Ok(Self {
            k_static,
            k_drive,
            l,
            n: dim,
            scratch: vec![C64::new(0.0, 0.0); dim * dim],
            scratch2: vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    /// Evaluates `dρ` on the occupied block; everything outside it is
    /// returned as zero.
    fn rhs(&mut self, t: f64, rho: &[C64], drho: &mut [C64]) {
        let n = self.n;
        let m = occupied_block(rho, n);
        if m < n {
            drho.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
        }
        let k = self.k_static.add_scaled(&self.k_drive, C64::new(t.cos(), 0.0)).expect("same dimension");
        left_mul(&k, rho, &mut self.scratch, n, m);
        for i in 0..m {
            for j in 0..m {
                drho[i * n + j] = self.scratch[i * n + j] + self.scratch[j * n + i].conj();
            }
        }
        left_mul(&self.l, rho, &mut self.scratch, n, m);
        // (Lρ)† = ρL†, so L·(Lρ)† = LρL†
        for i in 0..m {
            for j in 0..m {
                self.scratch2[i * n + j] = self.scratch[j * n + i].conj();
            }
        }
        left_mul(&self.l, &self.scratch2, &mut self.scratch, n, m);
        // Both shortcuts above assume ρ = ρ†. Keeping only the hermitian part
        // of the jump term stops rounding-level antihermitian components
        // from being driven by −LAL†, which would make them grow.
        let s = &self.scratch;
        for i in 0..m {
            for j in i..m {
                let v = 0.5 * (s[i * n + j] + s[j * n + i].conj());
                drho[i * n + j] += v;
                if i != j {
                    drho[j * n + i] += v.conj();
                }
            }
        }
    }
}

/// Integrates the master equation from `rho0` at `t = 0` and returns `ρ` at
/// each time of `t_grid` (ascending, non-negative).
pub fn evolve_density(
    params: &PhysicalParams,
    dim: usize,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    tol: Tolerances,
) -> Result<Vec<DensityMatrix>> {
    params.validate()?;
    let cap = if params.sho_mode { MAX_DIM_SHO } else { MAX_DIM };
    if dim < 2 || dim > cap {
        return Err(Error::InvalidDimension { dim });
    }
    if rho0.dim != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho0.dim,
        });
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            value: t_grid.first().copied().unwrap_or(f64::NAN),
            reason: "must be ascending and non-negative",
        });
    }
    let mut liouvillian = Liouvillian::new(params, dim)?;
    let mut rhs = |t: f64, x: &[C64], dx: &mut [C64]| liouvillian.rhs(t, x, dx);
    let tr0 = rho0.trace().re;
    let max_step = 0.1;
    let mut out = Vec::with_capacity(t_grid.len());
    let result = ode::integrate_with(&mut rhs, 0.0, &rho0.elements, t_grid, tol, max_step, |t, y| {
        let rho = DensityMatrix {
            dim,
            elements: y.to_vec(),
        };
        let drift = (rho.trace().re - tr0).abs();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift { time: t, drift });
        }
        out.push(rho);
        Ok(())
    });
    match result {
        Ok(()) => Ok(out),
        Err(GridError::Underflow(time, step)) => Err(Error::StepUnderflow { time, step }),
        Err(GridError::Callback(e)) => Err(e),
    }
}

/// Coefficients of the long-time coherent amplitude
/// `α(t) = A e^{−it} + B e^{+it}` of the driven, damped harmonic oscillator.
pub fn sho_steady_amplitude(params: &PhysicalParams) -> Result<(C64, C64)> {
    if params.gamma == 0.0 {
        return Err(Error::UndampedResonance);
    }
    params.validate()?;
    if !params.sho_mode {
        return Err(Error::InvalidParameter {
            name: "sho_mode",
            value: 0.0,
            reason: "closed form exists only for the harmonic oscillator",
        });
    }
    let f = params.drive_strength() / (2.0 * std::f64::consts::SQRT_2);
    let a = -I * f / params.gamma;
    let b = -I * f / C64::new(params.gamma, 2.0);
    Ok((a, b))
}

/// Steady mean photon number `|A|² + |B|²` (period average).
pub fn sho_steady_photon_number(params: &PhysicalParams) -> Result<f64> {
    let (a, b) = sho_steady_amplitude(params)?;
    Ok(a.norm_sqr() + b.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_ladder, build_quadratures, coherent_state};

    const TOL: Tolerances = Tolerances { rel: 1e-10, abs: 1e-12 };

    #[test]
    fn vacuum_is_stationary_without_drive() {
        let p = PhysicalParams::sho(0.0);
        let rho0 = DensityMatrix::pure(&StateVector::vacuum(12).unwrap());
        let out = evolve_density(&p, 12, &rho0, &[1.0, 5.0], TOL).unwrap();
        for rho in &out {
            assert!((rho.population(0) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn single_excitation_decays_exponentially() {
        let p = PhysicalParams::sho(0.0);
        let rho0 = DensityMatrix::pure(&StateVector::fock(1, 8).unwrap());
        let ts = [0.5, 2.0, 6.0];
        let out = evolve_density(&p, 8, &rho0, &ts, TOL).unwrap();
        for (rho, &t) in out.iter().zip(&ts) {
            let expected = (-2.0 * p.gamma * t).exp();
            assert!((rho.population(1) - expected).abs() < 1e-8, "t={t}");
            assert!((rho.population(0) - (1.0 - expected)).abs() < 1e-8);
        }
    }

    #[test]
    fn trace_hermiticity_positivity_are_preserved() {
        let p = PhysicalParams { beta: 1.0, ..PhysicalParams::duffing(0.3) };
        let rho0 = DensityMatrix::pure(&coherent_state(C64::new(1.0, 0.5), 24).unwrap());
        let out = evolve_density(&p, 24, &rho0, &[1.0, 4.0, 9.0], TOL).unwrap();
        for rho in &out {
            assert!((rho.trace().re - 1.0).abs() < 1e-9);
            assert!(rho.hermiticity_error() < 1e-10, "{}", rho.hermiticity_error());
            assert!(rho.is_positive_within(1e-8));
        }
    }

    #[test]
    fn pure_state_expectation_matches_vector_form() {
        let psi = coherent_state(C64::new(1.2, -0.4), 20).unwrap();
        let rho = DensityMatrix::pure(&psi);
        let quad = build_quadratures(20).unwrap();
        let via_rho = rho.expectation(&quad.q).unwrap();
        let via_psi = crate::fock::expectation(&psi, &quad.q).unwrap();
        assert!((via_rho.re - via_psi.re).abs() < 1e-12);
    }

    #[test]
    fn positivity_check_rejects_negative_eigenvalue() {
        let rho = DensityMatrix::from_elements(
            2,
            vec![C64::new(1.1, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.1, 0.0)],
        )
        .unwrap();
        assert!(!rho.is_positive_within(1e-8));
        assert!(rho.is_positive_within(0.2));
    }

    #[test]
    fn steady_amplitude_values() {
        let (a, b) = sho_steady_amplitude(&PhysicalParams::sho(0.0)).unwrap();
        assert_eq!((a.norm(), b.norm()), (0.0, 0.0));

        let p = PhysicalParams::sho(0.3);
        let (a, _) = sho_steady_amplitude(&p).unwrap();
        assert!((a.norm() - 8.485).abs() < 1e-3);
        let n = sho_steady_photon_number(&p).unwrap();
        assert!((n - 72.3).abs() < 0.05, "{n}");
        assert!((2.0 * p.gamma * n - 18.1).abs() < 0.05);

        let heavy = PhysicalParams { gamma: 10.0, ..p };
        let (a, _) = sho_steady_amplitude(&heavy).unwrap();
        assert!((a.norm() - 0.106).abs() < 1e-3);

        let undamped = PhysicalParams { gamma: 0.0, ..p };
        assert!(matches!(sho_steady_amplitude(&undamped), Err(Error::UndampedResonance)));
    }

    #[test]
    fn steady_amplitude_solves_the_amplitude_equation() {
        // residual of α' = −(i+Γ)α − i f (e^{it} + e^{−it}) at a few times
        let p = PhysicalParams::sho(0.3);
        let (a, b) = sho_steady_amplitude(&p).unwrap();
        let f = p.drive_strength() / (2.0 * std::f64::consts::SQRT_2);
        for &t in &[0.0, 0.7, 2.3] {
            let em = (-I * t).exp();
            let ep = (I * t).exp();
            let alpha = a * em + b * ep;
            let dalpha = -I * a * em + I * b * ep;
            let rhs = -(I + p.gamma) * alpha - I * f * (ep + em);
            assert!((dalpha - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_oversized_duffing_oracle() {
        let p = PhysicalParams::duffing(0.3);
        let rho0 = DensityMatrix::pure(&StateVector::vacuum(65).unwrap());
        assert!(matches!(
            evolve_density(&p, 65, &rho0, &[1.0], TOL),
            Err(Error::InvalidDimension { dim: 65 })
        ));
    }

    #[test]
    fn ladder_expectation_of_coherent_state() {
        let alpha = C64::new(0.8, 0.3);
        let rho = DensityMatrix::pure(&coherent_state(alpha, 24).unwrap());
        let a = build_ladder(24).unwrap();
        assert!((rho.expectation(&a).unwrap() - alpha).norm() < 1e-9);
    }
}
