//! Truncated Fock-basis representation of a single bosonic mode.
//!
//! Conventions: hbar = 1, unit mass and frequency, `q = (a + a†)/√2`,
//! `p = i(a† − a)/√2`. Every operator of the Duffing Hamiltonian has at most
//! four nonzero diagonals on either side of the main one, so operators are
//! stored in compact band form and applied in `O(dim · bandwidth)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Physical parameters of the oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Correspondence scaling, in (0, 1].
    pub beta: f64,
    /// Damping rate Γ.
    pub gamma: f64,
    /// Drive amplitude.
    pub g: f64,
    /// Use the driven harmonic oscillator instead of the Duffing potential.
    pub sho_mode: bool,
}

impl PhysicalParams {
    pub fn duffing(g: f64) -> Self {
        Self {
            beta: 0.1,
            gamma: 0.125,
            g,
            sho_mode: false,
        }
    }

    pub fn sho(g: f64) -> Self {
        Self {
            sho_mode: true,
            ..Self::duffing(g)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: self.beta,
                reason: "must lie in (0, 1]",
            });
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: self.gamma,
                reason: "must be positive",
            });
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "g",
                value: self.g,
                reason: "must be non-negative",
            });
        }
        Ok(())
    }

    /// Amplitude of the operator multiplying `cos t`.
    pub fn drive_strength(&self) -> f64 {
        self.g / self.beta
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        Err(Error::InvalidDimension { dim })
    } else {
        Ok(())
    }
}

/// Pure state over the truncated Fock basis `|0⟩ … |dim−1⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        Ok(Self { amplitudes })
    }

    /// Number state `|n⟩`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: n + 1,
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::fock(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-9
    }

    /// Rescales to unit norm and returns the previous squared norm.
    pub fn normalize(&mut self) -> f64 {
        let n2 = self.norm_sqr();
        if n2 > 0.0 {
            let s = 1.0 / n2.sqrt();
            self.amplitudes.iter_mut().for_each(|c| *c *= s);
        }
        n2
    }

    /// Population of the top 5% of levels (at least one level).
    pub fn tail_population(&self) -> f64 {
        tail_population(&self.amplitudes, self.dim())
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// First level of the monitored tail band for a basis of size `dim`.
pub fn tail_start(dim: usize) -> usize {
    let width = (dim as f64 * 0.05).ceil().max(1.0) as usize;
    dim - width.min(dim)
}

/// Tail population for amplitudes that may cover only a leading window of
/// the full basis.
pub(crate) fn tail_population(amps: &[C64], dim: usize) -> f64 {
    let start = tail_start(dim);
    if amps.len() <= start {
        return 0.0;
    }
    norm_sqr(&amps[start..])
}

/// Complex banded matrix in compact row storage: element `(i, j)` with
/// `|i − j| ≤ bandwidth` lives at `i * (2·bandwidth + 1) + (j + bandwidth − i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedOperator {
    dim: usize,
    bandwidth: usize,
    data: Vec<C64>,
    hermitian: bool,
}

impl BandedOperator {
    pub fn zeros(dim: usize, bandwidth: usize) -> Result<Self> {
        check_dim(dim)?;
        let bandwidth = bandwidth.min(dim - 1);
        Ok(Self {
            dim,
            bandwidth,
            data: vec![C64::new(0.0, 0.0); dim * (2 * bandwidth + 1)],
            hermitian: false,
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim, 0)?;
        for i in 0..dim {
            op.set(i, i, C64::new(1.0, 0.0));
        }
        op.hermitian = true;
        Ok(op)
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let mut op = Self::zeros(entries.len(), 0)?;
        for (i, &e) in entries.iter().enumerate() {
            op.set(i, i, C64::new(e, 0.0));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    #[inline]
    fn width(&self) -> usize {
        2 * self.bandwidth + 1
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.dim || j >= self.dim || i.abs_diff(j) > self.bandwidth {
            None
        } else {
            Some(i * self.width() + j + self.bandwidth - i)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.index(i, j)
            .map(|k| self.data[k])
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Panics if `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        let k = self
            .index(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside band {}", self.bandwidth));
        self.data[k] = value;
        self.hermitian = false;
    }

    /// Row `i` as a slice of `2·bandwidth + 1` entries starting at column
    /// `i − bandwidth` (entries with out-of-range columns are zero).
    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[C64] {
        let w = self.width();
        &self.data[i * w..(i + 1) * w]
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for i in 0..self.dim {
            let lo = i.saturating_sub(self.bandwidth);
            let hi = (i + self.bandwidth).min(self.dim - 1);
            for j in lo..=hi {
                out[i * self.dim + j] = self.get(i, j);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim, self.bandwidth).expect("dim already validated");
        for i in 0..self.dim {
            let lo = i.saturating_sub(self.bandwidth);
            let hi = (i + self.bandwidth).min(self.dim - 1);
            for j in lo..=hi {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out.hermitian = self.hermitian;
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|c| *c *= factor);
        out.hermitian = self.hermitian && factor.im == 0.0;
        out
    }

    fn widen(&self, bandwidth: usize) -> Self {
        let mut out = Self::zeros(self.dim, bandwidth.max(self.bandwidth)).expect("valid");
        for i in 0..self.dim {
            let lo = i.saturating_sub(self.bandwidth);
            let hi = (i + self.bandwidth).min(self.dim - 1);
            for j in lo..=hi {
                out.set(i, j, self.get(i, j));
            }
        }
        out.hermitian = self.hermitian;
        out
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &Self, factor: C64) -> Result<Self> {
        self.check_same_dim(other.dim)?;
        let mut out = self.widen(other.bandwidth);
        let bw = other.bandwidth;
        for i in 0..self.dim {
            let lo = i.saturating_sub(bw);
            let hi = (i + bw).min(self.dim - 1);
            for j in lo..=hi {
                let k = out.index(i, j).expect("inside widened band");
                out.data[k] += factor * other.get(i, j);
            }
        }
        out.hermitian = self.hermitian && other.hermitian && factor.im == 0.0;
        Ok(out)
    }

    /// Matrix product `self · other` on the truncated basis.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other.dim)?;
        let bw = self.bandwidth + other.bandwidth;
        let mut out = Self::zeros(self.dim, bw)?;
        for i in 0..self.dim {
            let klo = i.saturating_sub(self.bandwidth);
            let khi = (i + self.bandwidth).min(self.dim - 1);
            for k in klo..=khi {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let jlo = k.saturating_sub(other.bandwidth);
                let jhi = (k + other.bandwidth).min(self.dim - 1);
                for j in jlo..=jhi {
                    let idx = out.index(i, j).expect("inside product band");
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Forces exact hermiticity by mirroring the lower triangle (and taking
    /// the real part of the diagonal), then flags the operator hermitian.
    pub fn hermitize(mut self) -> Self {
        for i in 0..self.dim {
            let d = self.index(i, i).expect("diagonal");
            self.data[d] = C64::new(self.data[d].re, 0.0);
            let hi = (i + self.bandwidth).min(self.dim - 1);
            for j in i + 1..=hi {
                let v = self.get(j, i).conj();
                let k = self.index(i, j).expect("inside band");
                self.data[k] = v;
            }
        }
        self.hermitian = true;
        self
    }

    fn check_same_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            })
        } else {
            Ok(())
        }
    }

    /// `out = A · x` restricted to the leading `x.len()` levels.
    pub fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        let n = x.len().min(self.dim);
        let bw = self.bandwidth;
        for i in 0..n {
            let row = self.row(i);
            let lo = i.saturating_sub(bw);
            let hi = (i + bw + 1).min(n);
            let mut acc = C64::new(0.0, 0.0);
            for (a, xv) in row[lo + bw - i..hi + bw - i].iter().zip(&x[lo..hi]) {
                acc += a * xv;
            }
            out[i] = acc;
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check_same_dim(state.dim())?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_into(state.amplitudes(), &mut out);
        Ok(StateVector { amplitudes: out })
    }

    /// `⟨x|A|x⟩` over the leading `x.len()` levels, without normalization.
    pub(crate) fn sandwich(&self, x: &[C64]) -> C64 {
        let n = x.len().min(self.dim);
        let bw = self.bandwidth;
        let mut total = C64::new(0.0, 0.0);
        for i in 0..n {
            let row = self.row(i);
            let lo = i.saturating_sub(bw);
            let hi = (i + bw + 1).min(n);
            let mut acc = C64::new(0.0, 0.0);
            for (a, xv) in row[lo + bw - i..hi + bw - i].iter().zip(&x[lo..hi]) {
                acc += a * xv;
            }
            total += x[i].conj() * acc;
        }
        total
    }
}

/// Annihilation operator `a|n⟩ = √n |n−1⟩`.
pub fn build_ladder(dim: usize) -> Result<BandedOperator> {
    let mut a = BandedOperator::zeros(dim, 1)?;
    for n in 1..dim {
        a.set(n - 1, n, C64::new((n as f64).sqrt(), 0.0));
    }
    Ok(a)
}

/// Position, momentum and number operators.
#[derive(Clone, Debug)]
pub struct Quadratures {
    pub q: BandedOperator,
    pub p: BandedOperator,
    pub n: BandedOperator,
}

pub fn build_quadratures(dim: usize) -> Result<Quadratures> {
    let a = build_ladder(dim)?;
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = a.add_scaled(&ad, C64::new(1.0, 0.0))?.scale(C64::new(s, 0.0)).hermitize();
    let p = ad.add_scaled(&a, C64::new(-1.0, 0.0))?.scale(I * s).hermitize();
    let n = BandedOperator::diagonal(&(0..dim).map(|k| k as f64).collect::<Vec<_>>())?;
    Ok(Quadratures { q, p, n })
}

/// Static and driven parts of the Hamiltonian, `H(t) = h_static + cos(t)·h_drive`.
#[derive(Clone, Debug)]
pub struct HamiltonianParts {
    pub h_static: BandedOperator,
    pub h_drive: BandedOperator,
    /// Angular frequency of the drive (always 1).
    pub drive_frequency: f64,
}

impl HamiltonianParts {
    /// Materializes `H(t)`.
    pub fn at(&self, t: f64) -> BandedOperator {
        self.h_static
            .add_scaled(&self.h_drive, C64::new(t.cos(), 0.0))
            .expect("parts share a dimension")
    }
}

pub fn build_hamiltonian(params: &PhysicalParams, dim: usize) -> Result<HamiltonianParts> {
    params.validate()?;
    let Quadratures { q, p, .. } = build_quadratures(dim)?;
    let one = C64::new(1.0, 0.0);
    let p2 = p.mul(&p)?;
    let q2 = q.mul(&q)?;
    let h_static = if params.sho_mode {
        p2.scale((0.5).into()).add_scaled(&q2, (0.5).into())?
    } else {
        let q4 = q2.mul(&q2)?;
        let qp = q.mul(&p)?;
        let pq = p.mul(&q)?;
        let sym = qp.add_scaled(&pq, one)?;
        let b2 = params.beta * params.beta;
        p2.scale((0.5).into())
            .add_scaled(&q4, (b2 / 4.0).into())?
            .add_scaled(&q2, (-0.5).into())?
            .add_scaled(&sym, (params.gamma / 2.0).into())?
    };
    let h_drive = q.scale(params.drive_strength().into()).hermitize();
    Ok(HamiltonianParts {
        h_static: h_static.hermitize(),
        h_drive,
        drive_frequency: 1.0,
    })
}

/// Single damping channel `L = √(2Γ) a`.
pub fn build_lindblad(params: &PhysicalParams, dim: usize) -> Result<BandedOperator> {
    params.validate()?;
    Ok(build_ladder(dim)?.scale(C64::new((2.0 * params.gamma).sqrt(), 0.0)))
}

/// `⟨ψ|A|ψ⟩` for a normalized state. For hermitian operators the imaginary
/// part is checked to vanish and dropped.
pub fn expectation(state: &StateVector, op: &BandedOperator) -> Result<C64> {
    if state.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: state.dim(),
        });
    }
    let v = op.sandwich(state.amplitudes());
    if op.is_hermitian() {
        debug_assert!(v.im.abs() < 1e-9 * (1.0 + v.re.abs()), "hermitian expectation {v}");
        Ok(C64::new(v.re, 0.0))
    } else {
        Ok(v)
    }
}

/// Coherent state `|α⟩` truncated to `dim` levels and renormalized.
pub fn coherent_state(alpha: C64, dim: usize) -> Result<StateVector> {
    check_dim(dim)?;
    let r = alpha.norm();
    if r * r + 6.0 * r >= dim as f64 {
        return Err(Error::TruncationLeakage { alpha_abs: r, dim });
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
    if r == 0.0 {
        amplitudes[0] = C64::new(1.0, 0.0);
        return Ok(StateVector { amplitudes });
    }
    // log|c_n| = n ln r − ½ ln n!, shifted by its maximum to avoid overflow.
    let ln_r = r.ln();
    let mut log_mag = Vec::with_capacity(dim);
    let mut ln_fact = 0.0;
    for n in 0..dim {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        log_mag.push(n as f64 * ln_r - 0.5 * ln_fact);
    }
    let peak = log_mag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let phase = alpha.arg();
    for (n, (c, lm)) in amplitudes.iter_mut().zip(&log_mag).enumerate() {
        *c = C64::from_polar((lm - peak).exp(), n as f64 * phase);
    }
    let mut state = StateVector { amplitudes };
    state.normalize();
    Ok(state)
}
