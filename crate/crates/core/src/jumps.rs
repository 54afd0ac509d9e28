//! Quantum-jump (photon counting) unravelling of the master equation.
//!
//! Trajectories use the waiting-time formulation: draw `r ~ U(0,1)`, evolve
//! the unnormalized state under `H_eff = H(t) − (i/2)L†L` until its squared
//! norm decays to `r`, apply `ψ → Lψ/‖Lψ‖`, record the detection time and
//! redraw. Between jumps the working state is renormalized after every step
//! and the running log-norm is carried separately.
//!
//! Two optimizations leave the dynamics untouched:
//!
//! * a scalar energy shift `c ≈ ⟨H(t)⟩`, re-estimated every step, is removed
//!   from the generator. It only changes the global phase of the state,
//!   which no observable sees, but keeps the Fock amplitudes slowly varying.
//! * the propagation acts on a leading window `|0⟩ … |active−1⟩` of the basis
//!   that grows (and shrinks) with the support of the state, so the step
//!   size is not limited by the stiff, unoccupied top of the basis.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    build_hamiltonian, build_lindblad, build_quadratures, norm_sqr, tail_population, BandedOperator,
    HamiltonianParts, PhysicalParams, StateVector,
};
use crate::ode::{self, Rk4Stepper, Tolerances};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Edge band whose population triggers growth of the active window.
const WINDOW_GUARD: usize = 8;
const WINDOW_CHUNK: usize = 16;
const WINDOW_MIN: usize = 32;
/// Shrinking requires the outer levels to be this many times emptier than
/// the growth trigger, so the window does not flap.
const WINDOW_HYSTERESIS: f64 = 1e-6;

/// Below this `⟨L†L⟩` a state counts as dark.
const DARK_RATE: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JumpSolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Tolerance on the squared norm when locating a jump.
    pub norm_bisect_tol: f64,
    /// Spacing of the expectation-value samples (time units).
    pub sample_interval: f64,
    /// Discarded lead-in, in drive periods.
    pub t_transient: f64,
    /// Recorded span after the transient, in drive periods.
    pub t_record: f64,
    pub max_step: f64,
    /// Maximum tolerated population of the top 5% of Fock levels.
    pub leakage_bound: f64,
    /// Propagate only the occupied leading part of the basis.
    pub adaptive_window: bool,
    /// Stop early once this many jumps have been recorded.
    pub max_jumps: Option<usize>,
    /// Debug knob: scales the jump rate by drawing thresholds `r^(1/scale)`.
    /// Only for exercising the validation suite; keep at 1.
    pub fault_rate_scale: f64,
}

impl Default for JumpSolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            norm_bisect_tol: 1e-10,
            sample_interval: TAU / 64.0,
            t_transient: 50.0,
            t_record: 500.0,
            max_step: 0.1,
            leakage_bound: 1e-6,
            adaptive_window: true,
            max_jumps: None,
            fault_rate_scale: 1.0,
        }
    }
}

impl JumpSolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("norm_bisect_tol", self.norm_bisect_tol),
            ("sample_interval", self.sample_interval),
            ("max_step", self.max_step),
            ("leakage_bound", self.leakage_bound),
            ("fault_rate_scale", self.fault_rate_scale),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be positive",
                });
            }
        }
        let per_period = TAU / self.sample_interval;
        if (per_period - per_period.round()).abs() > 1e-9 * per_period {
            return Err(Error::InvalidParameter {
                name: "sample_interval",
                value: self.sample_interval,
                reason: "must divide the drive period 2π",
            });
        }
        for (name, value) in [("t_transient", self.t_transient), ("t_record", self.t_record)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be non-negative",
                });
            }
        }
        Ok(())
    }

    pub fn samples_per_period(&self) -> usize {
        (TAU / self.sample_interval).round() as usize
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel: self.rel_tol,
            abs: self.abs_tol,
        }
    }
}

/// Output of one unravelling realisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    /// Sample times in drive periods.
    pub sample_times: Vec<f64>,
    pub q_mean: Vec<f64>,
    pub p_mean: Vec<f64>,
    pub n_mean: Vec<f64>,
    /// Detection times (absolute time units), strictly increasing.
    pub jump_times: Vec<f64>,
    pub leakage_max: f64,
    /// Largest `|‖ψ‖² − 1|` over all samples.
    pub norm_error_max: f64,
    pub seed: u64,
    pub params: PhysicalParams,
    pub dim: usize,
    /// Samples before this time (drive periods) belong to the transient.
    pub transient_periods: f64,
    /// Absolute time at which the integration stopped.
    pub end_time: f64,
    /// Sample spacing in time units.
    pub sample_interval: f64,
    #[serde(default)]
    pub stats: SolverStats,
}

/// Work counters of one trajectory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    /// Extra single-step integrations spent locating jumps.
    pub root_steps: u64,
    /// Sum over accepted steps of the active window size.
    pub window_levels: u64,
    pub max_window: usize,
}

impl SolverStats {
    pub fn mean_window(&self) -> f64 {
        self.window_levels as f64 / self.accepted_steps.max(1) as f64
    }
}

impl TrajectoryRecord {
    /// Index of the first post-transient sample.
    pub fn first_recorded_sample(&self) -> usize {
        self.sample_times
            .partition_point(|&t| t < self.transient_periods - 1e-9)
    }

    /// Jump times after the transient.
    pub fn recorded_jumps(&self) -> &[f64] {
        let t0 = self.transient_periods * TAU;
        let start = self.jump_times.partition_point(|&t| t < t0);
        &self.jump_times[start..]
    }

    /// Post-transient time span covered by samples (time units).
    pub fn recorded_span(&self) -> f64 {
        self.end_time - self.transient_periods * TAU
    }

    /// Time average of `2Γ⟨n⟩` over the recorded samples.
    pub fn mean_predicted_rate(&self) -> f64 {
        let s = self.first_recorded_sample();
        let n = &self.n_mean[s..];
        if n.is_empty() {
            return 0.0;
        }
        2.0 * self.params.gamma * n.iter().sum::<f64>() / n.len() as f64
    }

    /// Post-transient `(⟨q⟩, ⟨p⟩)` pairs.
    pub fn phase_portrait(&self) -> Vec<(f64, f64)> {
        let s = self.first_recorded_sample();
        self.q_mean[s..]
            .iter()
            .zip(&self.p_mean[s..])
            .map(|(&q, &p)| (q, p))
            .collect()
    }
}

/// Mixes a master seed and a trajectory index into an independent seed, so
/// ensembles are reproducible regardless of scheduling order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(master ^ splitmix(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// `dψ̃/dt = [−iH(t) − ½L†L] ψ̃` for the unnormalized state.
pub fn effective_drift(
    state: &StateVector,
    t: f64,
    parts: &HamiltonianParts,
    lindblad: &BandedOperator,
) -> Result<StateVector> {
    let dim = state.dim();
    for d in [parts.h_static.dim(), parts.h_drive.dim(), lindblad.dim()] {
        if d != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: d,
            });
        }
    }
    let kernel = DriftKernel::new(parts, lindblad)?;
    let mut out = vec![C64::new(0.0, 0.0); dim];
    kernel.apply(t, 0.0, state.amplitudes(), &mut out);
    StateVector::from_amplitudes(out)
}

/// `ψ → Lψ / ‖Lψ‖`.
pub fn apply_jump(state: &StateVector, lindblad: &BandedOperator) -> Result<StateVector> {
    let mut out = lindblad.apply(state)?;
    let rate = out.norm_sqr() / state.norm_sqr();
    if !(rate >= DARK_RATE) {
        return Err(Error::DarkStateJump { rate });
    }
    out.normalize();
    Ok(out)
}

/// Generator `K + cos(t)·D` with `K = −i h_static − ½ L†L` and
/// `D = −i h_drive`, applied on a leading window of the basis.
///
/// `D` is tridiagonal with a zero diagonal (it is proportional to `q`), so
/// only its two off-diagonals are kept.
struct DriftKernel {
    k: BandedOperator,
    d_lower: Vec<C64>,
    d_upper: Vec<C64>,
}

impl DriftKernel {
    fn new(parts: &HamiltonianParts, lindblad: &BandedOperator) -> Result<Self> {
        let ldl = lindblad.adjoint().mul(lindblad)?;
        let k = parts.h_static.scale(-I).add_scaled(&ldl, C64::new(-0.5, 0.0))?;
        let d = parts.h_drive.scale(-I);
        let dim = k.dim();
        let zero = C64::new(0.0, 0.0);
        debug_assert!((0..dim).all(|i| d.get(i, i) == zero) && d.bandwidth() <= 1);
        let d_lower = (0..dim).map(|i| if i > 0 { d.get(i, i - 1) } else { zero }).collect();
        let d_upper = (0..dim).map(|i| if i + 1 < dim { d.get(i, i + 1) } else { zero }).collect();
        Ok(Self { k, d_lower, d_upper })
    }

    /// `y = (K + cos t · D + i·shift) x` over `x.len()` levels.
    #[inline]
    fn apply(&self, t: f64, shift: f64, x: &[C64], y: &mut [C64]) {
        match self.k.bandwidth() {
            4 => self.apply_banded::<4, 9>(t, shift, x, y),
            2 => self.apply_banded::<2, 5>(t, shift, x, y),
            _ => self.apply_general(t, shift, x, y),
        }
    }

    #[inline]
    fn drive_and_shift(&self, i: usize, n: usize, c: f64, shift: f64, x: &[C64]) -> C64 {
        let mut acc = C64::new(-shift * x[i].im, shift * x[i].re);
        if i > 0 {
            acc += self.d_lower[i] * x[i - 1] * c;
        }
        if i + 1 < n {
            acc += self.d_upper[i] * x[i + 1] * c;
        }
        acc
    }

    fn row_general(&self, i: usize, x: &[C64]) -> C64 {
        let n = x.len();
        let kb = self.k.bandwidth();
        let lo = i.saturating_sub(kb);
        let hi = (i + kb + 1).min(n);
        let row = &self.k.row(i)[lo + kb - i..hi + kb - i];
        row.iter().zip(&x[lo..hi]).map(|(a, b)| a * b).sum()
    }

    fn apply_general(&self, t: f64, shift: f64, x: &[C64], y: &mut [C64]) {
        let (c, n) = (t.cos(), x.len());
        for i in 0..n {
            y[i] = self.row_general(i, x) + self.drive_and_shift(i, n, c, shift, x);
        }
    }

    fn apply_banded<const KB: usize, const W: usize>(&self, t: f64, shift: f64, x: &[C64], y: &mut [C64]) {
        let (c, n) = (t.cos(), x.len());
        if n < 2 * KB + 2 {
            return self.apply_general(t, shift, x, y);
        }
        for i in (0..KB).chain(n - KB..n) {
            y[i] = self.row_general(i, x) + self.drive_and_shift(i, n, c, shift, x);
        }
        for i in KB..n - KB {
            let row: &[C64; W] = self.k.row(i).try_into().expect("row width");
            let xs: &[C64; W] = x[i - KB..i + KB + 1].try_into().expect("window width");
            let (mut re, mut im) = (0.0, 0.0);
            for j in 0..W {
                re += row[j].re * xs[j].re - row[j].im * xs[j].im;
                im += row[j].re * xs[j].im + row[j].im * xs[j].re;
            }
            let (xm, x0, xp) = (xs[KB - 1], xs[KB], xs[KB + 1]);
            let (dl, du) = (self.d_lower[i], self.d_upper[i]);
            re += c * (dl.re * xm.re - dl.im * xm.im + du.re * xp.re - du.im * xp.im) - shift * x0.im;
            im += c * (dl.re * xm.im + dl.im * xm.re + du.re * xp.im + du.im * xp.re) + shift * x0.re;
            y[i] = C64::new(re, im);
        }
    }
}

/// Observables sampled along a trajectory.
struct Observables {
    q: BandedOperator,
    p: BandedOperator,
    n: BandedOperator,
}

struct Window {
    enabled: bool,
    dim: usize,
    /// Guard-band population that triggers growth, tied to the squared
    /// relative tolerance so integration noise in sparsely occupied levels
    /// does not drag the window open.
    grow: f64,
    shrink: f64,
}

impl Window {
    fn initial(&self, amps: &[C64]) -> usize {
        if !self.enabled {
            return self.dim;
        }
        let top = amps
            .iter()
            .rposition(|c| c.norm_sqr() > self.shrink)
            .unwrap_or(0);
        (top + 1 + WINDOW_CHUNK + WINDOW_GUARD).max(WINDOW_MIN).min(self.dim)
    }

    /// Adjusts `active` after a step; amplitudes beyond the window are zero.
    fn update(&self, amps: &mut [C64], active: usize) -> usize {
        if !self.enabled {
            return active;
        }
        let mut active = active;
        while active < self.dim && norm_sqr(&amps[active - WINDOW_GUARD..active]) > self.grow {
            active = (active + WINDOW_CHUNK).min(self.dim);
        }
        while active >= WINDOW_MIN + WINDOW_CHUNK
            && norm_sqr(&amps[active - WINDOW_CHUNK - WINDOW_GUARD..active]) < self.shrink
        {
            amps[active - WINDOW_CHUNK..active]
                .iter_mut()
                .for_each(|c| *c = C64::new(0.0, 0.0));
            active -= WINDOW_CHUNK;
        }
        active
    }
}

fn draw_threshold(rng: &mut ChaCha8Rng, fault_scale: f64) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u.ln() / fault_scale;
        }
    }
}

/// Integrates one quantum-jump trajectory from `init`.
pub fn evolve_trajectory(
    params: &PhysicalParams,
    cfg: &JumpSolverConfig,
    init: &StateVector,
    seed: u64,
) -> Result<TrajectoryRecord> {
    params.validate()?;
    cfg.validate()?;
    if !init.is_normalized() {
        return Err(Error::InvalidParameter {
            name: "init",
            value: init.norm_sqr(),
            reason: "initial state must be normalized",
        });
    }
    let dim = init.dim();
    let parts = build_hamiltonian(params, dim)?;
    let lindblad = build_lindblad(params, dim)?;
    let kernel = DriftKernel::new(&parts, &lindblad)?;
    let quad = build_quadratures(dim)?;
    let obs = Observables {
        q: quad.q,
        p: quad.p,
        n: quad.n,
    };
    let grow = cfg.rel_tol * cfg.rel_tol;
    let window = Window {
        enabled: cfg.adaptive_window,
        dim,
        grow,
        shrink: grow * WINDOW_HYSTERESIS,
    };
    let tol = cfg.tolerances();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let samples_per_period = cfg.samples_per_period();
    let total_samples =
        ((cfg.t_transient + cfg.t_record) * samples_per_period as f64).round() as usize;
    let t_end = total_samples as f64 * cfg.sample_interval;
    let sample_time = |k: usize| k as f64 * cfg.sample_interval;

    let mut rec = TrajectoryRecord {
        sample_times: Vec::with_capacity(total_samples + 1),
        q_mean: Vec::with_capacity(total_samples + 1),
        p_mean: Vec::with_capacity(total_samples + 1),
        n_mean: Vec::with_capacity(total_samples + 1),
        jump_times: Vec::new(),
        leakage_max: 0.0,
        norm_error_max: 0.0,
        seed,
        params: *params,
        dim,
        transient_periods: cfg.t_transient,
        end_time: 0.0,
        sample_interval: cfg.sample_interval,
        stats: SolverStats::default(),
    };

    let mut y = init.amplitudes().to_vec();
    let mut y_new = vec![C64::new(0.0, 0.0); dim];
    let mut y_trial = vec![C64::new(0.0, 0.0); dim];
    let mut stepper = Rk4Stepper::new(dim);
    let mut active = window.initial(&y);

    let record_sample = |rec: &mut TrajectoryRecord, k: usize, y: &[C64]| -> Result<()> {
        let t = sample_time(k);
        let leak = tail_population(y, dim);
        rec.leakage_max = rec.leakage_max.max(leak);
        if leak > cfg.leakage_bound {
            return Err(Error::TrajectoryInvalid {
                time: t,
                population: leak,
                bound: cfg.leakage_bound,
            });
        }
        rec.norm_error_max = rec.norm_error_max.max((norm_sqr(y) - 1.0).abs());
        rec.sample_times.push(k as f64 / samples_per_period as f64);
        rec.q_mean.push(obs.q.sandwich(y).re);
        rec.p_mean.push(obs.p.sandwich(y).re);
        rec.n_mean.push(obs.n.sandwich(y).re.max(0.0));
        Ok(())
    };
    record_sample(&mut rec, 0, &y[..active])?;

    let mut t = 0.0;
    let mut next_sample = 1usize;
    let mut log_norm = 0.0;
    let mut threshold = draw_threshold(&mut rng, cfg.fault_rate_scale);
    let mut shift = 0.0;
    let mut h = {
        let mut rhs = |tt: f64, x: &[C64], dx: &mut [C64]| kernel.apply(tt, 0.0, x, dx);
        ode::initial_step(&mut rhs, 0.0, &y[..active], tol, cfg.max_step).max(1e-6)
    };
    let mut k1_state = FirstStage::Stale;
    let mut control = ode::StepController::default();

    while next_sample <= total_samples {
        if cfg.max_jumps.is_some_and(|m| rec.jump_times.len() >= m) {
            break;
        }
        let target = sample_time(next_sample);
        let n = active;

        if k1_state != FirstStage::Ready {
            if let FirstStage::Reusable(scale) = k1_state {
                stepper.reuse_last_slope();
                stepper.k1_mut(n).iter_mut().for_each(|c| *c *= scale);
            } else {
                kernel.apply(t, shift, &y[..n], stepper.k1_mut(n));
            }
            // re-centre the generator on the current mean energy
            let k1 = stepper.k1_mut(n);
            let overlap: C64 = y[..n].iter().zip(k1.iter()).map(|(a, b)| a.conj() * b).sum();
            let delta = -overlap.im;
            shift += delta;
            let id = C64::new(0.0, delta);
            for (k, yv) in k1.iter_mut().zip(&y[..n]) {
                *k += id * yv;
            }
            k1_state = FirstStage::Ready;
        }
        let mut rhs = |tt: f64, x: &[C64], dx: &mut [C64]| kernel.apply(tt, shift, x, dx);

        let mut h_try = h.min(cfg.max_step);
        let clipped = t + h_try >= target;
        if clipped {
            h_try = target - t;
        }
        let err = stepper.step_with_k1(&mut rhs, t, &y[..n], h_try, &mut y_new[..n], tol);
        if !(err <= 1.0) {
            h = control.rejected(h_try, err);
            rec.stats.rejected_steps += 1;
            if h < 1e-12 {
                return Err(Error::StepUnderflow { time: t, step: h });
            }
            continue;
        }
        k1_state = FirstStage::Stale;
        rec.stats.accepted_steps += 1;
        rec.stats.window_levels += n as u64;
        rec.stats.max_window = rec.stats.max_window.max(n);

        let n2 = norm_sqr(&y_new[..n]);
        let end_log = log_norm + n2.ln();
        if end_log <= threshold {
            // Locate the crossing by bracketed regula falsi (Illinois) on
            // the log-norm, re-integrating from the accepted state.
            let r = threshold.exp();
            let (mut a, mut fa) = (0.0, log_norm - threshold);
            let (mut b, mut fb) = (h_try, end_log - threshold);
            let mut hit = h_try;
            y_trial[..n].copy_from_slice(&y_new[..n]);
            if (end_log.exp() - r).abs() > cfg.norm_bisect_tol {
                let mut side = 0i8;
                for _ in 0..200 {
                    let mut m = (a * fb - b * fa) / (fb - fa);
                    if !(m > a && m < b) {
                        m = 0.5 * (a + b);
                    }
                    stepper.step_with_k1(&mut rhs, t, &y[..n], m, &mut y_trial[..n], tol);
                    rec.stats.root_steps += 1;
                    let lm = log_norm + norm_sqr(&y_trial[..n]).ln();
                    let fm = lm - threshold;
                    hit = m;
                    if (lm.exp() - r).abs() <= cfg.norm_bisect_tol || b - a <= 1e-15 * (1.0 + t) {
                        break;
                    }
                    if fm > 0.0 {
                        a = m;
                        fa = fm;
                        if side == 1 {
                            fb *= 0.5;
                        }
                        side = 1;
                    } else {
                        b = m;
                        fb = fm;
                        if side == -1 {
                            fa *= 0.5;
                        }
                        side = -1;
                    }
                }
            }
            let mut t_jump = t + hit;
            if let Some(&last) = rec.jump_times.last() {
                if t_jump <= last {
                    t_jump = last.next_up();
                }
            }
            // Normalized pre-jump state; jump with a (the √(2Γ) cancels).
            let pre = &mut y_trial[..n];
            let s = 1.0 / norm_sqr(pre).sqrt();
            pre.iter_mut().for_each(|c| *c *= s);
            let rate = 2.0 * params.gamma * jump_in_place(pre, &mut y[..n]);
            if rate < DARK_RATE {
                return Err(Error::DarkStateJump { rate });
            }
            rec.jump_times.push(t_jump);
            t = t_jump;
            log_norm = 0.0;
            threshold = draw_threshold(&mut rng, cfg.fault_rate_scale);
        } else {
            let s = 1.0 / n2.sqrt();
            for (dst, src) in y[..n].iter_mut().zip(&y_new[..n]) {
                *dst = src * s;
            }
            log_norm = end_log;
            k1_state = FirstStage::Reusable(s);
            if clipped {
                t = target;
            } else {
                t += h_try;
                h = control.accepted(h_try, err);
            }
        }
        let resized = window.update(&mut y, active);
        if resized != active {
            active = resized;
            k1_state = FirstStage::Stale;
        }

        if t >= target {
            record_sample(&mut rec, next_sample, &y[..active])?;
            next_sample += 1;
        }
    }
    rec.end_time = t.min(t_end);
    Ok(rec)
}

/// Status of the stepper's first-stage slope relative to the current state.
#[derive(Clone, Copy, Debug, PartialEq)]
enum FirstStage {
    Stale,
    Ready,
    /// The last stage of the accepted step, before renormalizing by the factor.
    Reusable(f64),
}

/// Writes `a·pre / ‖a·pre‖` into `out` and returns `⟨n⟩` of `pre`.
fn jump_in_place(pre: &[C64], out: &mut [C64]) -> f64 {
    let n = pre.len();
    let mut total = 0.0;
    for k in 0..n - 1 {
        out[k] = pre[k + 1] * ((k + 1) as f64).sqrt();
        total += out[k].norm_sqr();
    }
    out[n - 1] = C64::new(0.0, 0.0);
    if total > 0.0 {
        let s = 1.0 / total.sqrt();
        out.iter_mut().for_each(|c| *c *= s);
    }
    total
}

/// Runs `count` independent trajectories in parallel, seeded by
/// [`derive_seed`]`(master_seed, index)`; results are ordered by index.
pub fn evolve_ensemble(
    params: &PhysicalParams,
    cfg: &JumpSolverConfig,
    init: &StateVector,
    master_seed: u64,
    count: usize,
) -> Vec<Result<TrajectoryRecord>> {
    (0..count)
        .into_par_iter()
        .map(|i| evolve_trajectory(params, cfg, init, derive_seed(master_seed, i as u64)))
        .collect()
}
