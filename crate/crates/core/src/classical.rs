//! Classical limit of the oscillator in the scaled coordinate `u = βq`:
//!
//! `u' = v`, `v' = u − u³ − 2Γv − g cos t (+ noise)`.
//!
//! The cross term `Γ(qp + pq)/2` shifts `q' = p + Γq` while the damping of
//! the master equation pulls both quadratures in at rate `Γ`. Together they
//! leave `u'' + 2Γu' + u³ − u + g cos t = 0`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::fock::PhysicalParams;

/// Noise amplitude at which the `u` spectrum's median over drive-frequency
/// multiples 4 to 8 matches `β²` times the quantum `⟨q⟩` spectrum at
/// g = 0.3, β = 0.1, Γ = 0.125 (3.3e-4 in both).
pub const DEFAULT_NOISE_AMP: f64 = 0.95;

/// Time stepping and sampling of the classical integrators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassicalConfig {
    /// Fixed integration step.
    pub step: f64,
    /// Spacing of the recorded samples; a whole number of steps.
    pub sample_interval: f64,
    /// Discarded lead-in, in drive periods.
    pub t_transient: f64,
    /// Recorded span after the transient, in drive periods.
    pub t_record: f64,
    /// Initial `(u, v)`.
    pub initial: (f64, f64),
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self {
            step: TAU / 1024.0,
            sample_interval: TAU / 64.0,
            t_transient: 50.0,
            t_record: 500.0,
            initial: (0.0, 0.0),
        }
    }
}

impl ClassicalConfig {
    fn steps_per_sample(&self) -> Result<usize> {
        let ratio = self.sample_interval / self.step;
        let k = ratio.round();
        if !(self.step > 0.0) || k < 1.0 || (ratio - k).abs() > 1e-9 * ratio {
            return Err(Error::InvalidParameter {
                name: "step",
                value: self.step,
                reason: "must be positive and divide the sample interval",
            });
        }
        Ok(k as usize)
    }
}

/// One sampled realisation of the noisy classical oscillator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTrajectory {
    /// In drive periods.
    pub sample_times: Vec<f64>,
    /// Scaled position `u = βq`.
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub params: PhysicalParams,
    pub noise_amp: f64,
    pub seed: u64,
    pub transient_periods: f64,
    pub sample_interval: f64,
}

impl ClassicalTrajectory {
    pub fn first_recorded_sample(&self) -> usize {
        self.sample_times.partition_point(|&t| t < self.transient_periods - 1e-9)
    }
}

#[inline]
fn drift(p: &PhysicalParams, t: f64, u: f64, v: f64) -> (f64, f64) {
    (v, u - u * u * u - 2.0 * p.gamma * v - p.g * t.cos())
}

/// One classical RK4 step of the noise-free flow; `h` may be negative.
pub fn rk4_step(p: &PhysicalParams, t: f64, (u, v): (f64, f64), h: f64) -> (f64, f64) {
    let (a1, b1) = drift(p, t, u, v);
    let (a2, b2) = drift(p, t + 0.5 * h, u + 0.5 * h * a1, v + 0.5 * h * b1);
    let (a3, b3) = drift(p, t + 0.5 * h, u + 0.5 * h * a2, v + 0.5 * h * b2);
    let (a4, b4) = drift(p, t + h, u + h * a3, v + h * b3);
    (
        u + h / 6.0 * (a1 + 2.0 * (a2 + a3) + a4),
        v + h / 6.0 * (b1 + 2.0 * (b2 + b3) + b4),
    )
}

/// Noise-free flow from `t0` to `t1` (either direction) in steps of at most
/// `step`.
pub fn integrate_deterministic(p: &PhysicalParams, state: (f64, f64), t0: f64, t1: f64, step: f64) -> (f64, f64) {
    let n = ((t1 - t0).abs() / step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    let mut s = state;
    for k in 0..n {
        s = rk4_step(p, t0 + k as f64 * h, s, h);
    }
    s
}

/// `v²/2 + u⁴/4 − u²/2`.
pub fn energy(u: f64, v: f64) -> f64 {
    0.5 * v * v + 0.25 * u.powi(4) - 0.5 * u * u
}

/// Integrates the noisy oscillator with white force noise of strength
/// `noise_amp` (`dv += noise_amp·dW`).
///
/// The drift is advanced with an RK4 step and the Wiener increment added
/// afterwards. For additive noise this keeps strong order one, and the
/// noise-free limit is the accurate, nearly reversible RK4 flow.
pub fn integrate_langevin(
    params: &PhysicalParams,
    noise_amp: f64,
    cfg: &ClassicalConfig,
    seed: u64,
) -> Result<ClassicalTrajectory> {
    params.validate()?;
    if !(noise_amp >= 0.0 && noise_amp.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "noise_amp",
            value: noise_amp,
            reason: "must be non-negative",
        });
    }
    let per_sample = cfg.steps_per_sample()?;
    let samples_per_period = (TAU / cfg.sample_interval).round();
    let total = ((cfg.t_transient + cfg.t_record) * samples_per_period).round() as usize;
    let h = cfg.step;
    let kick = noise_amp * h.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut traj = ClassicalTrajectory {
        sample_times: Vec::with_capacity(total + 1),
        x: Vec::with_capacity(total + 1),
        v: Vec::with_capacity(total + 1),
        params: *params,
        noise_amp,
        seed,
        transient_periods: cfg.t_transient,
        sample_interval: cfg.sample_interval,
    };
    let mut s = cfg.initial;
    traj.sample_times.push(0.0);
    traj.x.push(s.0);
    traj.v.push(s.1);
    for k in 0..total {
        let t0 = k as f64 * cfg.sample_interval;
        for j in 0..per_sample {
            let t = t0 + j as f64 * h;
            s = rk4_step(params, t, s, h);
            if kick > 0.0 {
                let w: f64 = StandardNormal.sample(&mut rng);
                s.1 += kick * w;
            }
        }
        if !(s.0.is_finite() && s.1.is_finite()) {
            return Err(Error::Divergence {
                time: (k + 1) as f64 * cfg.sample_interval,
            });
        }
        traj.sample_times.push((k + 1) as f64 / samples_per_period);
        traj.x.push(s.0);
        traj.v.push(s.1);
    }
    Ok(traj)
}

/// Largest Lyapunov exponent and its convergence diagnostic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// Per unit time.
    pub exponent: f64,
    /// False when the running estimate over the second half of the run
    /// wandered by more than 10% of its final value.
    pub converged: bool,
    /// Running estimate after each averaged drive period.
    pub running: Vec<f64>,
}

/// Benettin estimate of the largest Lyapunov exponent of the noise-free
/// flow, renormalizing the tangent vector once per drive period. The first
/// fifth of `t_total` is discarded as transient.
pub fn lyapunov_exponent(params: &PhysicalParams, t_total: f64, step: f64, initial: (f64, f64)) -> Result<LyapunovEstimate> {
    params.validate()?;
    let periods = (t_total / TAU).floor() as usize;
    if periods < 10 || !(step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_total",
            value: t_total,
            reason: "need at least ten drive periods and a positive step",
        });
    }
    let per_period = (TAU / step).round().max(1.0) as usize;
    let h = TAU / per_period as f64;
    let skip = periods / 5;
    let gamma2 = 2.0 * params.gamma;

    // state (u, v) and tangent (du, dv)
    let mut s = initial;
    let mut d = (1.0, 0.0);
    let tangent = |u: f64, (du, dv): (f64, f64)| (dv, (1.0 - 3.0 * u * u) * du - gamma2 * dv);
    let mut log_sum = 0.0;
    let mut running = Vec::with_capacity(periods - skip);
    for period in 0..periods {
        for j in 0..per_period {
            let t = (period * per_period + j) as f64 * h;
            // RK4 on the joint system; the tangent stages use the matching
            // base-trajectory stages
            let (u, v) = s;
            let (a1, b1) = drift(params, t, u, v);
            let k1 = tangent(u, d);
            let s2 = (u + 0.5 * h * a1, v + 0.5 * h * b1);
            let d2 = (d.0 + 0.5 * h * k1.0, d.1 + 0.5 * h * k1.1);
            let (a2, b2) = drift(params, t + 0.5 * h, s2.0, s2.1);
            let k2 = tangent(s2.0, d2);
            let s3 = (u + 0.5 * h * a2, v + 0.5 * h * b2);
            let d3 = (d.0 + 0.5 * h * k2.0, d.1 + 0.5 * h * k2.1);
            let (a3, b3) = drift(params, t + 0.5 * h, s3.0, s3.1);
            let k3 = tangent(s3.0, d3);
            let s4 = (u + h * a3, v + h * b3);
            let d4 = (d.0 + h * k3.0, d.1 + h * k3.1);
            let (a4, b4) = drift(params, t + h, s4.0, s4.1);
            let k4 = tangent(s4.0, d4);
            s = (
                u + h / 6.0 * (a1 + 2.0 * (a2 + a3) + a4),
                v + h / 6.0 * (b1 + 2.0 * (b2 + b3) + b4),
            );
            d = (
                d.0 + h / 6.0 * (k1.0 + 2.0 * (k2.0 + k3.0) + k4.0),
                d.1 + h / 6.0 * (k1.1 + 2.0 * (k2.1 + k3.1) + k4.1),
            );
        }
        if !(s.0.is_finite() && s.1.is_finite()) {
            return Err(Error::Divergence {
                time: (period + 1) as f64 * TAU,
            });
        }
        let norm = d.0.hypot(d.1);
        d = (d.0 / norm, d.1 / norm);
        if period >= skip {
            log_sum += norm.ln();
            running.push(log_sum / ((period + 1 - skip) as f64 * TAU));
        }
    }
    let exponent = *running.last().expect("at least one averaged period");
    let tail = &running[running.len() / 2..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let converged = hi - lo <= 0.1 * exponent.abs();
    Ok(LyapunovEstimate {
        exponent,
        converged,
        running,
    })
}
