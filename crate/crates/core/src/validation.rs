//! Oracle checks runnable on a built binary: trajectory ensembles against the
//! density matrix, the driven harmonic oscillator's closed form, counting
//! statistics and classical Lyapunov signs.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::classical::lyapunov_exponent;
use crate::error::Result;
use crate::fock::{build_quadratures, PhysicalParams, StateVector};
use crate::jumps::{derive_seed, evolve_ensemble, evolve_trajectory, JumpSolverConfig, TrajectoryRecord};
use crate::lindblad::{evolve_density, sho_steady_amplitude, sho_steady_photon_number, DensityMatrix};
use crate::ode::Tolerances;

/// Groups accepted by [`ValidationOptions::only`].
pub const GROUPS: [&str; 5] = ["unravelling", "sho-steady", "poisson", "rate-law", "lyapunov"];

#[derive(Clone, Debug)]
pub struct ValidationOptions {
    /// Restrict to these groups or check ids; `None` runs everything.
    pub only: Option<Vec<String>>,
    pub master_seed: u64,
    /// Multiplies the jump rate; anything but 1 is a deliberate fault.
    pub fault_rate_scale: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            only: None,
            master_seed: 20240601,
            fault_rate_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub group: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
    /// Set when the check could not run to completion.
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

fn check(id: &str, group: &str, passed: bool, measured: f64, threshold: f64, detail: String) -> CheckResult {
    CheckResult {
        id: id.into(),
        group: group.into(),
        passed,
        measured,
        threshold,
        detail,
        error: None,
    }
}

fn failed(id: &str, group: &str, err: &crate::Error) -> CheckResult {
    CheckResult {
        id: id.into(),
        group: group.into(),
        passed: false,
        measured: f64::NAN,
        threshold: f64::NAN,
        detail: String::new(),
        error: Some(err.to_string()),
    }
}

/// Kolmogorov–Smirnov distance of `samples` from Exp(1), with the asymptotic
/// p-value.
pub fn ks_exponential(samples: &[f64]) -> (f64, f64) {
    let mut u: Vec<f64> = samples.iter().map(|&w| 1.0 - (-w).exp()).collect();
    u.sort_by(|a, b| a.total_cmp(b));
    let n = u.len() as f64;
    let d = u
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
        p += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}

fn sho_record(opts: &ValidationOptions, index: u64, periods: f64) -> Result<TrajectoryRecord> {
    let params = PhysicalParams::sho(0.3);
    let cfg = JumpSolverConfig {
        t_transient: 20.0,
        t_record: periods,
        fault_rate_scale: opts.fault_rate_scale,
        ..Default::default()
    };
    evolve_trajectory(&params, &cfg, &StateVector::vacuum(256)?, derive_seed(opts.master_seed, index))
}

fn unravelling(opts: &ValidationOptions) -> Result<Vec<CheckResult>> {
    const DIM: usize = 30;
    const COUNT: usize = 200;
    const MIN_JUMPED: usize = 10;
    let params = PhysicalParams {
        beta: 1.0,
        gamma: 0.125,
        g: 0.3,
        sho_mode: false,
    };
    let cfg = JumpSolverConfig {
        t_transient: 0.0,
        t_record: 5.0,
        sample_interval: TAU / 16.0,
        // both sides share the same truncated generator
        leakage_bound: 1e-2,
        fault_rate_scale: opts.fault_rate_scale,
        ..Default::default()
    };
    let init = StateVector::vacuum(DIM)?;
    let ensemble: Vec<TrajectoryRecord> = evolve_ensemble(&params, &cfg, &init, derive_seed(opts.master_seed, 1), COUNT)
        .into_iter()
        .collect::<Result<_>>()?;
    let times: Vec<f64> = ensemble[0].sample_times.iter().map(|&t| t * TAU).collect();
    let rho0 = DensityMatrix::pure(&init);
    let rhos = evolve_density(&params, DIM, &rho0, &times, Tolerances { rel: 1e-10, abs: 1e-12 })?;
    let q = build_quadratures(DIM)?.q;

    // Before a handful of trajectories have jumped, every member sits on the
    // same no-jump branch and the sample standard error is degenerate.
    let first_jumps: Vec<f64> = ensemble
        .iter()
        .map(|r| r.jump_times.first().copied().unwrap_or(f64::INFINITY))
        .collect();
    let mut worst = 0.0_f64;
    let mut worst_t = 0.0;
    let mut skipped = 0;
    for (i, rho) in rhos.iter().enumerate() {
        let jumped = first_jumps.iter().filter(|&&t| t <= times[i]).count();
        if jumped < MIN_JUMPED {
            skipped += 1;
            continue;
        }
        let exact = rho.expectation(&q)?.re;
        let vals: Vec<f64> = ensemble.iter().map(|r| r.q_mean[i]).collect();
        let mean = vals.iter().sum::<f64>() / COUNT as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (COUNT as f64 - 1.0);
        let z = (mean - exact).abs() / (var / COUNT as f64).sqrt();
        if z > worst {
            worst = z;
            worst_t = times[i] / TAU;
        }
    }
    let compared = rhos.len() - skipped;
    Ok(vec![check(
        "unravelling-mean-q",
        "unravelling",
        worst <= 4.0 && compared * 2 > rhos.len(),
        worst,
        4.0,
        format!(
            "largest |ensemble − density| of <q> is {worst:.2} standard errors (t = {worst_t:.3} periods); \
             {compared} of {} samples compared, {skipped} early samples with fewer than {MIN_JUMPED} jumped trajectories skipped; \
             {COUNT} trajectories, dim {DIM}",
            rhos.len()
        ),
    )])
}

fn sho_steady(opts: &ValidationOptions) -> Result<Vec<CheckResult>> {
    let rec = sho_record(opts, 2, 200.0)?;
    let params = rec.params;
    let n_exact = sho_steady_photon_number(&params)?;
    let (a, b) = sho_steady_amplitude(&params)?;
    let s = rec.first_recorded_sample();

    let n_avg = rec.n_mean[s..].iter().sum::<f64>() / (rec.n_mean.len() - s) as f64;
    let n_err = (n_avg / n_exact - 1.0).abs();

    let amp = std::f64::consts::SQRT_2 * (a.norm() + b.norm());
    let q_err = rec.sample_times[s..]
        .iter()
        .zip(&rec.q_mean[s..])
        .map(|(&tp, &q)| {
            let t = tp * TAU;
            let alpha = a * C64::from_polar(1.0, -t) + b * C64::from_polar(1.0, t);
            (q - std::f64::consts::SQRT_2 * alpha.re).abs()
        })
        .fold(0.0, f64::max)
        / amp;

    let jumps = rec.recorded_jumps().len();
    let rate = jumps as f64 / rec.recorded_span();
    let expected = 2.0 * params.gamma * n_exact;
    let rate_err = (rate / expected - 1.0).abs();
    Ok(vec![
        check(
            "sho-steady-photon-number",
            "sho-steady",
            n_err <= 0.01,
            n_err,
            0.01,
            format!("period-averaged <n> = {n_avg:.4}, closed form {n_exact:.4}"),
        ),
        check(
            "sho-steady-amplitude",
            "sho-steady",
            q_err <= 1e-4,
            q_err,
            1e-4,
            format!("max |<q>(t) − √2 Re α(t)| relative to the orbit amplitude {amp:.3}"),
        ),
        check(
            "sho-steady-rate",
            "sho-steady",
            rate_err <= 0.05 && jumps >= 2000,
            rate_err,
            0.05,
            format!("{jumps} jumps, rate {rate:.4} against 2Γ<n> = {expected:.4}"),
        ),
    ])
}

/// Closed-form integrated rate `∫ 2Γ|α(s)|² ds` from 0 to `t`.
fn integrated_rate(params: &PhysicalParams, t: f64) -> Result<f64> {
    let (a, b) = sho_steady_amplitude(params)?;
    let c = a * b.conj();
    let osc = (C64::i() * c * C64::from_polar(1.0, -2.0 * t)).re;
    Ok(2.0 * params.gamma * ((a.norm_sqr() + b.norm_sqr()) * t + osc))
}

fn poisson(opts: &ValidationOptions) -> Result<Vec<CheckResult>> {
    let rec = sho_record(opts, 3, 100.0)?;
    let jumps = rec.recorded_jumps();
    let lambda: Vec<f64> = jumps
        .iter()
        .map(|&t| integrated_rate(&rec.params, t))
        .collect::<Result<_>>()?;
    let waits: Vec<f64> = lambda.windows(2).map(|w| w[1] - w[0]).collect();
    let (d, p) = ks_exponential(&waits);
    Ok(vec![check(
        "poisson-waiting-times",
        "poisson",
        p >= 0.01 && waits.len() >= 2000,
        p,
        0.01,
        format!("KS distance {d:.4} over {} rescaled waiting times", waits.len()),
    )])
}

fn rate_law(opts: &ValidationOptions) -> Result<Vec<CheckResult>> {
    let rec = sho_record(opts, 4, 100.0)?;
    let jumps = rec.recorded_jumps().len() as f64;
    let predicted = rec.mean_predicted_rate() * rec.recorded_span();
    let z = (jumps - predicted) / predicted.sqrt();
    Ok(vec![check(
        "rate-law",
        "rate-law",
        z.abs() <= 5.0,
        z,
        5.0,
        format!("{jumps} jumps against ∫2Γ<n>dt = {predicted:.1} (Poisson z-score)"),
    )])
}

fn lyapunov() -> Result<Vec<CheckResult>> {
    let cases: [(f64, f64, bool); 4] = [(0.3, 1024.0, true), (0.3, 2048.0, true), (0.1, 1024.0, false), (0.1, 2048.0, false)];
    let estimates: Vec<_> = cases
        .par_iter()
        .map(|&(g, per, _)| lyapunov_exponent(&PhysicalParams::duffing(g), 800.0 * TAU, TAU / per, (0.0, 0.0)))
        .collect::<Result<_>>()?;
    Ok(cases
        .iter()
        .zip(estimates)
        .map(|(&(g, per, positive), est)| {
            let ok = if positive { est.exponent > 0.0 } else { est.exponent <= 0.0 };
            check(
                &format!("lyapunov-g{g}-h{per}"),
                "lyapunov",
                ok,
                est.exponent,
                0.0,
                format!(
                    "g = {g}, step 2π/{per}: exponent {:.4}, expected {}",
                    est.exponent,
                    if positive { "> 0" } else { "≤ 0" }
                ),
            )
        })
        .collect())
}

fn selected(only: &Option<Vec<String>>, group: &str) -> bool {
    only.as_ref()
        .is_none_or(|list| list.iter().any(|o| o == group || o.starts_with(&format!("{group}-"))))
}

/// Runs the selected checks. Failures inside a check are reported in its
/// entry; only an unknown `only` name is an error.
pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    if let Some(list) = &opts.only {
        for name in list {
            if !GROUPS.iter().any(|g| name == g || name.starts_with(&format!("{g}-"))) {
                return Err(crate::Error::UnknownCheck(name.clone()));
            }
        }
    }
    let mut checks = Vec::new();
    let suites: [(&str, &dyn Fn() -> Result<Vec<CheckResult>>); 5] = [
        ("unravelling", &|| unravelling(opts)),
        ("sho-steady", &|| sho_steady(opts)),
        ("poisson", &|| poisson(opts)),
        ("rate-law", &|| rate_law(opts)),
        ("lyapunov", &lyapunov),
    ];
    for (group, run) in suites {
        if !selected(&opts.only, group) {
            continue;
        }
        match run() {
            Ok(mut list) => {
                if let Some(ids) = &opts.only {
                    // a specific id narrows the group to that check
                    if !ids.iter().any(|o| o == group) {
                        list.retain(|c| ids.contains(&c.id));
                    }
                }
                checks.extend(list)
            }
            Err(e) => checks.push(failed(group, group, &e)),
        }
    }
    let all_passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
    Ok(ValidationReport { checks, all_passed })
}
