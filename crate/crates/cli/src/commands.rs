use anyhow::{Context, Result};
use serde::Serialize;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use qtraj_core::experiments::{self, CheckStatus};
use qtraj_core::spectra::{bin_jump_increments, welch_psd, Peak};
use qtraj_core::validation::{run_validation, ValidationOptions};
use qtraj_core::{classical, io, jumps, PhysicalParams, StateVector};

use crate::config::{FileConfig, Settings};
use crate::manifest::RunManifest;
use crate::{plots, CheckFailed, Command, Common, Usage};

/// Highest frequency shown in spectrum figures.
const PLOT_MAX_FREQ: f64 = 6.0;

fn settings(common: &Common, fill: impl FnOnce(&mut FileConfig)) -> Result<Settings> {
    let file = match &common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut flags = FileConfig::default();
    common.apply(&mut flags);
    fill(&mut flags);
    Settings::resolve(&file, &flags)
}

/// Runs `body` with a manifest that is written whether or not it succeeds.
fn with_manifest(
    command: &str,
    s: &Settings,
    common: &Common,
    body: impl FnOnce(&Settings, &mut RunManifest) -> Result<()> + Send,
) -> Result<()> {
    let mut m = RunManifest::new(command);
    m.master_seed = Some(s.seed);
    m.seed_source = Some(s.seed_source);
    m.config = serde_json::to_value(s)?;
    m.inputs.extend(common.config.clone());
    if s.seed_source == "random" {
        eprintln!("no --seed given; using {}", s.seed);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(s.jobs).build()?;
    let result = pool.install(|| body(s, &mut m));
    if let Err(e) = &result {
        m.error = Some(format!("{e:#}"));
    }
    let out = s.out.clone();
    let path = m.finish(&out).context("writing run manifest")?;
    eprintln!("manifest: {}", path.display());
    result
}

fn rel(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Trajectory { common, physics } => {
            let s = settings(&common, |f| physics.apply(f))?;
            with_manifest("trajectory", &s, &common, trajectory)
        }
        Command::ShoCheck { common, physics, spectral } => {
            let s = settings(&common, |f| {
                physics.apply(f);
                spectral.apply(f);
                f.sho = Some(true);
            })?;
            with_manifest("sho-check", &s, &common, sho_check)
        }
        Command::DuffingCase { common, physics, spectral } => {
            let s = settings(&common, |f| {
                physics.apply(f);
                spectral.apply(f);
            })?;
            if s.sho {
                return Err(Usage("duffing-case does not take --sho; use sho-check".into()).into());
            }
            if !(s.g > 0.0 && s.g <= 3.0) {
                return Err(Usage(format!("--g must lie in (0, 3] (got {})", s.g)).into());
            }
            with_manifest("duffing-case", &s, &common, duffing_case)
        }
        Command::Sweep {
            common,
            physics,
            spectral,
            g_min,
            g_max,
            step,
        } => {
            let s = settings(&common, |f| {
                physics.apply(f);
                spectral.apply(f);
                f.g_min = g_min;
                f.g_max = g_max;
                f.step = step;
            })?;
            if !(s.step > 0.0 && s.step.is_finite()) {
                return Err(Usage(format!("--step must be positive (got {})", s.step)).into());
            }
            if !(s.g_min > 0.0 && s.g_min <= s.g_max && s.g_max <= 3.0) {
                return Err(Usage(format!("need 0 < --g-min ≤ --g-max ≤ 3 (got {} and {})", s.g_min, s.g_max)).into());
            }
            with_manifest("sweep", &s, &common, sweep)
        }
        Command::Classical {
            common,
            physics,
            spectral,
            noise_amp,
            lyapunov_periods,
        } => {
            let s = settings(&common, |f| {
                physics.apply(f);
                spectral.apply(f);
                f.noise_amp = noise_amp;
                f.lyapunov_periods = lyapunov_periods;
            })?;
            with_manifest("classical", &s, &common, classical_cmd)
        }
        Command::Spectrum {
            common,
            spectral,
            input,
            column,
            jumps,
            from_period,
        } => {
            let s = settings(&common, |f| spectral.apply(f))?;
            let from = from_period.unwrap_or(s.transient);
            with_manifest("spectrum", &s, &common, |s, m| spectrum(s, m, &input, &column, jumps.as_deref(), from))
        }
        Command::Validate {
            common,
            only,
            inject_rate_fault,
        } => {
            let s = settings(&common, |_| {})?;
            if let Some(k) = inject_rate_fault {
                if !(k > 0.0 && k.is_finite()) {
                    return Err(Usage(format!("--inject-rate-fault must be positive (got {k})")).into());
                }
            }
            let opts = ValidationOptions {
                only,
                master_seed: s.seed,
                fault_rate_scale: inject_rate_fault.unwrap_or(1.0),
            };
            if let Some(list) = &opts.only {
                for name in list {
                    let known = qtraj_core::validation::GROUPS
                        .iter()
                        .any(|g| name == g || name.starts_with(&format!("{g}-")));
                    if !known {
                        return Err(Usage(format!(
                            "--only: unknown check `{name}` (groups: {})",
                            qtraj_core::validation::GROUPS.join(", ")
                        ))
                        .into());
                    }
                }
            }
            with_manifest("validate", &s, &common, |s, m| validate(s, m, &opts))
        }
    }
}

fn initial_state(s: &Settings, params: &PhysicalParams) -> Result<StateVector> {
    let dim = s.dim.unwrap_or_else(|| experiments::default_dim(params, &s.solver()));
    Ok(StateVector::vacuum(dim)?)
}

fn trajectory(s: &Settings, m: &mut RunManifest) -> Result<()> {
    let params = s.params();
    params.validate()?;
    let cfg = s.solver();
    let init = initial_state(s, &params)?;
    let seed = jumps::derive_seed(s.seed, 0);
    let rec = jumps::evolve_trajectory(&params, &cfg, &init, seed)?;
    m.outputs.extend(io::write_trajectory(&rec, &cfg, &s.out, "trajectory")?);

    let first = rec.first_recorded_sample();
    let q_svg = rel(&s.out, "trajectory_q.svg");
    plots::lines(
        &q_svg,
        &format!("<q>(t), g = {}", params.g),
        "t / drive periods",
        "<q>",
        &[("<q>", &rec.sample_times[first..], &rec.q_mean[first..])],
    )?;
    let portrait_svg = rel(&s.out, "trajectory_portrait.svg");
    plots::portrait(&portrait_svg, &format!("phase portrait, g = {}", params.g), &rec.phase_portrait())?;
    m.outputs.extend([q_svg, portrait_svg]);
    println!(
        "dim {}  jumps {}  leakage {:.2e}  norm error {:.2e}",
        rec.dim,
        rec.jump_times.len(),
        rec.leakage_max,
        rec.norm_error_max
    );
    Ok(())
}

#[derive(Serialize)]
struct ShoSummary {
    status: CheckStatus,
    flatness_n: Option<f64>,
    max_peak_db_n: Option<f64>,
    top_peak_q: Option<Peak>,
    jumps: usize,
    jump_rate: f64,
    predicted_rate: f64,
    jumps_per_period: f64,
    dim: usize,
    seed: u64,
}

fn sho_check(s: &Settings, m: &mut RunManifest) -> Result<()> {
    let cfg = s.experiment();
    let check = experiments::run_sho_check(&s.params(), &cfg)?;
    m.outputs.extend(io::write_trajectory(&check.record, &cfg.solver, &s.out, "sho_trajectory")?);
    m.outputs.extend(io::write_spectrum(&check.spectrum_q, &s.out, "sho_spectrum_q", "<q>")?);
    let q_svg = rel(&s.out, "sho_spectrum_q.svg");
    plots::spectrum(&q_svg, "<q> spectrum", &check.spectrum_q.freqs, &check.spectrum_q.psd, PLOT_MAX_FREQ)?;
    m.outputs.push(q_svg);
    if let Some(sn) = &check.spectrum_n {
        m.outputs.extend(io::write_spectrum(sn, &s.out, "sho_spectrum_n", "photon counts")?);
        let n_svg = rel(&s.out, "sho_spectrum_n.svg");
        plots::spectrum(&n_svg, "photon-count spectrum", &sn.freqs, &sn.psd, PLOT_MAX_FREQ)?;
        m.outputs.push(n_svg);
    }
    let summary = ShoSummary {
        status: check.status,
        flatness_n: check.flatness_n,
        max_peak_db_n: check.max_peak_db_n,
        top_peak_q: check.top_peak_q,
        jumps: check.jumps,
        jump_rate: check.jump_rate,
        predicted_rate: check.predicted_rate,
        jumps_per_period: check.jumps_per_period,
        dim: check.record.dim,
        seed: check.record.seed,
    };
    let path = rel(&s.out, "sho_check.json");
    io::write_json(&path, &summary)?;
    m.outputs.push(path);
    println!(
        "status {:?}  flatness {:?}  max peak {:?} dB  rate {:.4} (predicted {:.4})",
        check.status, check.flatness_n, check.max_peak_db_n, check.jump_rate, check.predicted_rate
    );
    if check.status != CheckStatus::Pass {
        return Err(CheckFailed(format!("harmonic-oscillator check: {:?}", check.status)).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct CaseSummary<'a> {
    g: f64,
    seed: u64,
    dim: usize,
    regime: &'static str,
    flatness_q: f64,
    peaks_q: &'a [Peak],
    peaks_n: &'a [Peak],
    jump_count: usize,
    leakage_max: f64,
}

fn duffing_case(s: &Settings, m: &mut RunManifest) -> Result<()> {
    let cfg = s.experiment();
    let case = experiments::run_duffing_case(s.g, &cfg)?;
    m.outputs.extend(io::write_trajectory(&case.record, &cfg.solver, &s.out, "case_trajectory")?);
    m.outputs.extend(io::write_spectrum(&case.spectrum_q, &s.out, "case_spectrum_q", "<q>")?);
    m.outputs.extend(io::write_spectrum(&case.spectrum_n, &s.out, "case_spectrum_n", "photon counts")?);
    let summary = CaseSummary {
        g: case.g,
        seed: case.seed,
        dim: case.dim,
        regime: case.regime.label(),
        flatness_q: case.flatness_q,
        peaks_q: &case.peaks_q,
        peaks_n: &case.peaks_n,
        jump_count: case.jump_count,
        leakage_max: case.leakage_max,
    };
    let path = rel(&s.out, "case.json");
    io::write_json(&path, &summary)?;
    m.outputs.push(path);
    for (name, sp, title) in [
        ("case_spectrum_q.svg", &case.spectrum_q, "<q> spectrum"),
        ("case_spectrum_n.svg", &case.spectrum_n, "photon-count spectrum"),
    ] {
        let p = rel(&s.out, name);
        plots::spectrum(&p, &format!("{title}, g = {}", case.g), &sp.freqs, &sp.psd, PLOT_MAX_FREQ)?;
        m.outputs.push(p);
    }
    let p = rel(&s.out, "case_portrait.svg");
    plots::portrait(&p, &format!("phase portrait, g = {}", case.g), &case.portrait())?;
    m.outputs.push(p);
    println!(
        "g {}  regime {}  flatness {:.4}  dim {}  jumps {}",
        case.g,
        case.regime,
        case.flatness_q,
        case.dim,
        case.jump_count
    );
    Ok(())
}

fn sweep(s: &Settings, m: &mut RunManifest) -> Result<()> {
    let cfg = s.experiment();
    let result = experiments::run_drive_sweep(s.g_min, s.g_max, s.step, &cfg)?;
    m.outputs.extend(io::write_sweep(&result, &s.out)?);
    for (name, rows, title) in [
        ("sweep_psd_q.svg", &result.psd_q, "log10 <q> spectrum"),
        ("sweep_psd_n.svg", &result.psd_n, "log10 photon-count spectrum"),
    ] {
        let p = rel(&s.out, name);
        plots::heat_map(&p, title, &result.g_values, &result.freqs, rows, PLOT_MAX_FREQ)?;
        m.outputs.push(p);
    }
    for row in &result.rows {
        println!("g {:.3}  {}", row.g, row.regime);
    }
    let failed: Vec<String> = result
        .rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("g = {}: {e}", r.g)))
        .collect();
    if !failed.is_empty() {
        anyhow::bail!("{} of {} rows failed: {}", failed.len(), result.rows.len(), failed.join("; "));
    }
    Ok(())
}

#[derive(Serialize)]
struct LyapunovReport {
    g: f64,
    beta: f64,
    gamma: f64,
    exponent: f64,
    converged: bool,
    periods: f64,
    step: f64,
    initial: (f64, f64),
}

fn classical_cmd(s: &Settings, m: &mut RunManifest) -> Result<()> {
    let params = PhysicalParams { sho_mode: false, ..s.params() };
    let ccfg = s.classical();
    let seed = jumps::derive_seed(s.seed, 0);
    let tr = classical::integrate_langevin(&params, s.noise_amp, &ccfg, seed)?;
    let csv = rel(&s.out, "classical.csv");
    io::write_classical(&csv, &tr)?;
    m.outputs.push(csv);

    let first = tr.first_recorded_sample();
    let series = qtraj_core::TimeSeries::new(ccfg.sample_interval, tr.x[first..].to_vec(), 0.0)?;
    let sp = welch_psd(&series, s.segment_len, s.overlap, s.window)?;
    m.outputs.extend(io::write_spectrum(&sp, &s.out, "classical_spectrum", "u")?);
    let svg = rel(&s.out, "classical_spectrum.svg");
    plots::spectrum(&svg, &format!("classical u spectrum, g = {}", params.g), &sp.freqs, &sp.psd, PLOT_MAX_FREQ)?;
    m.outputs.push(svg);

    let est = classical::lyapunov_exponent(&params, s.lyapunov_periods * TAU, ccfg.step, ccfg.initial)?;
    let report = LyapunovReport {
        g: params.g,
        beta: params.beta,
        gamma: params.gamma,
        exponent: est.exponent,
        converged: est.converged,
        periods: s.lyapunov_periods,
        step: ccfg.step,
        initial: ccfg.initial,
    };
    let json = rel(&s.out, "lyapunov.json");
    io::write_json(&json, &report)?;
    m.outputs.push(json);
    println!(
        "lyapunov exponent {:.4}{}",
        est.exponent,
        if est.converged { "" } else { " (not converged)" }
    );
    Ok(())
}

fn spectrum(s: &Settings, m: &mut RunManifest, input: &Path, column: &str, jumps_csv: Option<&Path>, from: f64) -> Result<()> {
    m.inputs.push(input.to_path_buf());
    let series = io::read_sample_series(input, column, from)?;
    let sp = welch_psd(&series, s.segment_len, s.overlap, s.window)?;
    let stem = format!("spectrum_{column}");
    m.outputs.extend(io::write_spectrum(&sp, &s.out, &stem, column)?);
    let svg = rel(&s.out, &format!("{stem}.svg"));
    plots::spectrum(&svg, &format!("{column} spectrum"), &sp.freqs, &sp.psd, PLOT_MAX_FREQ)?;
    m.outputs.push(svg);

    if let Some(path) = jumps_csv {
        m.inputs.push(path.to_path_buf());
        let times = io::read_column(path, "t_jump")?;
        let t_end = series.t0 + series.dt * (series.len() - 1) as f64;
        let counts = bin_jump_increments(&times, series.dt, series.t0, t_end)?;
        let sn = welch_psd(&counts, s.segment_len, s.overlap, s.window)?;
        m.outputs.extend(io::write_spectrum(&sn, &s.out, "spectrum_counts", "photon counts")?);
        let svg = rel(&s.out, "spectrum_counts.svg");
        plots::spectrum(&svg, "photon-count spectrum", &sn.freqs, &sn.psd, PLOT_MAX_FREQ)?;
        m.outputs.push(svg);
    }
    Ok(())
}

fn validate(s: &Settings, m: &mut RunManifest, opts: &ValidationOptions) -> Result<()> {
    let report = run_validation(opts)?;
    let path = rel(&s.out, "validation.json");
    io::write_json(&path, &report)?;
    m.outputs.push(path);
    for c in &report.checks {
        println!(
            "{:<4} {:<28} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.error.as_deref().unwrap_or(&c.detail)
        );
    }
    if !report.all_passed {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
        return Err(CheckFailed(format!("validation failed: {}", failed.join(", "))).into());
    }
    Ok(())
}
