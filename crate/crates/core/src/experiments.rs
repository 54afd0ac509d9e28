//! End-to-end runs: the driven harmonic oscillator check, single Duffing
//! cases, the drive-amplitude sweep and the rule-based regime classifier.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::classical::{integrate_deterministic, ClassicalConfig};
use crate::error::{Error, Result};
use crate::fock::{PhysicalParams, StateVector};
use crate::jumps::{derive_seed, evolve_trajectory, JumpSolverConfig, TrajectoryRecord};
use crate::lindblad::sho_steady_photon_number;
use crate::spectra::{
    bin_jump_increments, dominant_peaks, spectral_flatness, welch_psd, Peak, PowerSpectrum, TimeSeries, WindowKind,
};

/// Dynamical regime read off a pair of spectra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Periodic1,
    ChaoticLike,
    Periodic2x,
    QuasiPeriodic,
    Unclassified,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Periodic1 => "Periodic1",
            Regime::ChaoticLike => "ChaoticLike",
            Regime::Periodic2x => "Periodic2x",
            Regime::QuasiPeriodic => "QuasiPeriodic",
            Regime::Unclassified => "Unclassified",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Decision thresholds of [`classify_regime`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegimeThresholds {
    /// `⟨q⟩` flatness over `flatness_band` above which a run is chaotic-like.
    pub flatness_chaotic: f64,
    pub flatness_band: (f64, f64),
    /// Band searched for spectral peaks.
    pub peak_band: (f64, f64),
    /// Minimum height above the band median for a `⟨q⟩` peak to count, in dB.
    pub min_prominence_db: f64,
    /// Same for the count spectrum, whose lines sit on a shot-noise floor.
    pub count_prominence_db: f64,
    /// Relative tolerance when testing whether a peak is a harmonic.
    pub harmonic_tol: f64,
    /// Number of mutually non-harmonic peaks needed for quasi-periodicity.
    pub quasi_min_peaks: usize,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            flatness_chaotic: 0.1,
            flatness_band: (0.1, 3.0),
            peak_band: (0.05, 6.0),
            min_prominence_db: 25.0,
            count_prominence_db: 10.0,
            harmonic_tol: 0.02,
            quasi_min_peaks: 3,
        }
    }
}

/// Settings shared by every experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub solver: JumpSolverConfig,
    /// Fock dimension; `None` picks one from the drive (see [`default_dim`]).
    pub dim: Option<usize>,
    /// Welch segment length in samples.
    pub segment_len: usize,
    pub overlap: f64,
    pub window: WindowKind,
    pub master_seed: u64,
    pub thresholds: RegimeThresholds,
    /// Band over which the harmonic oscillator's count spectrum must be flat.
    pub sho_band: (f64, f64),
    /// Trajectories averaged per drive value; spectra are averaged.
    pub ensemble: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            solver: JumpSolverConfig::default(),
            dim: None,
            segment_len: 8192,
            overlap: 0.5,
            window: WindowKind::Hann,
            master_seed: 0,
            thresholds: RegimeThresholds::default(),
            sho_band: (0.1, 4.0),
            ensemble: 1,
        }
    }
}

fn round_up(n: f64, to: usize) -> usize {
    (n / to as f64).ceil() as usize * to
}

/// Fock dimension used when none is configured.
///
/// The harmonic oscillator uses at least 256 levels. For the Duffing
/// oscillator the noise-free classical orbit from rest is followed through
/// the transient and part of the record, and its peak photon number
/// `n = (u² + v²)/(2β²)` is padded for the quantum spread, with a floor of
/// 512 levels.
pub fn default_dim(params: &PhysicalParams, solver: &JumpSolverConfig) -> usize {
    if params.sho_mode {
        let n = sho_steady_photon_number(params).unwrap_or(0.0);
        // from rest the amplitude grows monotonically towards the steady orbit
        return round_up((n + 10.0 * n.sqrt() + 64.0).max(256.0), 64);
    }
    let step = TAU / 256.0;
    let periods = (solver.t_transient + solver.t_record.min(100.0)).max(20.0) as usize;
    let mut s = (0.0, 0.0);
    let mut n_max: f64 = 0.0;
    for k in 0..periods * 16 {
        let t0 = k as f64 * TAU / 16.0;
        s = integrate_deterministic(params, s, t0, t0 + TAU / 16.0, step);
        n_max = n_max.max((s.0 * s.0 + s.1 * s.1) / (2.0 * params.beta * params.beta));
    }
    round_up((1.5 * n_max + 10.0 * n_max.sqrt() + 64.0).max(512.0), 64)
}

impl ExperimentConfig {
    pub fn dim_for(&self, params: &PhysicalParams) -> usize {
        self.dim.unwrap_or_else(|| default_dim(params, &self.solver))
    }

    fn series(&self, values: Vec<f64>, t0: f64) -> Result<TimeSeries> {
        TimeSeries::new(self.solver.sample_interval, values, t0)
    }

    /// `⟨q⟩` and count spectra of one trajectory's recorded part.
    pub fn spectra_of(&self, rec: &TrajectoryRecord) -> Result<(PowerSpectrum, PowerSpectrum)> {
        let first = rec.first_recorded_sample();
        let t0 = rec.transient_periods * TAU;
        let q = self.series(rec.q_mean[first..].to_vec(), t0)?;
        let counts = bin_jump_increments(&rec.jump_times, rec.sample_interval, t0, rec.end_time)?;
        Ok((
            welch_psd(&q, self.segment_len, self.overlap, self.window)?,
            welch_psd(&counts, self.segment_len, self.overlap, self.window)?,
        ))
    }
}

/// Outcome of the harmonic-oscillator white-noise check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// No photons were detected, so the count spectrum is undefined.
    Dark,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShoCheck {
    pub spectrum_q: PowerSpectrum,
    pub spectrum_n: Option<PowerSpectrum>,
    pub flatness_n: Option<f64>,
    /// Highest local maximum of the count spectrum above its band median.
    pub max_peak_db_n: Option<f64>,
    pub top_peak_q: Option<Peak>,
    pub jumps: usize,
    pub jump_rate: f64,
    /// `2Γ⟨n⟩` from the closed-form steady state.
    pub predicted_rate: f64,
    pub jumps_per_period: f64,
    pub status: CheckStatus,
    pub record: TrajectoryRecord,
}

const FLAT_MIN: f64 = 0.8;
const PEAK_MAX_DB: f64 = 3.0;

/// Largest local maximum of `spectrum` inside `band`, in dB above the band
/// median.
pub fn max_peak_db(spectrum: &PowerSpectrum, band: (f64, f64)) -> Result<f64> {
    let median = spectrum.band_median(band)?;
    let r = spectrum.band_indices(band);
    let psd = &spectrum.psd;
    let lo = r.start.max(1);
    let hi = r.end.min(psd.len() - 1);
    let top = (lo..hi)
        .filter(|&i| psd[i] > psd[i - 1] && psd[i] >= psd[i + 1])
        .map(|i| psd[i])
        .fold(0.0, f64::max);
    Ok(10.0 * (top / median).log10())
}

/// Runs the driven harmonic oscillator from the vacuum and tests that its
/// count spectrum is white while `⟨q⟩` follows the drive.
pub fn run_sho_check(params: &PhysicalParams, cfg: &ExperimentConfig) -> Result<ShoCheck> {
    if !params.sho_mode {
        return Err(Error::InvalidParameter {
            name: "sho_mode",
            value: 0.0,
            reason: "the white-noise check needs the harmonic oscillator",
        });
    }
    let settle = 10.0 / params.gamma / TAU;
    if cfg.solver.t_transient < settle {
        return Err(Error::InvalidParameter {
            name: "t_transient",
            value: cfg.solver.t_transient,
            reason: "must cover at least 10/Γ to reach the steady state",
        });
    }
    let dim = cfg.dim_for(params);
    let seed = derive_seed(cfg.master_seed, 0);
    let record = evolve_trajectory(params, &cfg.solver, &StateVector::vacuum(dim)?, seed)?;
    let first = record.first_recorded_sample();
    let t0 = record.transient_periods * TAU;
    let q = cfg.series(record.q_mean[first..].to_vec(), t0)?;
    let spectrum_q = welch_psd(&q, cfg.segment_len, cfg.overlap, cfg.window)?;
    let top_peak_q = dominant_peaks(&spectrum_q.restrict(cfg.thresholds.peak_band), 1, 0.0).first().copied();
    let jumps = record.recorded_jumps().len();
    let span = record.recorded_span();
    let jump_rate = jumps as f64 / span;
    let predicted_rate = 2.0 * params.gamma * sho_steady_photon_number(params)?;
    let q_ok = top_peak_q.is_some_and(|p| (p.freq - 1.0).abs() <= spectrum_q.bin_width());

    let (spectrum_n, flatness_n, max_peak_db_n, status) = if jumps == 0 {
        (None, None, None, CheckStatus::Dark)
    } else {
        let counts = bin_jump_increments(&record.jump_times, record.sample_interval, t0, record.end_time)?;
        let spectrum_n = welch_psd(&counts, cfg.segment_len, cfg.overlap, cfg.window)?;
        let flat = spectral_flatness(&spectrum_n, cfg.sho_band)?;
        let peak = max_peak_db(&spectrum_n, cfg.sho_band)?;
        let ok = flat > FLAT_MIN && peak <= PEAK_MAX_DB && q_ok;
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        (Some(spectrum_n), Some(flat), Some(peak), status)
    };
    Ok(ShoCheck {
        spectrum_q,
        spectrum_n,
        flatness_n,
        max_peak_db_n,
        top_peak_q,
        jumps,
        jump_rate,
        predicted_rate,
        jumps_per_period: jump_rate * TAU,
        status,
        record,
    })
}

/// One Duffing drive value: trajectory, spectra and regime.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DuffingCase {
    pub g: f64,
    pub seed: u64,
    pub dim: usize,
    /// The first trajectory; with an ensemble the spectra are averages.
    pub record: TrajectoryRecord,
    pub spectrum_q: PowerSpectrum,
    pub spectrum_n: PowerSpectrum,
    pub flatness_q: f64,
    pub peaks_q: Vec<Peak>,
    pub peaks_n: Vec<Peak>,
    pub regime: Regime,
    pub jump_count: usize,
    pub leakage_max: f64,
}

impl DuffingCase {
    /// Post-transient `(⟨q⟩, ⟨p⟩)` pairs of the first trajectory.
    pub fn portrait(&self) -> Vec<(f64, f64)> {
        self.record.phase_portrait()
    }
}

fn average_into(acc: &mut PowerSpectrum, other: &PowerSpectrum, weight: f64) {
    for (a, b) in acc.psd.iter_mut().zip(&other.psd) {
        *a += weight * (b - *a);
    }
    acc.segment_count += other.segment_count;
}

/// Full pipeline for one drive amplitude with an explicit trajectory seed.
pub fn run_duffing_case_seeded(g: f64, cfg: &ExperimentConfig, seed: u64) -> Result<DuffingCase> {
    if !(g > 0.0 && g <= 3.0) {
        return Err(Error::InvalidParameter {
            name: "g",
            value: g,
            reason: "drive amplitude must lie in (0, 3]",
        });
    }
    let params = PhysicalParams::duffing(g);
    let dim = cfg.dim_for(&params);
    let init = StateVector::vacuum(dim)?;
    let record = evolve_trajectory(&params, &cfg.solver, &init, seed)?;
    let (mut spectrum_q, mut spectrum_n) = cfg.spectra_of(&record)?;
    let mut jump_count = record.recorded_jumps().len();
    let mut leakage_max = record.leakage_max;
    for j in 1..cfg.ensemble.max(1) {
        let extra = evolve_trajectory(&params, &cfg.solver, &init, derive_seed(seed, j as u64))?;
        let (sq, sn) = cfg.spectra_of(&extra)?;
        let w = 1.0 / (j + 1) as f64;
        average_into(&mut spectrum_q, &sq, w);
        average_into(&mut spectrum_n, &sn, w);
        jump_count += extra.recorded_jumps().len();
        leakage_max = leakage_max.max(extra.leakage_max);
    }
    let th = &cfg.thresholds;
    let flatness_q = spectral_flatness(&spectrum_q, th.flatness_band)?;
    let peaks_q = dominant_peaks(&spectrum_q.restrict(th.peak_band), 8, th.min_prominence_db);
    let peaks_n = dominant_peaks(&spectrum_n.restrict(th.peak_band), 8, th.count_prominence_db);
    let regime = classify_regime(&spectrum_q, &spectrum_n, th)?;
    Ok(DuffingCase {
        g,
        seed,
        dim,
        record,
        spectrum_q,
        spectrum_n,
        flatness_q,
        peaks_q,
        peaks_n,
        regime,
        jump_count,
        leakage_max,
    })
}

/// [`run_duffing_case_seeded`] with the seed of the first sweep row.
pub fn run_duffing_case(g: f64, cfg: &ExperimentConfig) -> Result<DuffingCase> {
    run_duffing_case_seeded(g, cfg, derive_seed(cfg.master_seed, 0))
}

/// Peaks that are not within `tol` of an integer multiple (≥ 2) of a lower
/// listed peak, nor within `tol` of a peak already kept.
fn non_harmonic(peaks: &[Peak], tol: f64) -> Vec<f64> {
    let mut freqs: Vec<f64> = peaks.iter().map(|p| p.freq).collect();
    freqs.sort_by(|a, b| a.total_cmp(b));
    let mut kept: Vec<f64> = Vec::new();
    for (i, &f) in freqs.iter().enumerate() {
        let harmonic = freqs[..i].iter().any(|&base| {
            let k = (f / base).round();
            k >= 2.0 && (f - k * base).abs() <= tol * f
        });
        let duplicate = kept.iter().any(|&other| (f - other).abs() <= tol * f);
        if !harmonic && !duplicate {
            kept.push(f);
        }
    }
    kept
}

/// Rule-based regime label from the `⟨q⟩` and count spectra.
///
/// In order: broadband `⟨q⟩` is chaotic-like; a count line at twice the
/// drive with `⟨q⟩` at the drive is period-doubled counting; both lines at
/// the drive is the plain periodic orbit; enough mutually non-harmonic
/// `⟨q⟩` lines is quasi-periodic.
pub fn classify_regime(psd_q: &PowerSpectrum, psd_n: &PowerSpectrum, th: &RegimeThresholds) -> Result<Regime> {
    if !psd_q.same_grid(psd_n) {
        return Err(Error::GridMismatch);
    }
    if spectral_flatness(psd_q, th.flatness_band)? > th.flatness_chaotic {
        return Ok(Regime::ChaoticLike);
    }
    let bin = psd_q.bin_width();
    let q_peaks = dominant_peaks(&psd_q.restrict(th.peak_band), 16, th.min_prominence_db);
    let n_peaks = dominant_peaks(&psd_n.restrict(th.peak_band), 1, th.count_prominence_db);
    let at = |p: Option<&Peak>, f: f64| p.is_some_and(|p| (p.freq - f).abs() <= bin + 1e-9);
    let q_at_drive = at(q_peaks.first(), 1.0);
    if q_at_drive && at(n_peaks.first(), 2.0) {
        return Ok(Regime::Periodic2x);
    }
    if q_at_drive && at(n_peaks.first(), 1.0) {
        return Ok(Regime::Periodic1);
    }
    if non_harmonic(&q_peaks, th.harmonic_tol).len() >= th.quasi_min_peaks {
        return Ok(Regime::QuasiPeriodic);
    }
    Ok(Regime::Unclassified)
}

/// Per-row bookkeeping of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub g: f64,
    pub seed: u64,
    pub dim: usize,
    pub leakage_max: f64,
    pub jump_count: usize,
    pub flatness_q: f64,
    pub regime: Regime,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub g_values: Vec<f64>,
    pub freqs: Vec<f64>,
    /// One row per drive value; rows of failed runs are NaN.
    pub psd_q: Vec<Vec<f64>>,
    pub psd_n: Vec<Vec<f64>>,
    pub regime_labels: Vec<Regime>,
    pub rows: Vec<SweepRow>,
}

/// Drive values `g_min, g_min + step, …` up to `g_max`.
pub fn sweep_values(g_min: f64, g_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "step",
            value: step,
            reason: "must be positive",
        });
    }
    if !(g_min > 0.0 && g_min <= g_max && g_max <= 3.0) {
        return Err(Error::InvalidParameter {
            name: "g_min",
            value: g_min,
            reason: "need 0 < g_min <= g_max <= 3",
        });
    }
    let count = ((g_max - g_min) / step + 1e-9).floor() as usize + 1;
    // round to the step's decimal grid so labels read 0.35, not 0.35000000000000003
    Ok((0..count)
        .map(|k| {
            let g = g_min + k as f64 * step;
            (g * 1e9).round() / 1e9
        })
        .collect())
}

/// Runs one Duffing case per drive value in parallel (on the current rayon
/// pool). Row `k` uses seed `derive_seed(master_seed, k)`, so the result is
/// independent of scheduling. Failed rows are kept as `Unclassified` with
/// the error message.
pub fn run_drive_sweep(g_min: f64, g_max: f64, step: f64, cfg: &ExperimentConfig) -> Result<SweepResult> {
    let g_values = sweep_values(g_min, g_max, step)?;
    let outcomes: Vec<(u64, Result<DuffingCase>)> = g_values
        .par_iter()
        .enumerate()
        .map(|(k, &g)| {
            let seed = derive_seed(cfg.master_seed, k as u64);
            (seed, run_duffing_case_seeded(g, cfg, seed))
        })
        .collect();
    let freqs = outcomes
        .iter()
        .find_map(|(_, r)| r.as_ref().ok().map(|c| c.spectrum_q.freqs.clone()))
        .unwrap_or_default();
    let blank = vec![f64::NAN; freqs.len()];
    let mut result = SweepResult {
        g_values: g_values.clone(),
        freqs,
        psd_q: Vec::with_capacity(g_values.len()),
        psd_n: Vec::with_capacity(g_values.len()),
        regime_labels: Vec::with_capacity(g_values.len()),
        rows: Vec::with_capacity(g_values.len()),
    };
    for (&g, (seed, outcome)) in g_values.iter().zip(outcomes) {
        let row = match outcome {
            Ok(case) => {
                result.psd_q.push(case.spectrum_q.psd);
                result.psd_n.push(case.spectrum_n.psd);
                SweepRow {
                    g,
                    seed,
                    dim: case.dim,
                    leakage_max: case.leakage_max,
                    jump_count: case.jump_count,
                    flatness_q: case.flatness_q,
                    regime: case.regime,
                    error: None,
                }
            }
            Err(e) => {
                result.psd_q.push(blank.clone());
                result.psd_n.push(blank.clone());
                SweepRow {
                    g,
                    seed,
                    dim: 0,
                    leakage_max: f64::NAN,
                    jump_count: 0,
                    flatness_q: f64::NAN,
                    regime: Regime::Unclassified,
                    error: Some(e.to_string()),
                }
            }
        };
        result.regime_labels.push(row.regime);
        result.rows.push(row);
    }
    Ok(result)
}

/// Classical counterpart of a drive value: noisy trajectory spectrum.
pub fn classical_spectrum(
    g: f64,
    noise_amp: f64,
    classical: &ClassicalConfig,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<PowerSpectrum> {
    let params = PhysicalParams::duffing(g);
    let tr = crate::classical::integrate_langevin(&params, noise_amp, classical, seed)?;
    let first = tr.first_recorded_sample();
    let series = TimeSeries::new(classical.sample_interval, tr.x[first..].to_vec(), 0.0)?;
    welch_psd(&series, cfg.segment_len, cfg.overlap, cfg.window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum_with_lines(lines: &[(f64, f64)]) -> PowerSpectrum {
        let dnu = 1.0 / 128.0;
        let freqs: Vec<f64> = (0..=2048).map(|k| k as f64 * dnu).collect();
        let mut psd = vec![1e-4; freqs.len()];
        for &(f, p) in lines {
            psd[(f / dnu).round() as usize] = p;
        }
        PowerSpectrum {
            freqs,
            psd,
            segment_count: 6,
            segment_len: 8192,
            overlap: 0.5,
            window: WindowKind::Hann,
        }
    }

    #[test]
    fn single_line_at_drive_is_periodic() {
        let s = spectrum_with_lines(&[(1.0, 10.0)]);
        let th = RegimeThresholds::default();
        assert_eq!(classify_regime(&s, &s, &th).unwrap(), Regime::Periodic1);
    }

    #[test]
    fn doubled_count_line() {
        let q = spectrum_with_lines(&[(1.0, 10.0), (3.0, 0.1)]);
        let n = spectrum_with_lines(&[(2.0, 5.0), (4.0, 0.5)]);
        assert_eq!(classify_regime(&q, &n, &RegimeThresholds::default()).unwrap(), Regime::Periodic2x);
    }

    #[test]
    fn incommensurate_lines() {
        let q = spectrum_with_lines(&[(0.3125, 3.0), (1.0, 10.0), (1.3125, 1.0), (2.0, 0.5)]);
        let n = spectrum_with_lines(&[(0.625, 1.0)]);
        assert_eq!(classify_regime(&q, &n, &RegimeThresholds::default()).unwrap(), Regime::QuasiPeriodic);
    }

    #[test]
    fn harmonics_alone_are_not_quasi_periodic() {
        let q = spectrum_with_lines(&[(0.5, 10.0), (1.0, 3.0), (1.5, 1.0), (2.5, 1.0)]);
        let n = spectrum_with_lines(&[(0.5, 1.0)]);
        assert_eq!(classify_regime(&q, &n, &RegimeThresholds::default()).unwrap(), Regime::Unclassified);
    }

    #[test]
    fn broadband_is_chaotic_like() {
        let mut q = spectrum_with_lines(&[]);
        for (k, p) in q.psd.iter_mut().enumerate() {
            *p = 1.0 + 0.3 * ((k as f64) * 0.7).sin();
        }
        let n = spectrum_with_lines(&[(1.0, 1.0)]);
        assert_eq!(classify_regime(&q, &n, &RegimeThresholds::default()).unwrap(), Regime::ChaoticLike);
    }

    #[test]
    fn classifier_is_pure_and_checks_grids() {
        let q = spectrum_with_lines(&[(1.0, 10.0)]);
        let th = RegimeThresholds::default();
        assert_eq!(classify_regime(&q, &q, &th).unwrap(), classify_regime(&q, &q, &th).unwrap());
        let mut other = q.clone();
        other.freqs.pop();
        other.psd.pop();
        assert!(matches!(classify_regime(&q, &other, &th), Err(Error::GridMismatch)));
    }

    #[test]
    fn sweep_grid() {
        let g = sweep_values(0.05, 3.0, 0.05).unwrap();
        assert_eq!(g.len(), 60);
        assert_eq!(g[6], 0.35);
        assert_eq!(g[59], 3.0);
        assert_eq!(sweep_values(0.4, 0.4, 1.0).unwrap(), vec![0.4]);
        assert!(sweep_values(0.1, 1.0, 0.0).is_err());
        assert!(sweep_values(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn default_dimensions() {
        let solver = JumpSolverConfig::default();
        assert_eq!(default_dim(&PhysicalParams::sho(0.3), &solver), 256);
        assert_eq!(default_dim(&PhysicalParams::duffing(0.3), &solver), 512);
        assert!(default_dim(&PhysicalParams::duffing(2.5), &solver) >= 1280);
    }
}
