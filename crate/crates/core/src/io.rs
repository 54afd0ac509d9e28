//! CSV and JSON artifacts. Column names and the `schema_version` key of every
//! JSON sidecar are part of the on-disk format.

use serde::Serialize;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::classical::ClassicalTrajectory;
use crate::error::{Error, Result};
use crate::experiments::SweepResult;
use crate::fock::build_quadratures;
use crate::jumps::{JumpSolverConfig, TrajectoryRecord};
use crate::lindblad::DensityMatrix;
use crate::spectra::{PowerSpectrum, TimeSeries};

pub const SCHEMA_VERSION: u32 = 1;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    use std::io::Write;
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SampleRow {
    t: f64,
    q_mean: f64,
    p_mean: f64,
    n_mean: f64,
}

#[derive(Serialize)]
struct TrajectorySidecar<'a> {
    schema_version: u32,
    seed: u64,
    dim: usize,
    params: &'a crate::fock::PhysicalParams,
    config: &'a JumpSolverConfig,
    leakage_max: f64,
    norm_error_max: f64,
    jump_count: usize,
    transient_periods: f64,
    end_time: f64,
    sample_interval: f64,
    stats: &'a crate::jumps::SolverStats,
    /// Units of the `t` column of the samples file.
    sample_time_unit: &'static str,
    jump_time_unit: &'static str,
}

/// Writes `<stem>_samples.csv` (t in drive periods, q_mean, p_mean,
/// n_mean), `<stem>_jumps.csv` (t_jump in time units) and `<stem>.json`.
/// Returns the paths written.
pub fn write_trajectory(rec: &TrajectoryRecord, cfg: &JumpSolverConfig, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    let samples = dir.join(format!("{stem}_samples.csv"));
    let mut w = csv::Writer::from_writer(create(&samples)?);
    for i in 0..rec.sample_times.len() {
        w.serialize(SampleRow {
            t: rec.sample_times[i],
            q_mean: rec.q_mean[i],
            p_mean: rec.p_mean[i],
            n_mean: rec.n_mean[i],
        })?;
    }
    w.flush()?;

    let jumps = dir.join(format!("{stem}_jumps.csv"));
    let mut w = csv::Writer::from_writer(create(&jumps)?);
    // header even when there are no jumps
    w.write_record(["t_jump"])?;
    for &t in &rec.jump_times {
        w.write_record([format!("{t}")])?;
    }
    w.flush()?;

    let sidecar = dir.join(format!("{stem}.json"));
    write_json(
        &sidecar,
        &TrajectorySidecar {
            schema_version: SCHEMA_VERSION,
            seed: rec.seed,
            dim: rec.dim,
            params: &rec.params,
            config: cfg,
            leakage_max: rec.leakage_max,
            norm_error_max: rec.norm_error_max,
            jump_count: rec.jump_times.len(),
            transient_periods: rec.transient_periods,
            end_time: rec.end_time,
            sample_interval: rec.sample_interval,
            stats: &rec.stats,
            sample_time_unit: "drive periods",
            jump_time_unit: "time (drive period = 2π)",
        },
    )?;
    Ok(vec![samples, jumps, sidecar])
}

/// Reads one numeric column of a CSV file with headers.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let idx = headers
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| Error::MissingColumn {
            column: column.into(),
            path: path.display().to_string(),
        })?;
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = rec.get(idx).unwrap_or("").trim();
        let v: f64 = field.parse().map_err(|_| Error::BadField {
            path: path.display().to_string(),
            row: row + 1,
            field: field.into(),
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Uniform series from a samples file: `column` against `t` (in drive
/// periods), keeping samples with `t ≥ from_period`.
pub fn read_sample_series(path: &Path, column: &str, from_period: f64) -> Result<TimeSeries> {
    let t = read_column(path, "t")?;
    let v = read_column(path, column)?;
    if t.len() < 2 {
        return Err(Error::EmptyWindow(format!("{} holds fewer than two samples", path.display())));
    }
    let dt = (t[1] - t[0]) * std::f64::consts::TAU;
    let start = t.partition_point(|&x| x < from_period - 1e-9);
    TimeSeries::new(dt, v[start..].to_vec(), t.get(start).copied().unwrap_or(0.0) * std::f64::consts::TAU)
}

#[derive(Serialize)]
struct SpectrumRow {
    freq: f64,
    psd: f64,
}

#[derive(Serialize)]
struct SpectrumSidecar<'a> {
    schema_version: u32,
    estimator: &'static str,
    window: &'static str,
    segment_len: usize,
    overlap: f64,
    segment_count: usize,
    bin_width: f64,
    frequency_unit: &'static str,
    source: &'a str,
}

/// Writes `<stem>.csv` (freq, psd) and `<stem>.json` with estimator settings.
pub fn write_spectrum(spectrum: &PowerSpectrum, dir: &Path, stem: &str, source: &str) -> Result<Vec<PathBuf>> {
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut w = csv::Writer::from_writer(create(&csv_path)?);
    for (&freq, &psd) in spectrum.freqs.iter().zip(&spectrum.psd) {
        w.serialize(SpectrumRow { freq, psd })?;
    }
    w.flush()?;
    let json_path = dir.join(format!("{stem}.json"));
    write_json(
        &json_path,
        &SpectrumSidecar {
            schema_version: SCHEMA_VERSION,
            estimator: "welch",
            window: spectrum.window.label(),
            segment_len: spectrum.segment_len,
            overlap: spectrum.overlap,
            segment_count: spectrum.segment_count,
            bin_width: spectrum.bin_width(),
            frequency_unit: "drive frequency",
            source,
        },
    )?;
    Ok(vec![csv_path, json_path])
}

fn write_matrix(path: &Path, g_values: &[f64], freqs: &[f64], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["g".to_string()];
    header.extend(freqs.iter().map(|f| format!("{f}")));
    w.write_record(&header)?;
    for (g, row) in g_values.iter().zip(rows) {
        let mut rec = vec![format!("{g}")];
        rec.extend(row.iter().map(|v| format!("{v}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SweepManifest<'a> {
    schema_version: u32,
    g_values: &'a [f64],
    bin_width: f64,
    regime_labels: Vec<&'static str>,
    rows: &'a [crate::experiments::SweepRow],
}

/// Writes `sweep_psd_q.csv`, `sweep_psd_n.csv` (one row per drive value,
/// one column per frequency) and `sweep.json`.
pub fn write_sweep(result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let q = dir.join("sweep_psd_q.csv");
    let n = dir.join("sweep_psd_n.csv");
    let manifest = dir.join("sweep.json");
    write_matrix(&q, &result.g_values, &result.freqs, &result.psd_q)?;
    write_matrix(&n, &result.g_values, &result.freqs, &result.psd_n)?;
    write_json(
        &manifest,
        &SweepManifest {
            schema_version: SCHEMA_VERSION,
            g_values: &result.g_values,
            bin_width: if result.freqs.len() > 1 { result.freqs[1] - result.freqs[0] } else { f64::NAN },
            regime_labels: result.regime_labels.iter().map(|r| r.label()).collect(),
            rows: &result.rows,
        },
    )?;
    Ok(vec![q, n, manifest])
}

#[derive(Serialize)]
struct DensityRow {
    t: f64,
    q: f64,
    p: f64,
    n: f64,
}

/// `tr(ρq)`, `tr(ρp)`, `tr(ρn)` against `t` (time units).
pub fn write_density_observables(path: &Path, times: &[f64], states: &[DensityMatrix]) -> Result<()> {
    let Some(first) = states.first() else {
        return Err(Error::EmptyWindow("no density matrices to write".into()));
    };
    let quad = build_quadratures(first.dim())?;
    let mut w = csv::Writer::from_writer(create(path)?);
    for (&t, rho) in times.iter().zip(states) {
        w.serialize(DensityRow {
            t,
            q: rho.expectation(&quad.q)?.re,
            p: rho.expectation(&quad.p)?.re,
            n: rho.expectation(&quad.n)?.re,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ClassicalRow {
    t: f64,
    u: f64,
    v: f64,
}

/// Classical samples: t (drive periods), u, v.
pub fn write_classical(path: &Path, tr: &ClassicalTrajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for i in 0..tr.x.len() {
        w.serialize(ClassicalRow {
            t: tr.sample_times[i],
            u: tr.x[i],
            v: tr.v[i],
        })?;
    }
    w.flush()?;
    Ok(())
}
