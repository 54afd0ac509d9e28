//! Sampled series, photon-count binning and Welch power spectra.
//!
//! Frequencies are normalized to the drive: the drive has angular frequency
//! one, so a component `cos(νt)` appears at `ν`. Spectral densities are per
//! unit normalized frequency and one-sided, so `Σ psd · Δν` recovers the
//! variance of the (windowed) input.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// Uniformly sampled real series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub dt: f64,
    pub values: Vec<f64>,
    pub t0: f64,
}

impl TimeSeries {
    pub fn new(dt: f64, values: Vec<f64>, t0: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                reason: "sample spacing must be positive",
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                value: *bad,
                reason: "series must be finite",
            });
        }
        Ok(Self { dt, values, t0 })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len().max(1) as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.values.len().max(1) as f64
    }
}

/// Counts of events per bin `[t_start + k·dt, t_start + (k+1)·dt)`; the
/// window covers as many whole bins as fit before `t_end`.
pub fn bin_jump_increments(jump_times: &[f64], dt: f64, t_start: f64, t_end: f64) -> Result<TimeSeries> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "bin width must be positive",
        });
    }
    let bins = ((t_end - t_start) / dt * (1.0 + 1e-12)).floor();
    if !(bins >= 1.0) {
        return Err(Error::EmptyWindow(format!("[{t_start}, {t_end}) holds no bin of width {dt}")));
    }
    let bins = bins as usize;
    let mut values = vec![0.0; bins];
    let first = jump_times.partition_point(|&t| t < t_start);
    for &t in &jump_times[first..] {
        let k = ((t - t_start) / dt).floor() as usize;
        if k >= bins {
            break;
        }
        values[k] += 1.0;
    }
    TimeSeries::new(dt, values, t_start)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Hann,
    Rectangular,
}

impl WindowKind {
    fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            // periodic Hann, the usual choice for averaged periodograms
            WindowKind::Hann => (0..n).map(|k| 0.5 - 0.5 * (TAU * k as f64 / n as f64).cos()).collect(),
            WindowKind::Rectangular => vec![1.0; n],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            WindowKind::Hann => "hann",
            WindowKind::Rectangular => "rectangular",
        }
    }
}

impl std::str::FromStr for WindowKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hann" => Ok(Self::Hann),
            "rectangular" | "rect" | "boxcar" => Ok(Self::Rectangular),
            other => Err(format!("unknown window `{other}` (expected hann or rectangular)")),
        }
    }
}

/// One-sided power spectral density on a normalized-frequency grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    pub freqs: Vec<f64>,
    pub psd: Vec<f64>,
    pub segment_count: usize,
    pub segment_len: usize,
    pub overlap: f64,
    pub window: WindowKind,
}

impl PowerSpectrum {
    pub fn bin_width(&self) -> f64 {
        self.freqs[1] - self.freqs[0]
    }

    /// Index of the bin whose centre is closest to `freq`.
    pub fn nearest_bin(&self, freq: f64) -> usize {
        let k = (freq / self.bin_width()).round().max(0.0) as usize;
        k.min(self.freqs.len() - 1)
    }

    /// `Σ psd · Δν`.
    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.bin_width()
    }

    /// Indices of the bins with `lo ≤ ν ≤ hi`.
    pub fn band_indices(&self, (lo, hi): (f64, f64)) -> std::ops::Range<usize> {
        let start = self.freqs.partition_point(|&f| f < lo - 1e-12);
        let end = self.freqs.partition_point(|&f| f <= hi + 1e-12);
        start..end.max(start)
    }

    /// Median of the density over the bins of `band`.
    pub fn band_median(&self, band: (f64, f64)) -> Result<f64> {
        let r = self.band_indices(band);
        if r.is_empty() {
            return Err(Error::EmptyWindow(format!("no bins in band [{}, {}]", band.0, band.1)));
        }
        let mut vals = self.psd[r].to_vec();
        vals.sort_by(|a, b| a.total_cmp(b));
        let m = vals.len();
        Ok(if m % 2 == 1 {
            vals[m / 2]
        } else {
            0.5 * (vals[m / 2 - 1] + vals[m / 2])
        })
    }

    /// The bins of `band` as a spectrum of their own; the frequency grid keeps
    /// its absolute values.
    pub fn restrict(&self, band: (f64, f64)) -> Self {
        let r = self.band_indices(band);
        Self {
            freqs: self.freqs[r.clone()].to_vec(),
            psd: self.psd[r].to_vec(),
            ..self.clone()
        }
    }

    /// Whether both spectra share the same frequency grid.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.freqs.len() == other.freqs.len()
            && self.freqs.iter().zip(&other.freqs).all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1.0))
    }
}

/// Welch estimate: mean-removed segments of `segment_len` samples,
/// overlapping by the fraction `overlap`, each windowed and transformed;
/// the periodograms are averaged.
pub fn welch_psd(series: &TimeSeries, segment_len: usize, overlap: f64, window: WindowKind) -> Result<PowerSpectrum> {
    if segment_len < 16 {
        return Err(Error::InvalidParameter {
            name: "segment_len",
            value: segment_len as f64,
            reason: "segments need at least 16 samples",
        });
    }
    if segment_len > series.len() {
        return Err(Error::SegmentTooLong {
            segment: segment_len,
            len: series.len(),
        });
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidParameter {
            name: "overlap",
            value: overlap,
            reason: "must lie in [0, 1)",
        });
    }
    let hop = ((segment_len as f64 * (1.0 - overlap)).round() as usize).max(1);
    let segments = (series.len() - segment_len) / hop + 1;
    let w = window.coefficients(segment_len);
    let w2: f64 = w.iter().map(|x| x * x).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(segment_len);
    let half = segment_len / 2;
    let mut acc = vec![0.0; half + 1];
    let mut buf = vec![C64::new(0.0, 0.0); segment_len];
    for s in 0..segments {
        let seg = &series.values[s * hop..s * hop + segment_len];
        let mean = seg.iter().sum::<f64>() / segment_len as f64;
        for ((b, &x), &wk) in buf.iter_mut().zip(seg).zip(&w) {
            *b = C64::new((x - mean) * wk, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    // density per unit angular (= normalized) frequency
    let scale = series.dt / (TAU * w2 * segments as f64);
    let psd = acc
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let fold = if k == 0 || (segment_len % 2 == 0 && k == half) { 1.0 } else { 2.0 };
            p * scale * fold
        })
        .collect();
    let dnu = TAU / (segment_len as f64 * series.dt);
    Ok(PowerSpectrum {
        freqs: (0..=half).map(|k| k as f64 * dnu).collect(),
        psd,
        segment_count: segments,
        segment_len,
        overlap,
        window,
    })
}

/// Geometric over arithmetic mean of the density within `band`.
pub fn spectral_flatness(spectrum: &PowerSpectrum, band: (f64, f64)) -> Result<f64> {
    let r = spectrum.band_indices(band);
    if r.is_empty() {
        return Err(Error::EmptyWindow(format!("no bins in band [{}, {}]", band.0, band.1)));
    }
    let vals = &spectrum.psd[r];
    let arith = vals.iter().sum::<f64>() / vals.len() as f64;
    if !(arith > 0.0) {
        return Err(Error::EmptyWindow(format!("no power in band [{}, {}]", band.0, band.1)));
    }
    let log_mean = vals.iter().map(|&p| p.max(1e-300).ln()).sum::<f64>() / vals.len() as f64;
    Ok((log_mean.exp() / arith).clamp(0.0, 1.0))
}

/// A local maximum of a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub freq: f64,
    pub power: f64,
    /// Height above the spectrum median, in dB.
    pub prominence_db: f64,
}

/// Up to `k` strict local maxima standing at least `min_prominence_db`
/// above the median density of `spectrum`, strongest first.
pub fn dominant_peaks(spectrum: &PowerSpectrum, k: usize, min_prominence_db: f64) -> Vec<Peak> {
    let psd = &spectrum.psd;
    if psd.len() < 3 || k == 0 {
        return Vec::new();
    }
    let first = spectrum.freqs[0];
    let last = *spectrum.freqs.last().expect("non-empty");
    let median = match spectrum.band_median((first, last)) {
        Ok(m) if m > 0.0 => m,
        _ => f64::MIN_POSITIVE,
    };
    let mut peaks: Vec<Peak> = (1..psd.len() - 1)
        .filter(|&i| psd[i] > psd[i - 1] && psd[i] >= psd[i + 1])
        .map(|i| Peak {
            freq: spectrum.freqs[i],
            power: psd[i],
            prominence_db: 10.0 * (psd[i] / median).log10(),
        })
        .filter(|p| p.prominence_db >= min_prominence_db)
        .collect();
    peaks.sort_by(|a, b| b.power.total_cmp(&a.power));
    peaks.truncate(k);
    peaks
}
