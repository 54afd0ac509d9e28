//! Standalone SVG figures drawn from the same arrays that go to CSV.

use anyhow::{anyhow, Result};
use plotters::prelude::*;
use std::path::Path;

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
        Some((lo - pad, hi + pad))
    } else {
        None
    }
}

fn err<E: std::fmt::Debug>(e: E) -> anyhow::Error {
    anyhow!("plotting failed: {e:?}")
}

/// One or more curves on linear axes.
pub fn lines(path: &Path, title: &str, x_label: &str, y_label: &str, series: &[(&str, &[f64], &[f64])]) -> Result<()> {
    let xr = finite_range(series.iter().flat_map(|s| s.1.iter().copied())).unwrap_or((0.0, 1.0));
    let yr = finite_range(series.iter().flat_map(|s| s.2.iter().copied())).unwrap_or((0.0, 1.0));
    let root = SVGBackend::new(path, (900, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(xr.0..xr.1, yr.0..yr.1)
        .map_err(err)?;
    chart.configure_mesh().x_desc(x_label).y_desc(y_label).draw().map_err(err)?;
    for (i, (name, x, y)) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(x.iter().copied().zip(y.iter().copied()).filter(|p| p.1.is_finite()), color))
            .map_err(err)?
            .label(*name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color));
    }
    if series.len() > 1 {
        chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw().map_err(err)?;
    }
    root.present().map_err(err)?;
    Ok(())
}

/// Power spectral density on a log₁₀ scale.
pub fn spectrum(path: &Path, title: &str, freqs: &[f64], psd: &[f64], max_freq: f64) -> Result<()> {
    let (x, y): (Vec<f64>, Vec<f64>) = freqs
        .iter()
        .zip(psd)
        .filter(|(f, p)| **f > 0.0 && **f <= max_freq && **p > 0.0)
        .map(|(f, p)| (*f, p.log10()))
        .unzip();
    lines(path, title, "frequency / drive frequency", "log10 PSD", &[("psd", &x, &y)])
}

/// Scatter of `(⟨q⟩, ⟨p⟩)` pairs.
pub fn portrait(path: &Path, title: &str, points: &[(f64, f64)]) -> Result<()> {
    let xr = finite_range(points.iter().map(|p| p.0)).unwrap_or((-1.0, 1.0));
    let yr = finite_range(points.iter().map(|p| p.1)).unwrap_or((-1.0, 1.0));
    let root = SVGBackend::new(path, (600, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(xr.0..xr.1, yr.0..yr.1)
        .map_err(err)?;
    chart.configure_mesh().x_desc("<q>").y_desc("<p>").draw().map_err(err)?;
    chart
        .draw_series(points.iter().map(|&(x, y)| Circle::new((x, y), 1, BLUE.mix(0.5).filled())))
        .map_err(err)?;
    root.present().map_err(err)?;
    Ok(())
}

/// Heat map of `log₁₀` rows (one per drive value) against frequency.
pub fn heat_map(path: &Path, title: &str, g_values: &[f64], freqs: &[f64], rows: &[Vec<f64>], max_freq: f64) -> Result<()> {
    let cols: Vec<usize> = (0..freqs.len()).filter(|&k| freqs[k] > 0.0 && freqs[k] <= max_freq).collect();
    let logs: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| cols.iter().map(|&k| if r[k] > 0.0 { r[k].log10() } else { f64::NAN }).collect())
        .collect();
    let (lo, hi) = finite_range(logs.iter().flatten().copied()).unwrap_or((0.0, 1.0));
    let df = if freqs.len() > 1 { freqs[1] - freqs[0] } else { 1.0 };
    let dg = if g_values.len() > 1 { g_values[1] - g_values[0] } else { 0.05 };
    let (g0, g1) = (g_values.first().copied().unwrap_or(0.0), g_values.last().copied().unwrap_or(1.0));

    let root = SVGBackend::new(path, (900, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..max_freq, (g0 - dg / 2.0)..(g1 + dg / 2.0))
        .map_err(err)?;
    chart.configure_mesh().x_desc("frequency / drive frequency").y_desc("g").draw().map_err(err)?;
    let cells = g_values.iter().zip(&logs).flat_map(|(&g, row)| {
        cols.iter().zip(row).filter(|(_, v)| v.is_finite()).map(move |(&k, &v)| {
            let s = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
            let color = ViridisRGB::get_color(s);
            Rectangle::new(
                [(freqs[k] - df / 2.0, g - dg / 2.0), (freqs[k] + df / 2.0, g + dg / 2.0)],
                color.filled(),
            )
        })
    });
    chart.draw_series(cells).map_err(err)?;
    root.present().map_err(err)?;
    Ok(())
}
