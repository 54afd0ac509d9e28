//! Run settings: built-in defaults, then a flat `key = value` file, then
//! command-line flags.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use qtraj_core::{ClassicalConfig, ExperimentConfig, JumpSolverConfig, PhysicalParams, WindowKind};

use crate::Usage;

/// Every key a config file may contain. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub g: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub sho: Option<bool>,
    pub dim: Option<usize>,
    pub periods: Option<f64>,
    pub transient: Option<f64>,
    pub samples_per_period: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub seed: Option<u64>,
    pub segment_len: Option<usize>,
    pub overlap: Option<f64>,
    pub window: Option<String>,
    pub ensemble: Option<usize>,
    pub g_min: Option<f64>,
    pub g_max: Option<f64>,
    pub step: Option<f64>,
    pub noise_amp: Option<f64>,
    pub lyapunov_periods: Option<f64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| Usage(format!("config {}: {}", path.display(), e.message())).into())
    }
}

/// Fully resolved settings; this is what the manifest records.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub g: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sho: bool,
    pub dim: Option<usize>,
    pub periods: f64,
    pub transient: f64,
    pub samples_per_period: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub seed: u64,
    pub seed_source: &'static str,
    pub segment_len: usize,
    pub overlap: f64,
    pub window: WindowKind,
    pub ensemble: usize,
    pub g_min: f64,
    pub g_max: f64,
    pub step: f64,
    pub noise_amp: f64,
    pub lyapunov_periods: f64,
    pub out: PathBuf,
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            g: 0.3,
            beta: 0.1,
            gamma: 0.125,
            sho: false,
            dim: None,
            periods: 500.0,
            transient: 50.0,
            samples_per_period: 64,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 0.1,
            seed: 0,
            seed_source: "default",
            segment_len: 8192,
            overlap: 0.5,
            window: WindowKind::Hann,
            ensemble: 1,
            g_min: 0.05,
            g_max: 3.0,
            step: 0.05,
            noise_amp: qtraj_core::classical::DEFAULT_NOISE_AMP,
            lyapunov_periods: 800.0,
            out: PathBuf::from("out"),
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

fn positive(flag: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Usage(format!("--{flag} must be positive (got {v})")).into())
    }
}

fn non_negative(flag: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Usage(format!("--{flag} must be non-negative (got {v})")).into())
    }
}

impl Settings {
    /// Layers `file` and then `flags` over the defaults and checks ranges.
    /// Errors are usage errors naming the offending flag.
    pub fn resolve(file: &FileConfig, flags: &FileConfig) -> Result<Self> {
        let d = Settings::default();
        macro_rules! pick {
            ($k:ident) => {
                flags.$k.clone().or_else(|| file.$k.clone())
            };
        }
        let (seed, seed_source) = match (flags.seed, file.seed) {
            (Some(s), _) => (s, "flag"),
            (None, Some(s)) => (s, "config"),
            (None, None) => (rand::random::<u64>() >> 11, "random"),
        };
        let window = match pick!(window) {
            Some(w) => w.parse::<WindowKind>().map_err(|_| Usage(format!("--window must be hann or rectangular (got {w})")))?,
            None => d.window,
        };
        let s = Settings {
            g: non_negative("g", pick!(g).unwrap_or(d.g))?,
            beta: pick!(beta).unwrap_or(d.beta),
            gamma: positive("gamma", pick!(gamma).unwrap_or(d.gamma))?,
            sho: pick!(sho).unwrap_or(d.sho),
            dim: pick!(dim),
            periods: positive("periods", pick!(periods).unwrap_or(d.periods))?,
            transient: non_negative("transient", pick!(transient).unwrap_or(d.transient))?,
            samples_per_period: pick!(samples_per_period).unwrap_or(d.samples_per_period),
            rel_tol: positive("rel-tol", pick!(rel_tol).unwrap_or(d.rel_tol))?,
            abs_tol: positive("abs-tol", pick!(abs_tol).unwrap_or(d.abs_tol))?,
            max_step: positive("max-step", pick!(max_step).unwrap_or(d.max_step))?,
            seed,
            seed_source,
            segment_len: pick!(segment_len).unwrap_or(d.segment_len),
            overlap: pick!(overlap).unwrap_or(d.overlap),
            window,
            ensemble: pick!(ensemble).unwrap_or(d.ensemble),
            g_min: pick!(g_min).unwrap_or(d.g_min),
            g_max: pick!(g_max).unwrap_or(d.g_max),
            step: pick!(step).unwrap_or(d.step),
            noise_amp: non_negative("noise-amp", pick!(noise_amp).unwrap_or(d.noise_amp))?,
            lyapunov_periods: positive("lyapunov-periods", pick!(lyapunov_periods).unwrap_or(d.lyapunov_periods))?,
            out: pick!(out).unwrap_or(d.out),
            jobs: pick!(jobs).unwrap_or(d.jobs),
        };
        if !(s.beta > 0.0 && s.beta <= 1.0) {
            return Err(Usage(format!("--beta must lie in (0, 1] (got {})", s.beta)).into());
        }
        if s.dim.is_some_and(|n| n < 2) {
            return Err(Usage("--dim must be at least 2".into()).into());
        }
        if s.samples_per_period < 4 {
            return Err(Usage("--samples-per-period must be at least 4".into()).into());
        }
        if s.segment_len < 16 {
            return Err(Usage(format!("--segment-len must be at least 16 (got {})", s.segment_len)).into());
        }
        if !(0.0..1.0).contains(&s.overlap) {
            return Err(Usage(format!("--overlap must lie in [0, 1) (got {})", s.overlap)).into());
        }
        if s.ensemble == 0 {
            return Err(Usage("--ensemble must be at least 1".into()).into());
        }
        if s.jobs == 0 {
            return Err(Usage("--jobs must be at least 1".into()).into());
        }
        Ok(s)
    }

    pub fn params(&self) -> PhysicalParams {
        PhysicalParams {
            beta: self.beta,
            gamma: self.gamma,
            g: self.g,
            sho_mode: self.sho,
        }
    }

    pub fn solver(&self) -> JumpSolverConfig {
        JumpSolverConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            sample_interval: TAU / self.samples_per_period as f64,
            t_transient: self.transient,
            t_record: self.periods,
            max_step: self.max_step,
            ..Default::default()
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            solver: self.solver(),
            dim: self.dim,
            segment_len: self.segment_len,
            overlap: self.overlap,
            window: self.window,
            master_seed: self.seed,
            ensemble: self.ensemble,
            ..Default::default()
        }
    }

    pub fn classical(&self) -> ClassicalConfig {
        ClassicalConfig {
            sample_interval: TAU / self.samples_per_period as f64,
            t_transient: self.transient,
            t_record: self.periods,
            ..Default::default()
        }
    }
}
