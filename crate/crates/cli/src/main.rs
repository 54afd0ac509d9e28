mod commands;
mod config;
mod manifest;
mod plots;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::FileConfig;

/// Bad flags or config values. Reported with exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A run that completed but whose check did not pass. Exit status 1.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

#[derive(Parser)]
#[command(name = "qtraj", version, about = "Quantum-jump trajectories of a driven, damped Duffing oscillator")]
#[command(propagate_version = true, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one trajectory and write expectation values and jump times.
    #[command(allow_negative_numbers = true)]
    Trajectory {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
    },
    /// Driven harmonic oscillator: white-noise photon counts and steady rate.
    #[command(allow_negative_numbers = true)]
    ShoCheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        spectral: Spectral,
    },
    /// One Duffing drive value: spectra, phase portrait and regime label.
    #[command(allow_negative_numbers = true)]
    DuffingCase {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        spectral: Spectral,
    },
    /// Spectra and regime labels over a grid of drive amplitudes.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        spectral: Spectral,
        #[arg(long)]
        g_min: Option<f64>,
        #[arg(long)]
        g_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Noisy classical Duffing oscillator, its spectrum and Lyapunov exponent.
    #[command(allow_negative_numbers = true)]
    Classical {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        spectral: Spectral,
        /// Velocity noise amplitude.
        #[arg(long)]
        noise_amp: Option<f64>,
        /// Noise-free span used for the Lyapunov exponent, in drive periods.
        #[arg(long)]
        lyapunov_periods: Option<f64>,
    },
    /// Recompute spectra from a stored trajectory samples CSV.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        spectral: Spectral,
        /// Samples CSV written by `trajectory`.
        #[arg(long)]
        input: PathBuf,
        /// Column of the samples file to analyse.
        #[arg(long, default_value = "q_mean")]
        column: String,
        /// Jump-times CSV; adds the photon-count spectrum.
        #[arg(long)]
        jumps: Option<PathBuf>,
        /// Discard samples before this time, in drive periods.
        #[arg(long)]
        from_period: Option<f64>,
    },
    /// Run the oracle checks and write a pass/fail report.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated check groups or ids to run.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        /// Debug: scale the jump rate by this factor to exercise the checks.
        #[arg(long, hide = true)]
        inject_rate_fault: Option<f64>,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; a random one is drawn and recorded when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct Physics {
    /// Drive amplitude.
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Damping rate.
    #[arg(long)]
    gamma: Option<f64>,
    /// Use the harmonic instead of the Duffing potential.
    #[arg(long)]
    sho: bool,
    /// Fock dimension; chosen from the drive when absent.
    #[arg(long)]
    dim: Option<usize>,
    /// Recorded span in drive periods.
    #[arg(long)]
    periods: Option<f64>,
    /// Discarded lead-in in drive periods.
    #[arg(long)]
    transient: Option<f64>,
    #[arg(long)]
    samples_per_period: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_step: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct Spectral {
    /// Welch segment length in samples.
    #[arg(long)]
    segment_len: Option<usize>,
    #[arg(long)]
    overlap: Option<f64>,
    /// hann or rectangular.
    #[arg(long)]
    window: Option<String>,
    /// Trajectories averaged per spectrum.
    #[arg(long)]
    ensemble: Option<usize>,
}

impl Common {
    fn apply(&self, f: &mut FileConfig) {
        f.out = self.out.clone();
        f.seed = self.seed;
        f.jobs = self.jobs;
    }
}

impl Physics {
    fn apply(&self, f: &mut FileConfig) {
        f.g = self.g;
        f.beta = self.beta;
        f.gamma = self.gamma;
        f.sho = self.sho.then_some(true);
        f.dim = self.dim;
        f.periods = self.periods;
        f.transient = self.transient;
        f.samples_per_period = self.samples_per_period;
        f.rel_tol = self.rel_tol;
        f.abs_tol = self.abs_tol;
        f.max_step = self.max_step;
    }
}

impl Spectral {
    fn apply(&self, f: &mut FileConfig) {
        f.segment_len = self.segment_len;
        f.overlap = self.overlap;
        f.window = self.window.clone();
        f.ensemble = self.ensemble;
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(u) = e.downcast_ref::<Usage>() {
                eprintln!("error: {u}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        }
    }
}
