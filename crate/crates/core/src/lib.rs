//! Quantum-jump trajectories of a driven, damped Duffing oscillator, the
//! photon-detection record they produce, and the spectral analysis used to
//! tell its dynamical regimes apart.

pub mod classical;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod io;
pub mod jumps;
pub mod lindblad;
pub mod ode;
pub mod spectra;
pub mod validation;

pub use error::{Error, Result};
pub use fock::{BandedOperator, HamiltonianParts, PhysicalParams, StateVector};
pub use classical::{ClassicalConfig, ClassicalTrajectory, LyapunovEstimate};
pub use experiments::{ExperimentConfig, Regime, RegimeThresholds, SweepResult};
pub use jumps::{JumpSolverConfig, TrajectoryRecord};
pub use lindblad::DensityMatrix;
pub use spectra::{PowerSpectrum, TimeSeries, WindowKind};
