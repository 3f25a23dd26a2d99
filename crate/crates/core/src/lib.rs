//! Numerical laboratory for the cyclic Ford–Kac–Mazur chain of `2N+1`
//! linearly coupled harmonic oscillators.
//!
//! The crate evolves the chain exactly in normal-mode coordinates, turns the
//! trajectory of the distinguished momentum `p₀(t)` into a finite
//! trigonometric sum, and measures how tightly the time autocorrelation
//! functions of individual trajectories concentrate around the
//! Ornstein–Uhlenbeck decay `e^{-|τ|}` as the chain grows.
//!
//! Module map:
//!
//! - [`spectral`]: mode frequencies, the cyclic coupling matrix, the mode
//!   transform and propagator entries.
//! - [`dynamics`]: phase states, energy, the exact flow and the
//!   trigonometric-sum representation of `p₀(t)`.
//! - [`acf`]: closed-form and numeric time autocorrelations, the analytic
//!   phase autocorrelation and the limit curve.
//! - [`sampling`]: Maxwell–Boltzmann and energy-shell initial conditions.
//! - [`ensemble`]: Monte Carlo drivers for concentration experiments.

pub mod acf;
pub mod dynamics;
pub mod ensemble;
mod error;
pub mod sampling;
pub mod spectral;
pub mod stats;

pub use acf::{AcfCurve, AcfKind, Normalization, TauGrid};
pub use dynamics::{ModeAmplitudes, PhaseState, TrigSeries, TrigTerm};
pub use ensemble::{EnsembleStats, NormalCellReport, SamplerKind, VarianceScaling};
pub use error::{Error, Result};
pub use sampling::ShellSpec;
pub use spectral::{AssemblyConfig, FrequencyLaw, Spectrum};
