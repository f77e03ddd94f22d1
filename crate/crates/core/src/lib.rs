//! Simulation library for photon-photon controlled-phase gates limited by
//! transverse multi-mode effects.
//!
//! Two counter-propagating single-photon pulses of transverse width `σ`
//! interact through a potential (Rydberg dipole-dipole or a regularized
//! contact term) while crossing a medium of length `l`. The library computes
//! the conditional phase `φ` and fidelity `F` of the resulting two-photon
//! state along two independent routes:
//!
//! * a phase-only route, where the interaction multiplies the relative
//!   wavefunction by an accumulated phase and the gate overlap reduces to a
//!   low-dimensional Gaussian integral ([`gatemetrics`]);
//! * a full split-step solution of the relative-coordinate equation that
//!   keeps transverse diffraction ([`propagator`]).
//!
//! Units: every length is measured in units of `σ`, time in units of `σ/v`
//! and interaction strengths are the dimensionless `g = C/(2vσ²)` (dipole) or
//! `u = V₀/(2vσ²)` (contact). Phase fields scale linearly in `g`/`u`.

pub mod gatemetrics;
pub mod interaction;
pub mod mathcore;
pub mod propagator;
pub mod sweep;
pub mod twophoton;
pub mod validation;

mod error;

pub use error::{Error, Result};

/// Version string embedded in every emitted result file.
pub const ARTIFACT_VERSION: &str = concat!("photon-gate ", env!("CARGO_PKG_VERSION"));
