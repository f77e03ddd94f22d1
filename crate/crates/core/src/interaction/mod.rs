//! Interaction potentials and the relative-coordinate phases they imprint
//! while the two pulses cross.
//!
//! Conventions: the relative coordinate is `x = x₁ - x₂`; during the gate its
//! longitudinal part sweeps from `z - 2l` to `z` at speed `2v`, so the
//! accumulated phase is `φ(z, x_T) = (1/2v) ∫_{z-2l}^{z} Δ(x_T, s) ds`. All
//! internal arithmetic is done with lengths in units of `σ` and phases per
//! unit strength scale exactly linearly in `g` (or `u`).

mod geometry;
mod phase;
mod potential;

pub use geometry::GateGeometry;
pub use phase::{
    accumulated_phase_dipole, contact_phase_regularized, numeric_line_phase, simplified_phase,
    PhaseField,
};
pub use potential::{dipole_potential, DipoleModel, InteractionSpec, Potential};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InteractionError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid interaction: {0}")]
    InvalidSpec(String),
    #[error("potential is singular at zero separation")]
    Singular,
    #[error("transverse distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("line integral of the potential failed: {0}")]
    Quadrature(#[from] crate::mathcore::MathError),
}
