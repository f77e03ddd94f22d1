//! Initial two-photon product states and their reduction to the relative
//! coordinate.
//!
//! Photon 1 starts centred at the origin and photon 2 at `(D, 0, l)`, both in
//! the `(0,0,0)` Hermite-Gaussian mode of width `σ`. Since the interaction
//! only acts on `x = x₁ - x₂`, the centre-of-mass factor is common to the
//! actual and the reference output and drops out of every overlap.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interaction::GateGeometry;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TwoPhotonError {
    #[error("only the (0,0,0) input mode is supported, got {0:?}")]
    UnsupportedMode([usize; 3]),
}

/// The pair of input pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulsePair {
    pub geometry: GateGeometry,
    pub modes: [[usize; 3]; 2],
}

impl PulsePair {
    pub fn new(geometry: GateGeometry) -> Self {
        Self {
            geometry,
            modes: [[0; 3]; 2],
        }
    }

    pub fn with_modes(geometry: GateGeometry, modes: [[usize; 3]; 2]) -> Result<Self, TwoPhotonError> {
        for m in modes {
            if m != [0, 0, 0] {
                return Err(TwoPhotonError::UnsupportedMode(m));
            }
        }
        Ok(Self { geometry, modes })
    }

    /// Pulse centres `(photon 1, photon 2)` at `t = 0`.
    pub fn centers(&self) -> ([f64; 3], [f64; 3]) {
        ([0.0; 3], [self.geometry.d, 0.0, self.geometry.l])
    }

    /// Single-photon amplitude `ψ₀(x)ψ₀(y)ψ₀(z)` about `center`.
    pub fn single_photon_amplitude(&self, x: [f64; 3], center: [f64; 3]) -> f64 {
        let s = self.geometry.sigma;
        let r2: f64 = (0..3).map(|i| (x[i] - center[i]).powi(2)).sum();
        (PI * s * s).powf(-0.75) * (-0.5 * r2 / (s * s)).exp()
    }
}

/// Gaussian law of the relative coordinate under the product intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeGaussianDensity {
    pub mean: [f64; 3],
    pub std: [f64; 3],
}

impl RelativeGaussianDensity {
    pub fn pdf(&self, x: [f64; 3]) -> f64 {
        (0..3)
            .map(|i| {
                let u = (x[i] - self.mean[i]) / self.std[i];
                (-0.5 * u * u).exp() / ((2.0 * PI).sqrt() * self.std[i])
            })
            .product()
    }

    /// Means and standard deviations in units of `σ`.
    pub fn scaled(&self, sigma: f64) -> ([f64; 3], [f64; 3]) {
        (self.mean.map(|m| m / sigma), self.std.map(|s| s / sigma))
    }
}

/// Law of `x' = x'₁ - x'₂` in the primed frame, where each photon's
/// longitudinal coordinate is measured from its own post-crossing centre.
pub fn relative_density(pair: &PulsePair) -> RelativeGaussianDensity {
    let s = pair.geometry.sigma;
    RelativeGaussianDensity {
        mean: [-pair.geometry.d, 0.0, 0.0],
        std: [s; 3],
    }
}

/// The relative wavefunction `ξ(x, 0) = (2πσ²)^{-3/4} exp(-|x - x₀|²/4σ²)`
/// with `x₀ = (-D, 0, -l)` in unprimed coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialRelativeWavefunction {
    pub center: [f64; 3],
    pub sigma: f64,
}

impl InitialRelativeWavefunction {
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let s2 = self.sigma * self.sigma;
        let r2: f64 = (0..3).map(|i| (x[i] - self.center[i]).powi(2)).sum();
        (2.0 * PI * s2).powf(-0.75) * (-0.25 * r2 / s2).exp()
    }

    /// Amplitude along one axis, `(2πσ²)^{-1/4} exp(-(x - x₀)²/4σ²)`.
    pub fn axis_factor(&self, axis: usize, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let d = x - self.center[axis];
        (2.0 * PI * s2).powf(-0.25) * (-0.25 * d * d / s2).exp()
    }
}

pub fn initial_relative_wavefunction(pair: &PulsePair) -> InitialRelativeWavefunction {
    let (c1, c2) = pair.centers();
    InitialRelativeWavefunction {
        center: [c1[0] - c2[0], c1[1] - c2[1], c1[2] - c2[2]],
        sigma: pair.geometry.sigma,
    }
}
