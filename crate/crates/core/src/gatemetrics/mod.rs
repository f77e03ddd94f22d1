//! Gate figures of merit: the overlap `√F e^{iφ}` between the interacting
//! and the free output, the transverse mode-mixing tensor and its Schmidt
//! spectrum.
//!
//! `F = |overlap|²` and `φ = arg(overlap) ∈ (-π, π]`. With `g > 0` the
//! dipole phase enters as `e^{-iφ_acc}`, so the reported `φ` is negative;
//! sweeps compare `|φ_unwrapped|` against the target.

mod direct;
mod modes;
mod radial;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::interaction::{GateGeometry, InteractionError, InteractionSpec, PhaseField, Potential};
use crate::mathcore::{gauss_hermite_rule, MathError, DEFAULT_ORDER, MAX_ORDER};
use crate::twophoton::{relative_density, PulsePair};

pub use direct::{overlap_tensor_3d, overlap_tensor_6d};
pub use modes::{
    mode_mix_tensor, relative_mode_integrals, schmidt_spectrum, transfer_coefficient,
    ModeMixTensor, SchmidtSpectrum, DEFAULT_MAX_ORDER, MAX_MODE_ORDER,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GateError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("overlap not converged to the requested tolerance; best estimate {best} (spread {err:.3e})")]
    NotConverged { best: Complex64, err: f64 },
    #[error("fidelity {fidelity} exceeds 1 beyond the quadrature tolerance")]
    Inconsistent { fidelity: f64 },
    #[error("mode tensor is identically zero")]
    ZeroTensor,
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error(transparent)]
    Math(#[from] MathError),
}

impl GateError {
    pub fn is_numerical(&self) -> bool {
        match self {
            GateError::NotConverged { .. } | GateError::Inconsistent { .. } => true,
            GateError::Math(e) => e.is_numerical(),
            GateError::Interaction(InteractionError::Quadrature(e)) => e.is_numerical(),
            _ => false,
        }
    }
}

/// Overlap, fidelity and phase of one gate configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateResult {
    pub overlap: Complex64,
    pub fidelity: f64,
    /// `arg(overlap)` in `(-π, π]`.
    pub phase: f64,
    /// Continuous phase, set when the result comes out of a sweep.
    pub phase_unwrapped: Option<f64>,
    pub err_estimate: f64,
    pub geometry: GateGeometry,
    pub spec: InteractionSpec,
}

impl GateResult {
    pub fn from_overlap(
        overlap: Complex64,
        err_estimate: f64,
        geometry: GateGeometry,
        spec: InteractionSpec,
    ) -> Self {
        Self {
            overlap,
            fidelity: overlap.norm_sqr(),
            phase: principal_arg(overlap),
            phase_unwrapped: None,
            err_estimate,
            geometry,
            spec,
        }
    }
}

/// `arg z` mapped into `(-π, π]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Numerical controls for [`fidelity_phase_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityOptions {
    /// Absolute tolerance on the complex overlap.
    pub tol: f64,
    /// Gauss-Hermite order of the first longitudinal pass; doubled until two
    /// successive passes agree to `tol`.
    pub initial_order: usize,
}

impl FidelityOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            initial_order: DEFAULT_ORDER,
        }
    }
}

/// The gate overlap `∫ d³x' ρ(x') e^{-iφ(z'+l, x'_T)}` over the Gaussian law
/// of the relative coordinate.
///
/// The transverse plane is integrated in polar form around the origin (the
/// phase depends on `|x_T|` only), with the singular core handled in
/// `u = 1/ρ²`; the longitudinal axis uses Gauss-Hermite nodes, certified by
/// order doubling.
pub fn fidelity_phase(pair: &PulsePair, spec: &InteractionSpec, tol: f64) -> Result<GateResult, GateError> {
    fidelity_phase_with(pair, spec, &FidelityOptions::new(tol))
}

pub fn fidelity_phase_with(
    pair: &PulsePair,
    spec: &InteractionSpec,
    opts: &FidelityOptions,
) -> Result<GateResult, GateError> {
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(GateError::InvalidInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if opts.initial_order < 2 || opts.initial_order > MAX_ORDER {
        return Err(GateError::InvalidInput(format!(
            "initial order {} outside 2..={MAX_ORDER}",
            opts.initial_order
        )));
    }
    let field = PhaseField::new(*spec, pair.geometry)?;
    if !field.is_radial() {
        return Err(GateError::Unsupported(
            "the anisotropic dipole has no azimuthal symmetry; use the propagator or the tensor overlap".into(),
        ));
    }

    let mut order = opts.initial_order;
    let (mut prev, mut prev_err) = reduced_overlap(&field, pair, order, opts.tol)?;
    loop {
        let next_order = 2 * order;
        if next_order > MAX_ORDER {
            return Err(GateError::NotConverged {
                best: prev,
                err: prev_err,
            });
        }
        let (cur, cur_err) = reduced_overlap(&field, pair, next_order, opts.tol)?;
        let spread = (cur - prev).norm();
        if spread <= opts.tol {
            let result = GateResult::from_overlap(cur, spread + cur_err, pair.geometry, *spec);
            if result.fidelity > 1.0 + 10.0 * opts.tol {
                return Err(GateError::Inconsistent {
                    fidelity: result.fidelity,
                });
            }
            return Ok(result);
        }
        prev = cur;
        prev_err = cur_err;
        order = next_order;
    }
}

/// One pass of the reduced integral at a fixed longitudinal order.
fn reduced_overlap(
    field: &PhaseField,
    pair: &PulsePair,
    order: usize,
    tol: f64,
) -> Result<(Complex64, f64), GateError> {
    let sigma = pair.geometry.sigma;
    let (mean, _) = relative_density(pair).scaled(sigma);
    let r = -mean[0];
    let l = pair.geometry.l_scaled();
    let core = match field.spec.potential {
        Potential::ContactRegularized { epsilon } => radial::Core::Smooth {
            scale: epsilon / sigma,
        },
        _ => radial::Core::Singular,
    };

    // the phase is even in z' about the crossing centre, so fold the rule
    let nodes: Vec<(f64, f64)> = if matches!(field.spec.potential, Potential::DipoleSimplified) {
        vec![(0.0, 1.0)]
    } else {
        let rule = gauss_hermite_rule(order)?;
        let pts: Vec<(f64, f64)> = rule.normal_points(0.0, 1.0).collect();
        let n = pts.len();
        let mut folded: Vec<(f64, f64)> = (0..n / 2).map(|i| (pts[i].0, 2.0 * pts[i].1)).collect();
        if n % 2 == 1 {
            folded.push((0.0, pts[n / 2].1));
        }
        folded
    };

    let parts: Vec<Result<radial::Radial, MathError>> = nodes
        .par_iter()
        .map(|&(z, _)| {
            let psi = |rho: f64| field.radial_phase_scaled(z + l, rho).unwrap_or(f64::NAN);
            radial::radial_overlap(psi, r, core, tol)
        })
        .collect();
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for ((_, w), part) in nodes.iter().zip(parts) {
        let part = part?;
        value += part.value * w;
        err += part.err * w;
    }
    Ok((value, err))
}

#[cfg(test)]
mod tests;
