//! Unreduced tensor-product evaluations of the gate overlap, used to check
//! the polar reduction.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::GateError;
use crate::interaction::{InteractionSpec, PhaseField};
use crate::mathcore::{gauss_hermite_rule, tensor_gaussian_integral};
use crate::twophoton::{relative_density, PulsePair};

fn masked(field: &PhaseField, z: f64, x_t: [f64; 2]) -> Complex64 {
    match field.phase_scaled(z, x_t) {
        Ok(phi) => Complex64::from_polar(1.0, -phi),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

/// `∫ d³x' ρ(x') e^{-iφ}` by an `order³` Gauss-Hermite tensor rule over the
/// relative-coordinate law. Only accurate where the phase is smooth on the
/// scale of the node spacing.
pub fn overlap_tensor_3d(pair: &PulsePair, spec: &InteractionSpec, order: usize) -> Result<Complex64, GateError> {
    let field = PhaseField::new(*spec, pair.geometry)?;
    let rule = gauss_hermite_rule(order)?;
    let (mean, std) = relative_density(pair).scaled(pair.geometry.sigma);
    let l = pair.geometry.l_scaled();
    Ok(tensor_gaussian_integral(&rule, &mean, &std, |x| {
        masked(&field, x[2] + l, [x[0], x[1]])
    })?)
}

/// The six-dimensional form: both photons' intensity profiles (each of
/// variance `σ²/2` per axis, in their post-crossing frames) with the phase of
/// their difference. No reduction to the relative coordinate is made.
pub fn overlap_tensor_6d(pair: &PulsePair, spec: &InteractionSpec, order: usize) -> Result<Complex64, GateError> {
    let field = PhaseField::new(*spec, pair.geometry)?;
    let rule = gauss_hermite_rule(order)?;
    let d = pair.geometry.separation();
    let l = pair.geometry.l_scaled();
    let means = [0.0, 0.0, 0.0, d, 0.0, 0.0];
    let stds = [FRAC_1_SQRT_2; 6];
    Ok(tensor_gaussian_integral(&rule, &means, &stds, |x| {
        masked(&field, x[2] - x[5] + l, [x[0] - x[3], x[1] - x[4]])
    })?)
}
