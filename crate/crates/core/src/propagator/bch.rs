//! First-order interplay correction between the interaction phase and
//! diffraction.
//!
//! Writing `K = (c vT/k) ∇²_T` for the accumulated diffraction operator, the
//! leading correction factor is `exp(-½[φ, K])` with
//! `[φ, K] ξ = -(c vT/k)(∇²_T φ + 2∇_T φ·∇_T) ξ`. It is not a phase: it changes
//! the intensity profile of `ξ` and hence `F` as well as `φ`.
//!
//! Expanding the exact evolution one order further (Zassenhaus form with the
//! phase switched on gradually) adds a pointwise term `-(2i/3)(c vT/k)|∇_T φ|²`
//! of the same order in `l/r`; [`BchTerms::WithPhaseProfile`] includes it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::fft::{laplacian, Fft2};
use super::{accumulated_phase_on_grid, diffraction_rate, PropagatorError, RelativeWavefunction};
use crate::interaction::PhaseField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BchTerms {
    /// Only `-½[φ, K]`.
    Commutator,
    /// `-½[φ, K]` plus the `|∇φ|²` term.
    WithPhaseProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BchOptions {
    pub terms: BchTerms,
    /// Same meaning as in [`super::EvolveOptions`].
    pub diffraction_coefficient: f64,
    /// Cells with `|x_T| < mask_radius` (in `σ`) are left uncorrected.
    pub mask_radius: f64,
}

impl Default for BchOptions {
    fn default() -> Self {
        Self {
            terms: BchTerms::Commutator,
            diffraction_coefficient: 0.5,
            mask_radius: 0.0,
        }
    }
}

/// `ξ → ξ - ½[φ, K]ξ` (and optionally the `|∇φ|²` term), with `φ` the phase
/// of the crossing that starts at `xi.time` and spectral transverse
/// derivatives. The result is meant to be multiplied by `exp(-iφ)` afterwards.
pub fn bch_first_order_correct(
    xi: &RelativeWavefunction,
    field: &PhaseField,
    opts: &BchOptions,
) -> Result<RelativeWavefunction, PropagatorError> {
    if !(opts.mask_radius >= 0.0) || !opts.diffraction_coefficient.is_finite() {
        return Err(PropagatorError::InvalidOptions("mask radius and coefficient must be finite and non-negative".into()));
    }
    let at = diffraction_rate(xi, opts.diffraction_coefficient) * xi.geometry.l_scaled();
    if at == 0.0 || field.spec.strength == 0.0 {
        return Ok(xi.clone());
    }
    let phase = accumulated_phase_on_grid(xi, field)?;
    let grad2 = phase_gradient_squared(xi, field)?;
    let mask = transverse_mask(xi, opts.mask_radius);
    check_resolved(xi, &grad2, &mask)?;
    let profile = (opts.terms == BchTerms::WithPhaseProfile).then_some(&grad2[..]);
    Ok(correct_with_phase(xi, &phase, profile, at, &mask))
}

fn transverse_mask(xi: &RelativeWavefunction, radius: f64) -> Vec<bool> {
    let (xs, ys) = (xi.grid.coords(0), xi.grid.coords(1));
    xs.iter()
        .flat_map(|x| ys.iter().map(move |y| x * x + y * y >= radius * radius))
        .collect()
}

/// The phase must turn by less than `π` per cell where the correction acts.
fn check_resolved(xi: &RelativeWavefunction, grad2: &[f64], mask: &[bool]) -> Result<(), PropagatorError> {
    let h = xi.grid.spec.spacing(0).max(xi.grid.spec.spacing(1));
    let m = xi.grid.spec.slice_len();
    let (xs, ys) = (xi.grid.coords(0), xi.grid.coords(1));
    let ny = ys.len();
    for (i, g2) in grad2.iter().enumerate() {
        let c = i % m;
        if mask[c] && g2.sqrt() * h > std::f64::consts::PI {
            let (x, y) = (xs[c / ny], ys[c % ny]);
            return Err(PropagatorError::UnresolvedPhase { rho: x.hypot(y) });
        }
    }
    Ok(())
}

/// `|∇_T φ|²` per cell by fourth-order central differences of the field
/// itself (not of its samples).
fn phase_gradient_squared(xi: &RelativeWavefunction, field: &PhaseField) -> Result<Vec<f64>, PropagatorError> {
    let grid = xi.grid;
    let (xs, ys) = (grid.coords(0), grid.coords(1));
    let ny = ys.len();
    let m = grid.spec.slice_len();
    let (t0, t1) = (xi.time, xi.time + xi.geometry.l_scaled());
    let h = 0.25 * grid.spec.spacing(0).min(grid.spec.spacing(1));
    let slices: Vec<Vec<f64>> = (0..grid.spec.n[2])
        .into_par_iter()
        .map(|k| {
            let s = grid.coord(2, k);
            let phi = |x: f64, y: f64| field.increment_scaled(s + 2.0 * t0, s + 2.0 * t1, [x, y]);
            let d = |f: &dyn Fn(f64) -> Result<f64, _>| -> Result<f64, PropagatorError> {
                Ok((f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h))
            };
            (0..m)
                .map(|i| {
                    let (x, y) = (xs[i / ny], ys[i % ny]);
                    let gx = d(&|e| phi(x + e, y))?;
                    let gy = d(&|e| phi(x, y + e))?;
                    Ok(gx * gx + gy * gy)
                })
                .collect::<Result<Vec<f64>, PropagatorError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(slices.concat())
}

/// Applies the correction for a tabulated phase; `at = (c/kσ)·(l/σ)`.
pub(crate) fn correct_with_phase(
    xi: &RelativeWavefunction,
    phase: &[f64],
    grad2: Option<&[f64]>,
    at: f64,
    mask: &[bool],
) -> RelativeWavefunction {
    let grid = xi.grid;
    let [nx, ny, _] = grid.spec.n;
    let m = grid.spec.slice_len();
    let (qx, qy) = (grid.wave_numbers(0), grid.wave_numbers(1));
    let q2: Vec<f64> = (0..ny * nx).map(|i| qx[i % nx].powi(2) + qy[i / nx].powi(2)).collect();
    let fft = Fft2::new(nx, ny);
    let mut out = xi.clone();
    out.values
        .par_chunks_mut(m)
        .zip(phase.par_chunks(m))
        .enumerate()
        .for_each(|(k, (slice, phi))| {
            let lap_xi = laplacian(&fft, &q2, slice);
            let phi_xi: Vec<Complex64> = slice.iter().zip(phi).map(|(v, p)| v * p).collect();
            let lap_phi_xi = laplacian(&fft, &q2, &phi_xi);
            for i in 0..m {
                if !mask[i] {
                    continue;
                }
                // [φ, K]ξ = aT(φ∇²ξ - ∇²(φξ))
                let comm = at * (phi[i] * lap_xi[i] - lap_phi_xi[i]);
                let mut delta = -0.5 * comm;
                if let Some(g2) = grad2 {
                    delta -= Complex64::new(0.0, 2.0 / 3.0) * at * g2[k * m + i] * slice[i];
                }
                slice[i] += delta;
            }
        });
    out
}
