//! Split-step solution of the relative-coordinate equation
//!
//! `∂ξ/∂t + 2v ∂ξ/∂z + i c (v/k) ∇²_T ξ = -iΔ(x) ξ`
//!
//! with `c = 1/2` by default. In the frame moving with the wavepacket the
//! advection term drops out and every longitudinal slice evolves on its own:
//! a pointwise interaction phase, sampled where the slice sits at that time,
//! alternates with exact spectral diffraction (Strang splitting). Lengths are
//! in units of `σ` and time in `τ = vt/σ`, so the diffraction multiplier per
//! step is `exp(+i (c/kσ) q² Δτ)`.

mod bch;
pub mod dump;
mod fft;
mod grid;

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gatemetrics::GateResult;
use crate::interaction::{InteractionError, InteractionSpec, PhaseField};

pub use bch::{bch_first_order_correct, BchOptions, BchTerms};
pub use grid::{Grid, GridSpec, RelativeWavefunction, MAX_TAIL_MASS};

use fft::Fft2;

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid option: {0}")]
    InvalidOptions(String),
    #[error("grid too small: tail mass {mass:.3e} outside the box along axis {axis}")]
    GridTooSmall { axis: usize, mass: f64 },
    #[error("spectral power {fraction:.3e} near the Nyquist edge; refine the transverse grid")]
    Aliasing { fraction: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("phase gradient unresolved at |x_T| = {rho:.4}σ; set a small-radius mask")]
    UnresolvedPhase { rho: f64 },
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error("slice dump: {0}")]
    Io(#[from] std::io::Error),
    #[error("slice dump: {0}")]
    Format(String),
}

impl PropagatorError {
    pub fn is_numerical(&self) -> bool {
        match self {
            PropagatorError::GridTooSmall { .. }
            | PropagatorError::Aliasing { .. }
            | PropagatorError::UnresolvedPhase { .. } => true,
            PropagatorError::Interaction(InteractionError::Quadrature(e)) => e.is_numerical(),
            _ => false,
        }
    }
}

/// How the interaction phase of a half step is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseSampling {
    /// Closed-form increment over the half step. The anisotropic dipole has
    /// none and falls back to [`PhaseSampling::Midpoint`].
    Exact,
    /// Line density at the middle of the half step times its length.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolveOptions {
    pub steps: usize,
    pub include_diffraction: bool,
    /// `c` in `i c (v/k) ∇²_T`; `1/2` is the printed equation, `1` what a
    /// direct change of variables gives.
    pub diffraction_coefficient: f64,
    /// Largest phase applied to a cell in one half step; larger increments
    /// are cut to this value and the affected mass is reported.
    pub clamp: Option<f64>,
    pub sampling: PhaseSampling,
    /// Largest fraction of spectral power allowed in the outer third of the
    /// transverse band at the end of a run with diffraction.
    pub alias_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            steps: 256,
            include_diffraction: true,
            diffraction_coefficient: 0.5,
            clamp: Some(FRAC_PI_4),
            sampling: PhaseSampling::Exact,
            alias_tol: 0.05,
        }
    }
}

impl EvolveOptions {
    pub fn validate(&self) -> Result<(), PropagatorError> {
        if self.steps == 0 {
            return Err(PropagatorError::InvalidOptions("steps must be at least 1".into()));
        }
        if !self.diffraction_coefficient.is_finite() {
            return Err(PropagatorError::InvalidOptions("diffraction coefficient must be finite".into()));
        }
        if let Some(c) = self.clamp {
            if !(c > 0.0) {
                return Err(PropagatorError::InvalidOptions(format!("clamp must be positive, got {c}")));
            }
        }
        if !(self.alias_tol > 0.0) {
            return Err(PropagatorError::InvalidOptions("alias tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of [`split_step_evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: RelativeWavefunction,
    /// Initial `|ξ|²` mass of cells that hit the clamp at least once.
    pub clamped_mass: f64,
    /// `max |Σ|ξ|²ΔV - 1|` over all steps.
    pub max_norm_error: f64,
    /// Fraction of the final spectral power beyond two thirds of Nyquist.
    pub edge_fraction: f64,
}

/// `a = c/(kσ)`, the diffraction rate per unit `τ`.
pub(crate) fn diffraction_rate(state: &RelativeWavefunction, coefficient: f64) -> f64 {
    coefficient / state.geometry.k_scaled()
}

/// Evolves `xi0` across the full crossing time `l/v`.
pub fn split_step_evolve(
    xi0: &RelativeWavefunction,
    spec: &InteractionSpec,
    opts: &EvolveOptions,
) -> Result<Evolution, PropagatorError> {
    opts.validate()?;
    let field = PhaseField::new(*spec, xi0.geometry)?;
    let grid = xi0.grid;
    let total = xi0.geometry.l_scaled();
    let a = if opts.include_diffraction {
        diffraction_rate(xi0, opts.diffraction_coefficient)
    } else {
        0.0
    };
    grid::check_tails(&grid.spec, 1.0 + (a * (xi0.time + total)).powi(2))?;

    let [nx, ny, _] = grid.spec.n;
    let dt = total / opts.steps as f64;
    let (xs, ys) = (grid.coords(0), grid.coords(1));
    let (qx, qy) = (grid.wave_numbers(0), grid.wave_numbers(1));
    let multiplier: Vec<Complex64> = (0..ny * nx)
        .map(|i| Complex64::from_polar(1.0, a * (qx[i % nx].powi(2) + qy[i / nx].powi(2)) * dt))
        .collect();
    let sampling = if field.is_radial() {
        opts.sampling
    } else {
        PhaseSampling::Midpoint
    };
    let ctx = SliceContext {
        field: &field,
        xs: &xs,
        ys: &ys,
        tau0: xi0.time,
        dt,
        steps: opts.steps,
        clamp: opts.clamp,
        sampling,
        fft: Fft2::new(nx, ny),
        multiplier: opts.include_diffraction.then_some(&multiplier[..]),
        interacting: spec.strength != 0.0,
        dv: grid.spec.cell_volume(),
    };

    let mut values = xi0.values.clone();
    let reports: Vec<SliceReport> = values
        .par_chunks_mut(grid.spec.slice_len())
        .enumerate()
        .map(|(k, slice)| ctx.evolve(grid.coord(2, k), slice))
        .collect::<Result<_, _>>()?;

    let mut norms = vec![0.0; opts.steps];
    let (mut clamped_mass, mut edge, mut power) = (0.0, 0.0, 0.0);
    for r in &reports {
        norms.iter_mut().zip(&r.norms).for_each(|(n, v)| *n += v);
        clamped_mass += r.clamped_mass;
        edge += r.edge_power;
        power += r.power;
    }
    let max_norm_error = norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    let edge_fraction = if power > 0.0 { edge / power } else { 0.0 };
    if opts.include_diffraction && edge_fraction > opts.alias_tol {
        return Err(PropagatorError::Aliasing {
            fraction: edge_fraction,
        });
    }
    Ok(Evolution {
        state: RelativeWavefunction {
            grid,
            values,
            time: xi0.time + total,
            geometry: xi0.geometry,
            spec: Some(*spec),
        },
        clamped_mass,
        max_norm_error,
        edge_fraction,
    })
}

struct SliceContext<'a> {
    field: &'a PhaseField,
    xs: &'a [f64],
    ys: &'a [f64],
    tau0: f64,
    dt: f64,
    steps: usize,
    clamp: Option<f64>,
    sampling: PhaseSampling,
    fft: Fft2,
    multiplier: Option<&'a [Complex64]>,
    interacting: bool,
    dv: f64,
}

struct SliceReport {
    norms: Vec<f64>,
    clamped_mass: f64,
    edge_power: f64,
    power: f64,
}

impl SliceContext<'_> {
    fn evolve(&self, s: f64, slice: &mut [Complex64]) -> Result<SliceReport, PropagatorError> {
        let initial: Vec<f64> = slice.iter().map(|v| v.norm_sqr()).collect();
        let mut clamped = vec![false; slice.len()];
        let mut spectrum = vec![Complex64::new(0.0, 0.0); slice.len()];
        let mut norms = Vec::with_capacity(self.steps);
        for j in 0..self.steps {
            let t0 = self.tau0 + j as f64 * self.dt;
            let tm = t0 + 0.5 * self.dt;
            self.kick(s, t0, tm, slice, &mut clamped)?;
            if let Some(mult) = self.multiplier {
                self.fft.forward(slice, &mut spectrum);
                spectrum.iter_mut().zip(mult).for_each(|(v, m)| *v *= m);
                self.fft.inverse(&mut spectrum, slice);
            }
            self.kick(s, tm, t0 + self.dt, slice, &mut clamped)?;
            norms.push(slice.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dv);
        }
        let clamped_mass = initial
            .iter()
            .zip(&clamped)
            .filter(|(_, &c)| c)
            .map(|(m, _)| m)
            .sum::<f64>()
            * self.dv;
        let (edge_power, power) = self.edge_power(slice, &mut spectrum);
        Ok(SliceReport {
            norms,
            clamped_mass,
            edge_power,
            power,
        })
    }

    /// Multiplies by `exp(-iΔφ)` for the motion between `ta` and `tb`.
    fn kick(
        &self,
        s: f64,
        ta: f64,
        tb: f64,
        slice: &mut [Complex64],
        clamped: &mut [bool],
    ) -> Result<(), PropagatorError> {
        if !self.interacting {
            return Ok(());
        }
        let ny = self.ys.len();
        for (i, v) in slice.iter_mut().enumerate() {
            let x_t = [self.xs[i / ny], self.ys[i % ny]];
            let mut inc = match self.sampling {
                PhaseSampling::Exact => self.field.increment_scaled(s + 2.0 * ta, s + 2.0 * tb, x_t)?,
                PhaseSampling::Midpoint => {
                    self.field.line_density_scaled(x_t, s + ta + tb) * 2.0 * (tb - ta)
                }
            };
            if let Some(c) = self.clamp {
                if inc.abs() > c {
                    inc = c.copysign(inc);
                    clamped[i] = true;
                }
            }
            *v *= Complex64::from_polar(1.0, -inc);
        }
        Ok(())
    }

    fn edge_power(&self, slice: &[Complex64], spectrum: &mut [Complex64]) -> (f64, f64) {
        let mut work = slice.to_vec();
        self.fft.forward(&mut work, spectrum);
        let nx = self.xs.len();
        let ny = self.ys.len();
        let outer = |j: usize, n: usize| {
            let j = j.min(n - j);
            3 * j > n
        };
        let (mut edge, mut total) = (0.0, 0.0);
        for (i, v) in spectrum.iter().enumerate() {
            let p = v.norm_sqr();
            total += p;
            if outer(i % nx, nx) || outer(i / nx, ny) {
                edge += p;
            }
        }
        (edge, total)
    }
}

/// `ξ · exp(-iφ)` with the full accumulated phase of the crossing and no
/// diffraction: the phase-only output on the propagator grid.
pub fn phase_only_output(
    xi: &RelativeWavefunction,
    spec: &InteractionSpec,
) -> Result<RelativeWavefunction, PropagatorError> {
    let field = PhaseField::new(*spec, xi.geometry)?;
    let phase = accumulated_phase_on_grid(xi, &field)?;
    let mut out = xi.clone();
    out.values
        .iter_mut()
        .zip(&phase)
        .for_each(|(v, &p)| *v *= Complex64::from_polar(1.0, -p));
    out.time += xi.geometry.l_scaled();
    out.spec = Some(*spec);
    Ok(out)
}

/// Phase each cell collects over the crossing that starts at `xi.time`.
pub(crate) fn accumulated_phase_on_grid(
    xi: &RelativeWavefunction,
    field: &PhaseField,
) -> Result<Vec<f64>, PropagatorError> {
    let grid = xi.grid;
    let (xs, ys) = (grid.coords(0), grid.coords(1));
    let ny = ys.len();
    let t0 = xi.time;
    let t1 = t0 + xi.geometry.l_scaled();
    let m = grid.spec.slice_len();
    let slices: Vec<Vec<f64>> = (0..grid.spec.n[2])
        .into_par_iter()
        .map(|k| {
            let s = grid.coord(2, k);
            (0..m)
                .map(|i| field.increment_scaled(s + 2.0 * t0, s + 2.0 * t1, [xs[i / ny], ys[i % ny]]))
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(slices.concat())
}

/// Gate overlap `Σ conj(ξ_free) ξ_int ΔV` between two runs that differ only
/// in the interaction.
pub fn overlap_against_free(
    xi_int: &RelativeWavefunction,
    xi_free: &RelativeWavefunction,
) -> Result<GateResult, PropagatorError> {
    let overlap = xi_free.inner(xi_int)?;
    let err = (xi_int.norm_squared() - 1.0).abs() + (xi_free.norm_squared() - 1.0).abs();
    let spec = xi_int.spec.unwrap_or_else(|| InteractionSpec::dipole(0.0));
    Ok(GateResult::from_overlap(overlap, err, xi_int.geometry, spec))
}
