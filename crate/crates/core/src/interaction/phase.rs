use std::f64::consts::{PI, SQRT_2};

use crate::mathcore::{gaussian_interval_mass, integrate_adaptive, AdaptiveOptions, MathError};

use super::{GateGeometry, InteractionError, InteractionSpec, Potential};

fn check_rho(rho: f64) -> Result<(), InteractionError> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(InteractionError::NonPositiveDistance(rho))
    }
}

/// `B(s) - sgn(s)` for `|s| ≥ ρ`, where `B(s) = (s³ + 2sρ²)/(s² + ρ²)^{3/2}`.
fn bracket_excess(s: f64, rho: f64) -> f64 {
    let t = (rho / s) * (rho / s);
    let a = (1.0 + t).sqrt();
    t * (a - t) / ((1.0 + a) * a * a * a)
}

fn bracket(s: f64, rho: f64) -> f64 {
    if s.abs() < rho {
        let r2 = s * s + rho * rho;
        s * (s * s + 2.0 * rho * rho) / (r2 * r2.sqrt())
    } else {
        s.signum() * (1.0 + bracket_excess(s, rho))
    }
}

/// `B(s_hi) - B(s_lo)` for the dipole antiderivative `B/ρ²`, free of
/// cancellation when both arguments lie far out on the same side.
pub(crate) fn dipole_bracket(s_hi: f64, s_lo: f64, rho: f64) -> f64 {
    if s_hi.abs() >= rho && s_lo.abs() >= rho && s_hi.signum() == s_lo.signum() {
        s_hi.signum() * (bracket_excess(s_hi, rho) - bracket_excess(s_lo, rho))
    } else {
        bracket(s_hi, rho) - bracket(s_lo, rho)
    }
}

/// Accumulated phase of the transverse-aligned dipole potential,
/// `gσ²/ρ² · [B(z) - B(z - 2l)]` with `B(s) = (s³ + 2sρ²)/(s² + ρ²)^{3/2}`.
///
/// `z` and `rho_t` are lengths in the same unit as the geometry.
pub fn accumulated_phase_dipole(
    z: f64,
    rho_t: f64,
    geometry: &GateGeometry,
    g: f64,
) -> Result<f64, InteractionError> {
    check_rho(rho_t)?;
    let s = geometry.sigma;
    Ok(dipole_phase_scaled(z / s, rho_t / s, geometry.l_scaled(), g))
}

pub(crate) fn dipole_phase_scaled(z: f64, rho: f64, l: f64, g: f64) -> f64 {
    g / (rho * rho) * dipole_bracket(z, z - 2.0 * l, rho)
}

/// Far-field dipole phase magnitude `2gσ²/ρ_T²`; it enters overlaps as
/// `e^{-i·phase}`.
pub fn simplified_phase(rho_t: f64, g: f64, geometry: &GateGeometry) -> Result<f64, InteractionError> {
    check_rho(rho_t)?;
    let rho = rho_t / geometry.sigma;
    Ok(2.0 * g / (rho * rho))
}

/// Phase of the contact potential with `δ³` replaced by an isotropic
/// Gaussian of width `epsilon`:
/// `u/(2πε²) e^{-ρ²/2ε²} [Φ(z/ε) - Φ((z - 2l)/ε)]` in `σ` units.
pub fn contact_phase_regularized(
    z: f64,
    x_t: [f64; 2],
    geometry: &GateGeometry,
    u: f64,
    epsilon: f64,
) -> Result<f64, InteractionError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(InteractionError::InvalidSpec(format!(
            "regularization width must be positive, got {epsilon}"
        )));
    }
    let s = geometry.sigma;
    let (z, e) = (z / s, epsilon / s);
    let rho2 = (x_t[0] * x_t[0] + x_t[1] * x_t[1]) / (s * s);
    let l = geometry.l_scaled();
    Ok(contact_increment_scaled(z - 2.0 * l, z, rho2, u, e))
}

fn contact_increment_scaled(s_lo: f64, s_hi: f64, rho2: f64, u: f64, e: f64) -> f64 {
    let transverse = (-0.5 * rho2 / (e * e)).exp() / (2.0 * PI * e * e);
    let (lo, hi, sign) = if s_hi >= s_lo {
        (s_lo, s_hi, 1.0)
    } else {
        (s_hi, s_lo, -1.0)
    };
    sign * u * transverse * gaussian_interval_mass(lo / e, hi / e)
}

/// Brute-force phase: adaptive quadrature of the moving potential,
/// `∫₀^{l/v} Δ(x_T, z - 2v(l/v - t')) dt'`, for any interaction kind.
pub fn numeric_line_phase(
    spec: &InteractionSpec,
    geometry: &GateGeometry,
    z: f64,
    x_t: [f64; 2],
    rel_tol: f64,
) -> Result<f64, InteractionError> {
    spec.validate()?;
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(MathError::InvalidTolerance(rel_tol).into());
    }
    let s = geometry.sigma;
    let x_t = [x_t[0] / s, x_t[1] / s];
    let z = z / s;
    let spec = match spec.potential {
        Potential::ContactRegularized { epsilon } => InteractionSpec::contact(spec.strength, epsilon / s),
        _ => *spec,
    };
    numeric_increment_scaled(&spec, geometry.l_scaled(), z - 2.0 * geometry.l_scaled(), z, x_t, rel_tol)
}

fn numeric_increment_scaled(
    spec: &InteractionSpec,
    l: f64,
    s_lo: f64,
    s_hi: f64,
    x_t: [f64; 2],
    rel_tol: f64,
) -> Result<f64, InteractionError> {
    let rho = x_t[0].hypot(x_t[1]);
    let width = match spec.potential {
        Potential::ContactRegularized { epsilon } => epsilon,
        _ => {
            check_rho(rho)?;
            rho
        }
    };
    if spec.strength == 0.0 || s_lo == s_hi {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if s_hi > s_lo {
        (s_lo, s_hi, 1.0)
    } else {
        (s_hi, s_lo, -1.0)
    };

    // the density is concentrated within a few widths of s = 0
    let mut cuts = vec![lo];
    for c in [-5.0, -SQRT_2, 0.0, SQRT_2, 5.0] {
        let p = c * width;
        if p > lo && p < hi {
            cuts.push(p);
        }
    }
    cuts.push(hi);

    let density = |s: f64| spec.line_density(x_t, s, l);
    let scale = cuts
        .iter()
        .map(|&p| density(p).abs())
        .fold(density(0.0f64.clamp(lo, hi)).abs(), f64::max)
        * width.min(hi - lo);
    let opts = AdaptiveOptions {
        rel_tol,
        abs_tol: 1e-3 * rel_tol * scale / (cuts.len() - 1) as f64,
        ..AdaptiveOptions::relative(rel_tol)
    };
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let q = integrate_adaptive(density, w[0], w[1], &opts).map_err(|(_, e)| e)?;
        total += q.value;
    }
    Ok(sign * total)
}

/// The accumulated phase `φ(z, x_T)` of one interaction in one geometry.
///
/// Public methods take lengths in geometry units; the `*_scaled` methods
/// used by the solvers take lengths in units of `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseField {
    pub spec: InteractionSpec,
    pub geometry: GateGeometry,
}

const ANISOTROPIC_TOL: f64 = 1e-11;

impl PhaseField {
    pub fn new(spec: InteractionSpec, geometry: GateGeometry) -> Result<Self, InteractionError> {
        spec.validate()?;
        Ok(Self { spec, geometry })
    }

    /// `φ(z, x_T)` at the end of the crossing.
    pub fn eval(&self, z: f64, x_t: [f64; 2]) -> Result<f64, InteractionError> {
        let s = self.geometry.sigma;
        self.phase_scaled(z / s, [x_t[0] / s, x_t[1] / s])
    }

    /// True when `φ` depends on `x_T` only through `|x_T|`.
    pub fn is_radial(&self) -> bool {
        self.spec.has_closed_form()
    }

    pub(crate) fn phase_scaled(&self, z: f64, x_t: [f64; 2]) -> Result<f64, InteractionError> {
        let l = self.geometry.l_scaled();
        self.increment_scaled(z - 2.0 * l, z, x_t)
    }

    /// Closed-form `φ(z, ρ)` (lengths in `σ`) for the azimuthally symmetric
    /// kinds; `None` for the anisotropic dipole. No argument checks.
    pub(crate) fn radial_phase_scaled(&self, z: f64, rho: f64) -> Option<f64> {
        let g = self.spec.strength;
        let l = self.geometry.l_scaled();
        match self.spec.potential {
            Potential::Dipole { .. } if !self.spec.has_closed_form() => None,
            Potential::Dipole { .. } => Some(dipole_phase_scaled(z, rho, l, g)),
            Potential::DipoleSimplified => Some(2.0 * g / (rho * rho)),
            Potential::ContactRegularized { epsilon } => Some(contact_increment_scaled(
                z - 2.0 * l,
                z,
                rho * rho,
                g,
                epsilon / self.geometry.sigma,
            )),
        }
    }

    /// Phase picked up while the longitudinal relative coordinate moves from
    /// `s_lo` to `s_hi` (lengths in `σ`).
    pub(crate) fn increment_scaled(
        &self,
        s_lo: f64,
        s_hi: f64,
        x_t: [f64; 2],
    ) -> Result<f64, InteractionError> {
        let g = self.spec.strength;
        let rho2 = x_t[0] * x_t[0] + x_t[1] * x_t[1];
        let l = self.geometry.l_scaled();
        match self.spec.potential {
            Potential::Dipole { .. } if !self.spec.has_closed_form() => {
                numeric_increment_scaled(&self.spec, l, s_lo, s_hi, x_t, ANISOTROPIC_TOL)
            }
            Potential::Dipole { .. } => {
                let rho = rho2.sqrt();
                check_rho(rho)?;
                Ok(g / rho2 * dipole_bracket(s_hi, s_lo, rho))
            }
            Potential::DipoleSimplified => {
                check_rho(rho2.sqrt())?;
                Ok(g * (s_hi - s_lo) / (rho2 * l))
            }
            Potential::ContactRegularized { epsilon } => {
                Ok(contact_increment_scaled(s_lo, s_hi, rho2, g, epsilon / self.geometry.sigma))
            }
        }
    }

    /// Phase per unit longitudinal length at `(x_T, s)`, in `σ` units.
    pub(crate) fn line_density_scaled(&self, x_t: [f64; 2], s: f64) -> f64 {
        let spec = match self.spec.potential {
            Potential::ContactRegularized { epsilon } => InteractionSpec::contact(
                self.spec.strength,
                epsilon / self.geometry.sigma,
            ),
            _ => self.spec,
        };
        spec.line_density(x_t, s, self.geometry.l_scaled())
    }

    /// The same field at the primed (post-crossing) coordinate `z' = z - l`.
    pub fn at_primed(&self, z_primed: f64, x_t: [f64; 2]) -> Result<f64, InteractionError> {
        self.eval(z_primed + self.geometry.l, x_t)
    }
}
