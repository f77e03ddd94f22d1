use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::InteractionError;

/// Angular model of the dipole-dipole potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum DipoleModel {
    /// Azimuthally symmetric form whose line integral is the closed-form
    /// accumulated phase: the transverse displacement is taken along the
    /// (transverse) field, `Δ/C = (2ρ² - z²)/|x|⁵`.
    Aligned,
    /// `Δ/C = (1 - 3cos²ϑ)/|x|³` with `ϑ` measured from `orientation`.
    /// Only the numeric line integral and the propagator can use it.
    Anisotropic { orientation: [f64; 3] },
}

/// Which potential acts between the photons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    Dipole { model: DipoleModel },
    /// Far-field phase `2gσ²/ρ_T²`, independent of `z`.
    DipoleSimplified,
    /// `V₀ δ³` smeared into an isotropic Gaussian of width `epsilon`
    /// (same length unit as the geometry).
    ContactRegularized { epsilon: f64 },
}

/// A potential together with its dimensionless strength, `g = C/(2vσ²)` for
/// the dipole kinds and `u = V₀/(2vσ²)` for the contact kind.
///
/// Negative strengths are accepted: they conjugate every phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub potential: Potential,
    pub strength: f64,
}

impl InteractionSpec {
    pub fn dipole(g: f64) -> Self {
        Self {
            potential: Potential::Dipole {
                model: DipoleModel::Aligned,
            },
            strength: g,
        }
    }

    pub fn dipole_anisotropic(g: f64, orientation: [f64; 3]) -> Result<Self, InteractionError> {
        let norm = orientation.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(InteractionError::InvalidSpec(
                "field orientation must be a non-zero vector".into(),
            ));
        }
        let orientation = orientation.map(|c| c / norm);
        Ok(Self {
            potential: Potential::Dipole {
                model: DipoleModel::Anisotropic { orientation },
            },
            strength: g,
        })
    }

    pub fn simplified(g: f64) -> Self {
        Self {
            potential: Potential::DipoleSimplified,
            strength: g,
        }
    }

    pub fn contact(u: f64, epsilon: f64) -> Self {
        Self {
            potential: Potential::ContactRegularized { epsilon },
            strength: u,
        }
    }

    pub fn with_strength(&self, strength: f64) -> Self {
        Self { strength, ..*self }
    }

    pub fn validate(&self) -> Result<(), InteractionError> {
        if !self.strength.is_finite() {
            return Err(InteractionError::InvalidSpec(format!(
                "strength must be finite, got {}",
                self.strength
            )));
        }
        match self.potential {
            Potential::ContactRegularized { epsilon } if !(epsilon.is_finite() && epsilon > 0.0) => {
                Err(InteractionError::InvalidSpec(format!(
                    "regularization width must be positive, got {epsilon}"
                )))
            }
            Potential::Dipole {
                model: DipoleModel::Anisotropic { orientation },
            } => {
                let n = orientation.iter().map(|c| c * c).sum::<f64>().sqrt();
                if (n - 1.0).abs() > 1e-12 {
                    return Err(InteractionError::InvalidSpec(format!(
                        "field orientation must be a unit vector (norm {n})"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// True when the phase field has a closed form (everything except the
    /// anisotropic dipole).
    pub fn has_closed_form(&self) -> bool {
        !matches!(
            self.potential,
            Potential::Dipole {
                model: DipoleModel::Anisotropic { .. }
            }
        )
    }

    /// Phase density along the longitudinal relative coordinate, in `σ`
    /// units: `φ = ∫ density(x_T, s) ds` over the swept interval.
    /// `l_scaled` is only used by the simplified kind, whose total phase is
    /// spread evenly over the `2l` sweep.
    pub(crate) fn line_density(&self, x_t: [f64; 2], s: f64, l_scaled: f64) -> f64 {
        let rho2 = x_t[0] * x_t[0] + x_t[1] * x_t[1];
        let str = self.strength;
        match self.potential {
            Potential::Dipole {
                model: DipoleModel::Aligned,
            } => {
                let r2 = rho2 + s * s;
                str * (2.0 * rho2 - s * s) / (r2 * r2 * r2.sqrt())
            }
            Potential::Dipole {
                model: DipoleModel::Anisotropic { orientation },
            } => {
                let x = [x_t[0], x_t[1], s];
                str * dipole_potential(x, orientation).unwrap_or(f64::INFINITY)
            }
            Potential::DipoleSimplified => str * 2.0 / rho2 / (2.0 * l_scaled),
            Potential::ContactRegularized { epsilon } => {
                let r2 = rho2 + s * s;
                let e2 = epsilon * epsilon;
                str * (-0.5 * r2 / e2).exp() / (2.0 * PI * e2).powf(1.5)
            }
        }
    }
}

/// `(1 - 3cos²ϑ)/|x|³` with `cosϑ = x·n/|x|`; multiply by `C` for the
/// frequency shift.
pub fn dipole_potential(x: [f64; 3], orientation: [f64; 3]) -> Result<f64, InteractionError> {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    if !(r2 > 0.0) {
        return Err(InteractionError::Singular);
    }
    let dot = x[0] * orientation[0] + x[1] * orientation[1] + x[2] * orientation[2];
    let cos2 = dot * dot / r2;
    Ok((1.0 - 3.0 * cos2) / (r2 * r2.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const XHAT: [f64; 3] = [1.0, 0.0, 0.0];

    #[test]
    fn angular_factor() {
        assert!((dipole_potential([2.0, 0.0, 0.0], XHAT).unwrap() + 2.0 / 8.0).abs() < 1e-15);
        assert!((dipole_potential([0.0, 0.0, 2.0], XHAT).unwrap() - 1.0 / 8.0).abs() < 1e-15);
        let c = 1.0 / 3f64.sqrt();
        let s = (2.0f64 / 3.0).sqrt();
        assert!(dipole_potential([c, s, 0.0], XHAT).unwrap().abs() < 1e-15);
        assert_eq!(dipole_potential([0.0; 3], XHAT), Err(InteractionError::Singular));
    }

    #[test]
    fn aligned_density_is_anisotropic_along_field_up_to_sign() {
        let spec = InteractionSpec::dipole(1.0);
        let aniso = InteractionSpec::dipole_anisotropic(1.0, [1.0, 0.0, 0.0]).unwrap();
        for (x, s) in [(0.7, 0.3), (2.0, -1.1), (0.2, 5.0)] {
            let a = spec.line_density([x, 0.0], s, 4.0);
            let b = aniso.line_density([x, 0.0], s, 4.0);
            assert!((a + b).abs() < 1e-12 * a.abs().max(1e-12));
        }
    }

    #[test]
    fn validation() {
        assert!(InteractionSpec::contact(1.0, 0.0).validate().is_err());
        assert!(InteractionSpec::dipole(f64::NAN).validate().is_err());
        assert!(InteractionSpec::dipole_anisotropic(1.0, [0.0; 3]).is_err());
        let s = InteractionSpec::dipole_anisotropic(1.0, [0.0, 3.0, 4.0]).unwrap();
        assert!(s.validate().is_ok());
        assert!(!s.has_closed_form());
        assert!(InteractionSpec::dipole(-2.0).validate().is_ok());
    }
}
