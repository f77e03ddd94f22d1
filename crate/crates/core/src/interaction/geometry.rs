use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::InteractionError;

/// Lengths and velocity of a gate configuration.
///
/// `sigma` is the transverse pulse width, `lambda` the carrier wavelength,
/// `l` the medium passage length, `v` the group velocity and `d` the
/// transverse offset between the two pulse paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateGeometry {
    pub sigma: f64,
    pub lambda: f64,
    pub l: f64,
    pub v: f64,
    pub d: f64,
}

impl GateGeometry {
    pub fn new(sigma: f64, lambda: f64, l: f64, v: f64, d: f64) -> Result<Self, InteractionError> {
        let positive = [("sigma", sigma), ("lambda", lambda), ("l", l), ("v", v)];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(InteractionError::InvalidGeometry(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if !(d.is_finite() && d >= 0.0) {
            return Err(InteractionError::InvalidGeometry(format!(
                "separation must be non-negative, got {d}"
            )));
        }
        Ok(Self {
            sigma,
            lambda,
            l,
            v,
            d,
        })
    }

    /// Builds a geometry from dimensionless ratios with `σ = v = 1`.
    pub fn from_ratios(
        sigma_over_lambda: f64,
        l_over_sigma: f64,
        separation: f64,
    ) -> Result<Self, InteractionError> {
        if !(sigma_over_lambda.is_finite() && sigma_over_lambda > 0.0) {
            return Err(InteractionError::InvalidGeometry(format!(
                "sigma/lambda must be positive, got {sigma_over_lambda}"
            )));
        }
        Self::new(1.0, 1.0 / sigma_over_lambda, l_over_sigma, 1.0, separation)
    }

    /// `σ = 10λ`, `l = 4πσ`, transverse separation `R = D/σ`.
    pub fn reference(separation: f64) -> Result<Self, InteractionError> {
        Self::from_ratios(10.0, 4.0 * PI, separation)
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self, InteractionError> {
        Self::new(self.sigma, self.lambda, self.l, self.v, separation * self.sigma)
    }

    /// Carrier wave number `k = 2π/λ`.
    pub fn k(&self) -> f64 {
        2.0 * PI / self.lambda
    }

    /// Rayleigh length `r = kσ²`.
    pub fn rayleigh_length(&self) -> f64 {
        self.k() * self.sigma * self.sigma
    }

    /// Diffraction ratio `l/r`.
    pub fn l_over_r(&self) -> f64 {
        self.l / self.rayleigh_length()
    }

    /// Dimensionless separation `R = D/σ`.
    pub fn separation(&self) -> f64 {
        self.d / self.sigma
    }

    /// `l/σ`.
    pub fn l_scaled(&self) -> f64 {
        self.l / self.sigma
    }

    /// `kσ`.
    pub fn k_scaled(&self) -> f64 {
        self.k() * self.sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_configuration_has_l_over_r_one_fifth() {
        let g = GateGeometry::reference(0.0).unwrap();
        assert!((g.l_over_r() - 0.2).abs() < 1e-15);
        assert!((g.k_scaled() - 20.0 * PI).abs() < 1e-12);
        let g = GateGeometry::new(3.0, 0.3, 12.0 * PI, 2.0, 78.0).unwrap();
        assert!((g.l_over_r() - 0.2).abs() < 1e-15);
        assert_eq!(g.separation(), 26.0);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(GateGeometry::new(0.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(GateGeometry::new(1.0, 1.0, -1.0, 1.0, 0.0).is_err());
        assert!(GateGeometry::new(1.0, 1.0, 1.0, 1.0, -0.5).is_err());
        assert!(GateGeometry::new(1.0, f64::NAN, 1.0, 1.0, 0.0).is_err());
    }
}
