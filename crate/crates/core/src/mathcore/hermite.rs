use std::f64::consts::PI;

use super::MathError;

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{n+1} = 2x H_n - 2n H_{n-1}`.
///
/// Fails with [`MathError::Overflow`] instead of returning an infinity.
pub fn hermite_poly(n: usize, x: f64) -> Result<f64, MathError> {
    if !x.is_finite() {
        return Err(MathError::NonFinite(x));
    }
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(MathError::Overflow { n, x });
        }
    }
    if !cur.is_finite() {
        return Err(MathError::Overflow { n, x });
    }
    Ok(cur)
}

/// `ln` of the Hermite-Gaussian normalization `[1/(σ√π 2ⁿ n!)]^{1/2}`.
pub fn log_mode_normalization(n: usize, sigma: f64) -> f64 {
    let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    -0.5 * (sigma.ln() + 0.5 * PI.ln() + n as f64 * std::f64::consts::LN_2 + ln_fact)
}

/// Normalized Hermite functions `ψ̃_0(t) .. ψ̃_{n_max}(t)` of unit width,
/// `ψ̃_k(t) = (√π 2ᵏ k!)^{-1/2} H_k(t) e^{-t²/2}`.
///
/// Uses the orthonormal recurrence, which neither overflows nor needs
/// factorials.
pub fn hermite_functions(n_max: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let p0 = PI.powf(-0.25) * (-0.5 * t * t).exp();
    out.push(p0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * t * p0);
    for k in 1..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * t * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// A transverse Hermite-Gaussian mode `ψ_n` of width `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteGaussianMode {
    pub index: usize,
    pub sigma: f64,
}

impl HermiteGaussianMode {
    pub fn new(index: usize, sigma: f64) -> Result<Self, MathError> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(MathError::InvalidWidth(sigma));
        }
        Ok(Self { index, sigma })
    }

    /// `ψ_n(x) = [1/(σ√π 2ⁿ n!)]^{1/2} H_n(x/σ) e^{-(x/σ)²/2}`.
    pub fn eval(&self, x: f64) -> Result<f64, MathError> {
        hg_mode_eval(self, x)
    }
}

/// Evaluates a Hermite-Gaussian mode at `x` (units length^{-1/2}).
pub fn hg_mode_eval(mode: &HermiteGaussianMode, x: f64) -> Result<f64, MathError> {
    if !x.is_finite() {
        return Err(MathError::NonFinite(x));
    }
    let t = x / mode.sigma;
    let values = hermite_functions(mode.index, t);
    Ok(values[mode.index] / mode.sigma.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_orders() {
        assert_eq!(hermite_poly(0, 0.37).unwrap(), 1.0);
        assert_eq!(hermite_poly(1, 0.5).unwrap(), 1.0);
        let x: f64 = 0.7;
        let closed = 32.0 * x.powi(5) - 160.0 * x.powi(3) + 120.0 * x;
        assert_relative_eq!(hermite_poly(5, x).unwrap(), closed, max_relative = 1e-14);
    }

    #[test]
    fn overflow_is_signalled() {
        assert!(matches!(
            hermite_poly(400, 30.0),
            Err(MathError::Overflow { n: 400, .. })
        ));
        assert!(hermite_poly(3, f64::NAN).is_err());
    }

    #[test]
    fn mode_values() {
        let m0 = HermiteGaussianMode::new(0, 1.0).unwrap();
        assert_relative_eq!(m0.eval(0.0).unwrap(), PI.powf(-0.25), max_relative = 1e-15);
        let m1 = HermiteGaussianMode::new(1, 3.3).unwrap();
        assert_eq!(m1.eval(0.0).unwrap(), 0.0);
        assert!(HermiteGaussianMode::new(2, 0.0).is_err());
    }

    #[test]
    fn recurrence_matches_explicit_formula() {
        // ψ_3 at x = 0.9σ, σ = 2, composed from H_3 and a log-space normalization
        let sigma = 2.0;
        let x = 0.9 * sigma;
        let t = x / sigma;
        let explicit =
            log_mode_normalization(3, sigma).exp() * hermite_poly(3, t).unwrap() * (-0.5 * t * t).exp();
        let mode = HermiteGaussianMode::new(3, sigma).unwrap();
        assert_relative_eq!(mode.eval(x).unwrap(), explicit, max_relative = 1e-13);

        for n in [0, 7, 20, 35] {
            for t in [-2.3, 0.1, 1.7, 4.0] {
                let explicit = log_mode_normalization(n, 1.0).exp()
                    * hermite_poly(n, t).unwrap()
                    * (-0.5 * t * t).exp();
                let rec = hermite_functions(n, t)[n];
                assert!((rec - explicit).abs() <= 1e-12 * explicit.abs().max(1e-3), "n={n} t={t}");
            }
        }
    }
}
