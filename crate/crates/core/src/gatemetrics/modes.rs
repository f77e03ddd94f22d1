//! Transverse mode mixing under the far-field dipole phase.
//!
//! With `u = (x₁ - x₂')/√2`, `v = (x₁ + x₂')/√2` per transverse axis
//! (`x₂' = x₂ - D`), a product of Hermite functions rotates into
//! `ψ_m(x₁)ψ_l(x₂') = Σ_N c ψ_N(u)ψ_{m+l-N}(v)`. The `ψ₀` weights kill every
//! `v`-mode except `ψ₀`, which leaves
//! `C_mnlk = T_ml T_nk A_{m+l, n+k}` with
//! `T_ml = (-1)^l √((m+l)!/(m! l!)) 2^{-(m+l)/2}` and
//! `A_pq = ∫ ψ_p ψ₀(u_x) ψ_q ψ₀(u_y) e^{-ig/|u - u₀|²} d²u`, `u₀ = (D/√2, 0)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::GateError;
use crate::interaction::{InteractionSpec, Potential};
use crate::mathcore::{hermite_functions, integrate_adaptive, integrate_with_breakpoints, AdaptiveOptions, MAX_INTERVALS};

/// Largest per-index order accepted by [`mode_mix_tensor`].
pub const MAX_MODE_ORDER: usize = 16;
pub const DEFAULT_MAX_ORDER: usize = 12;

const SPAN: f64 = 12.0;
const FIRST_CUT: f64 = 16.0;
const LAST_CUT: f64 = 1e14;

/// `C_mnlk` for `0 ≤ m, n, l, k ≤ max_order`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeMixTensor {
    pub max_order: usize,
    pub strength: f64,
    pub separation: f64,
    /// Row-major over `(m, n, l, k)`.
    pub coefficients: Vec<Complex64>,
    pub err_estimate: f64,
}

impl ModeMixTensor {
    fn dim(&self) -> usize {
        self.max_order + 1
    }

    pub fn get(&self, m: usize, n: usize, l: usize, k: usize) -> Complex64 {
        let d = self.dim();
        self.coefficients[((m * d + n) * d + l) * d + k]
    }

    pub fn norm_squared(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `1 - Σ|C_mnlk|²`: weight scattered beyond `max_order`.
    pub fn unitarity_deficit(&self) -> f64 {
        1.0 - self.norm_squared()
    }

    /// Largest `|C_mnlk|` over entries with odd `m + l` or odd `n + k`.
    pub fn parity_violation(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for m in 0..d {
            for n in 0..d {
                for l in 0..d {
                    for k in 0..d {
                        if (m + l) % 2 == 1 || (n + k) % 2 == 1 {
                            worst = worst.max(self.get(m, n, l, k).norm());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Synthetic tensor from explicit coefficients (for diagnostics and tests).
    pub fn from_coefficients(max_order: usize, coefficients: Vec<Complex64>) -> Result<Self, GateError> {
        let d = max_order + 1;
        if coefficients.len() != d * d * d * d {
            return Err(GateError::InvalidInput(format!(
                "expected {} coefficients for max order {max_order}, got {}",
                d * d * d * d,
                coefficients.len()
            )));
        }
        Ok(Self {
            max_order,
            strength: f64::NAN,
            separation: f64::NAN,
            coefficients,
            err_estimate: 0.0,
        })
    }
}

/// Overlap of `ψ_m ⊗ ψ_l` with `ψ_{m+l}(u) ψ₀(v)` under the 45° rotation.
pub fn transfer_coefficient(m: usize, l: usize) -> f64 {
    let n = m + l;
    // √(n!/(m! l!)) built as a running product to stay exact for small n
    let mut binom = 1.0;
    for j in 0..l {
        binom *= (n - j) as f64 / (j + 1) as f64;
    }
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    sign * binom.sqrt() * 2f64.powf(-0.5 * n as f64)
}

struct Angular {
    p_max: usize,
    center: f64,
}

impl Angular {
    fn points(&self, r: f64) -> usize {
        let need = 2 * self.p_max + 16 + (4.0 * self.center * r).ceil() as usize;
        need.next_power_of_two().max(64)
    }

    /// `∫₀^{2π} f_p(u₀ + r cosθ) f_q(r sinθ) dθ` for all `p, q ≤ p_max` by the
    /// periodic trapezoid rule, `f_p = ψ_p ψ₀`.
    fn eval(&self, r: f64) -> Vec<Complex64> {
        let d = self.p_max + 1;
        let n = self.points(r);
        let w = 2.0 * PI / n as f64;
        let mut acc = vec![0.0f64; d * d];
        for k in 0..n {
            let t = 2.0 * PI * k as f64 / n as f64;
            let fx = weighted(self.p_max, self.center + r * t.cos());
            let fy = weighted(self.p_max, r * t.sin());
            for p in 0..d {
                let a = w * fx[p];
                if a == 0.0 {
                    continue;
                }
                let row = &mut acc[p * d..(p + 1) * d];
                for q in 0..d {
                    row[q] += a * fy[q];
                }
            }
        }
        acc.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    }
}

fn weighted(p_max: usize, t: f64) -> Vec<f64> {
    let mut h = hermite_functions(p_max, t);
    let g0 = h[0];
    for v in h.iter_mut() {
        *v *= g0;
    }
    h
}

fn scale(v: &mut [Complex64], s: Complex64) {
    for x in v.iter_mut() {
        *x *= s;
    }
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `A_pq` for `p, q ≤ p_max` at strength `g` and separation `R = D/σ`,
/// row-major, with an absolute error estimate.
pub fn relative_mode_integrals(
    g: f64,
    separation: f64,
    p_max: usize,
    tol: f64,
) -> Result<(Vec<Complex64>, f64), GateError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(GateError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if !g.is_finite() || !(separation.is_finite() && separation >= 0.0) {
        return Err(GateError::InvalidInput("strength and separation must be finite".into()));
    }
    let ang = Angular {
        p_max,
        center: separation / std::f64::consts::SQRT_2,
    };
    let r_max = ang.center + SPAN;
    let opts = AdaptiveOptions {
        rel_tol: 1e-14,
        abs_tol: 0.1 * tol,
        max_intervals: MAX_INTERVALS,
    };
    let integrand = |r: f64| {
        let mut v = ang.eval(r);
        scale(&mut v, Complex64::from_polar(r, -g / (r * r)));
        v
    };

    let mut points = vec![if g == 0.0 { 0.0 } else { 1.0 }];
    if ang.center > points[0] {
        points.push(ang.center);
    }
    points.push(r_max);
    let outer = integrate_with_breakpoints(integrand, &points, &opts).map_err(|(_, e)| e)?;
    let mut value = outer.value;
    let mut err = outer.err_estimate;
    if g != 0.0 {
        let (core, core_err) = core_integral(&ang, g, tol)?;
        for (a, b) in value.iter_mut().zip(core) {
            *a += b;
        }
        err += core_err;
    }
    Ok((value, err))
}

/// `∫₀¹ r Ang(r) e^{-ig/r²} dr = ∫₁^∞ h(w) e^{-igw} dw`, `h = Ang(w^{-1/2})/(2w²)`,
/// with the tail past the last doubling panel from two integration-by-parts
/// terms.
fn core_integral(ang: &Angular, g: f64, tol: f64) -> Result<(Vec<Complex64>, f64), GateError> {
    let h = |w: f64| {
        let mut v = ang.eval(w.powf(-0.5));
        scale(&mut v, Complex64::new(0.5 / (w * w), 0.0));
        v
    };
    let f = |w: f64| {
        let mut v = h(w);
        scale(&mut v, Complex64::from_polar(1.0, -g * w));
        v
    };
    let opts = AdaptiveOptions {
        rel_tol: 1e-14,
        abs_tol: 0.01 * tol,
        max_intervals: MAX_INTERVALS,
    };
    let budget = 0.01 * tol;
    let mut total: Option<Vec<Complex64>> = None;
    let mut err = 0.0;
    let (mut a, mut b) = (1.0, FIRST_CUT);
    loop {
        let q = integrate_adaptive(f, a, b, &opts).map_err(|(_, e)| e)?;
        err += q.err_estimate;
        total = Some(match total {
            None => q.value,
            Some(mut t) => {
                for (x, y) in t.iter_mut().zip(&q.value) {
                    *x += y;
                }
                t
            }
        });
        if g.abs() * b >= 100.0 {
            let hb = h(b);
            let step = 1e-2 * b;
            let (m2, m1, p1, p2) = (h(b - 2.0 * step), h(b - step), h(b + step), h(b + 2.0 * step));
            let dh: Vec<Complex64> = (0..hb.len())
                .map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * step))
                .collect();
            let a_norm = max_norm(&hb) / g.abs();
            let b_norm = max_norm(&dh) / (g * g);
            let ratio = if a_norm > 0.0 { b_norm / a_norm } else { 0.0 };
            let next = b_norm * ratio;
            if ratio < 0.5 && next <= budget {
                let phase = Complex64::from_polar(1.0, -g * b);
                let mut t = total.expect("at least one panel");
                for i in 0..t.len() {
                    t[i] += phase * (Complex64::new(0.0, -1.0) * hb[i] / g - dh[i] / (g * g));
                }
                return Ok((t, err + next));
            }
        }
        if b >= LAST_CUT {
            return Err(GateError::NotConverged {
                best: total.map(|t| t[0]).unwrap_or_default(),
                err: f64::INFINITY,
            });
        }
        a = b;
        b *= 2.0;
    }
}

/// `C_mnlk` for the far-field dipole phase `2g/|x'_T|²` at separation
/// `R = D/σ`.
pub fn mode_mix_tensor(
    spec: &InteractionSpec,
    separation: f64,
    max_order: usize,
    tol: f64,
) -> Result<ModeMixTensor, GateError> {
    if !matches!(spec.potential, Potential::DipoleSimplified) {
        return Err(GateError::InvalidInput(
            "the mode tensor is defined for the far-field (simplified) dipole phase".into(),
        ));
    }
    spec.validate()?;
    if max_order > MAX_MODE_ORDER {
        return Err(GateError::InvalidInput(format!(
            "max order {max_order} exceeds {MAX_MODE_ORDER}"
        )));
    }
    let g = spec.strength;
    let p_max = 2 * max_order;
    let (a, err) = relative_mode_integrals(g, separation, p_max, tol)?;
    let pd = p_max + 1;
    let d = max_order + 1;
    let mut coefficients = Vec::with_capacity(d * d * d * d);
    for m in 0..d {
        for n in 0..d {
            for l in 0..d {
                for k in 0..d {
                    let t = transfer_coefficient(m, l) * transfer_coefficient(n, k);
                    coefficients.push(a[(m + l) * pd + (n + k)] * t);
                }
            }
        }
    }
    Ok(ModeMixTensor {
        max_order,
        strength: g,
        separation,
        coefficients,
        err_estimate: err,
    })
}

/// Schmidt decomposition of `C` across the photon-1 `(m, n)` / photon-2
/// `(l, k)` cut.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtSpectrum {
    /// Singular values of the renormalized tensor, descending.
    pub singular_values: Vec<f64>,
    /// `-Σ p ln p` with `p_i = s_i²`.
    pub entropy: f64,
    /// `Σ p_i²`.
    pub purity: f64,
}

pub fn schmidt_spectrum(t: &ModeMixTensor) -> Result<SchmidtSpectrum, GateError> {
    let d = t.max_order + 1;
    let norm = t.norm_squared().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(GateError::ZeroTensor);
    }
    let mat = DMatrix::from_fn(d * d, d * d, |row, col| {
        let (m, n) = (row / d, row % d);
        let (l, k) = (col / d, col % d);
        t.get(m, n, l, k) / norm
    });
    let mut singular_values: Vec<f64> = mat.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let mut entropy = 0.0;
    let mut purity = 0.0;
    for s in &singular_values {
        let p = s * s;
        if p > 0.0 {
            entropy -= p * p.ln();
        }
        purity += p * p;
    }
    Ok(SchmidtSpectrum {
        singular_values,
        entropy: entropy.max(0.0),
        purity,
    })
}
