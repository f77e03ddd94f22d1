//! `∫₀^∞ p_R(ρ) e^{-iψ(ρ)} dρ` for the radial law of a unit 2D Gaussian
//! offset by `R`, with phases that may blow up like `1/ρ²` at the origin.

use num_complex::Complex64;

use crate::mathcore::{
    bessel_i0_scaled, integrate_adaptive, integrate_with_breakpoints, AdaptiveOptions, MathError,
    MAX_INTERVALS,
};

/// Half-width, in units of `σ`, of the radial window kept around `R`.
pub(crate) const RADIAL_SPAN: f64 = 12.0;
const CORE_RADIUS: f64 = 1.0;
const LAST_CUT: f64 = 1e16;

/// Density of `|x_T|` when `x_T ~ N((-R, 0), I₂)`:
/// `ρ e^{-(ρ-R)²/2} e^{-ρR} I₀(ρR)`.
pub(crate) fn radial_density(rho: f64, r: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    let d = rho - r;
    rho * (-0.5 * d * d).exp() * bessel_i0_scaled(rho * r)
}

/// How the phase behaves near `ρ = 0`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Core {
    /// Bounded and smooth; `scale` is its transverse feature size.
    Smooth { scale: f64 },
    /// Unbounded like `1/ρ²`.
    Singular,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Radial {
    pub value: Complex64,
    pub err: f64,
}

fn opts(tol: f64) -> AdaptiveOptions {
    AdaptiveOptions {
        rel_tol: 1e-14,
        abs_tol: tol,
        max_intervals: MAX_INTERVALS,
    }
}

fn five_point<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, -phase)
}

/// Integrates `p_R(ρ) e^{-iψ(ρ)}` to absolute accuracy about `tol`.
pub(crate) fn radial_overlap<P>(psi: P, r: f64, core: Core, tol: f64) -> Result<Radial, MathError>
where
    P: Fn(f64) -> f64,
{
    let lo = (r - RADIAL_SPAN).max(0.0);
    let hi = r + RADIAL_SPAN;
    let f = |rho: f64| cis(psi(rho)) * radial_density(rho, r);
    let piece_tol = 0.25 * tol;

    let mut points = Vec::new();
    let use_core = matches!(core, Core::Singular) && lo < CORE_RADIUS;
    let start = if use_core { CORE_RADIUS } else { lo };
    points.push(start);
    if let Core::Smooth { scale } = core {
        for k in [1.0, 2.0, 4.0, 8.0] {
            points.push(k * scale);
        }
    }
    points.push(r);
    points.push(hi);
    points.retain(|&p| p >= start && p <= hi);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let outer = integrate_with_breakpoints(f, &points, &opts(piece_tol)).map_err(|(_, e)| e)?;
    let mut value = outer.value;
    let mut err = outer.err_estimate;
    if use_core {
        let c = singular_core(&psi, r, piece_tol)?;
        value += c.value;
        err += c.err;
    }
    Ok(Radial { value, err })
}

/// `∫₀^{ρ_c}` in the variable `u = 1/ρ²`, which turns a `1/ρ²` phase into
/// a steady oscillation against an algebraically decaying weight. The
/// interval `[1, ∞)` is covered by doubling panels until the remainder can be
/// taken as an integration-by-parts asymptote (oscillating phase) or
/// the enclosed mass times the end phase (settled phase).
fn singular_core<P: Fn(f64) -> f64>(psi: &P, r: f64, tol: f64) -> Result<Radial, MathError> {
    let weight = |u: f64| radial_density(u.powf(-0.5), r) / (2.0 * u * u.sqrt());
    let phase = |u: f64| psi(u.powf(-0.5));
    let f = |u: f64| cis(phase(u)) * weight(u);
    let o = opts(0.01 * tol);

    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut b = 1.0 / (CORE_RADIUS * CORE_RADIUS);
    loop {
        if let Some((tail, tail_err)) = core_tail(&weight, &phase, r, b, tol) {
            return Ok(Radial {
                value: value + tail,
                err: err + tail_err,
            });
        }
        if b >= LAST_CUT {
            return Err(MathError::NonConvergence {
                best: value,
                err: f64::INFINITY,
                intervals: 0,
            });
        }
        let q = integrate_adaptive(f, b, 2.0 * b, &o).map_err(|(_, e)| e)?;
        value += q.value;
        err += q.err_estimate;
        b *= 2.0;
    }
}

fn core_tail<W, Q>(weight: &W, phase: &Q, r: f64, u: f64, tol: f64) -> Option<(Complex64, f64)>
where
    W: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
{
    let dphase = |x: f64| five_point(phase, x, 1e-3 * x);
    let slope = dphase(u);
    let budget = 0.01 * tol;
    if slope.abs() * u >= 100.0 {
        // ∫_u^∞ h e^{-iψ} ≈ e^{-iψ(u)} (-iA - B),  A = h/ψ',  B = A'/ψ'
        let amp = |x: f64| weight(x) / dphase(x);
        let a = amp(u);
        let b = five_point(&amp, u, 1e-2 * u) / slope;
        let ratio = (b / a).abs();
        let next = b.abs() * ratio;
        if ratio < 0.5 && next <= budget {
            let value = cis(phase(u)) * Complex64::new(-b, -a);
            return Some((value, next));
        }
        None
    } else {
        let rho = u.powf(-0.5);
        let mass = integrate_adaptive(|x| radial_density(x, r), 0.0, rho, &opts(1e-3 * budget))
            .map(|q| q.value)
            .ok()?;
        let drift = (phase(4.0 * u) - phase(u)).abs();
        let err = mass * drift;
        (err <= budget).then(|| (cis(phase(u)) * mass, err))
    }
}
