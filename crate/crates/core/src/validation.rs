//! The acceptance suite: ten numbered criteria, each reduced to a pass/fail
//! line with the measured numbers. Shared by the `acceptance` test target
//! and the `validate` command.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gatemetrics::{fidelity_phase, mode_mix_tensor, schmidt_spectrum};
use crate::interaction::{accumulated_phase_dipole, numeric_line_phase, GateGeometry, InteractionSpec};
use crate::mathcore::gauss_hermite_rule;
use crate::propagator::{
    overlap_against_free, split_step_evolve, EvolveOptions, GridSpec, RelativeWavefunction,
};
use crate::sweep::{geometric_grid, read_rows, sweep_strength, tradeoff_curve, SweepOptions, SweepRow};
use crate::twophoton::PulsePair;

/// Criteria that a faithful implementation does not meet. They still run
/// and report FAIL; the acceptance target does not treat them as errors.
pub const EXPECTED_FAILURES: &[u8] = &[8];

pub const CRITERIA: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

const FIG2_CSV: &str = include_str!("../regression/fig2_head_on_sweep.csv");
const FIG3_CSV: &str = include_str!("../regression/fig3_tradeoff.csv");

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn expected_failure(&self) -> bool {
        !self.passed && EXPECTED_FAILURES.contains(&self.id)
    }

    /// `[PASS] 3 endpoint R=26: ... (1.2 s)`
    pub fn line(&self) -> String {
        let tag = match (self.passed, self.expected_failure()) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
        };
        format!(
            "[{tag}] {:>2} {}: {} ({:.1} s)",
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Runs one criterion. Unknown ids and internal errors come back as
/// failures with the message in `detail`.
pub fn run_criterion(id: u8) -> Outcome {
    let start = Instant::now();
    let (title, result): (&'static str, Result<(bool, String), String>) = match id {
        1 => ("phase formula vs line integral", phase_oracle()),
        2 => ("zero interaction identity", zero_interaction()),
        3 => ("endpoint R=26", endpoint(26.0, 0.90, 0.02)),
        4 => ("endpoint R=79", endpoint(79.0, 0.99, 0.005)),
        5 => ("contact limit", contact_limit()),
        6 => ("interplay head-on", interplay_head_on()),
        7 => ("interplay separated", interplay_separated()),
        8 => ("mode mixing", mode_mixing()),
        9 => ("numerics hygiene", hygiene()),
        10 => ("figure regressions", regressions()),
        _ => ("unknown", Err(format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    let limit = match id {
        1 => Some(5.0),
        3 | 4 => Some(60.0),
        _ => None,
    };
    if let Some(limit) = limit {
        if elapsed.as_secs_f64() > limit {
            passed = false;
            detail.push_str(&format!("; slower than {limit} s"));
        }
    }
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed,
    }
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(|&id| run_criterion(id)).collect()
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn reference_pair(separation: f64) -> Result<PulsePair, String> {
    Ok(PulsePair::new(GateGeometry::reference(separation).map_err(s)?))
}

/// Pair with `σ` and `l = 4πσ` fixed and `λ` set by the requested `l/r`.
fn pair_at(separation: f64, l_over_r: f64) -> Result<PulsePair, String> {
    Ok(PulsePair::new(
        GateGeometry::from_ratios(2.0 / l_over_r, 4.0 * PI, separation).map_err(s)?,
    ))
}

fn phase_oracle() -> Result<(bool, String), String> {
    let geom = GateGeometry::reference(0.0).map_err(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let spec = InteractionSpec::dipole(1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let z = rng.gen_range(-3.0 * geom.l..5.0 * geom.l);
        let rho = rng.gen_range(0.05..20.0);
        let closed = accumulated_phase_dipole(z, rho, &geom, 1.0).map_err(s)?;
        let numeric = numeric_line_phase(&spec, &geom, z, [rho, 0.0], 1e-12).map_err(s)?;
        // relative to the phase scale g/ρ² where φ itself passes through zero
        let scale = closed.abs().max(1.0 / (rho * rho));
        worst = worst.max((closed - numeric).abs() / scale);
    }
    Ok((worst <= 1e-8, format!("worst relative deviation {worst:.2e} over 100 points (limit 1e-8)")))
}

fn gate_on_grid(xi0: &RelativeWavefunction, spec: &InteractionSpec, opts: &EvolveOptions) -> Result<Complex64, String> {
    let free = split_step_evolve(xi0, &spec.with_strength(0.0), opts).map_err(s)?;
    let int = split_step_evolve(xi0, spec, opts).map_err(s)?;
    Ok(overlap_against_free(&int.state, &free.state).map_err(s)?.overlap)
}

fn zero_interaction() -> Result<(bool, String), String> {
    let pair = reference_pair(0.0)?;
    let spec = InteractionSpec::dipole(0.0);
    let a = fidelity_phase(&pair, &spec, 1e-12).map_err(s)?;
    let xi0 = RelativeWavefunction::initial(&pair, GridSpec::new([32, 32, 16], [12.0; 3]).map_err(s)?).map_err(s)?;
    let opts = EvolveOptions {
        steps: 32,
        ..Default::default()
    };
    let p = gate_on_grid(&xi0, &spec, &opts)?;
    let (pf, pp) = (p.norm_sqr(), crate::gatemetrics::principal_arg(p));
    let dev = [(a.fidelity - 1.0).abs(), a.phase.abs(), (pf - 1.0).abs(), pp.abs()];
    let worst = dev.iter().cloned().fold(0.0, f64::max);
    Ok((
        worst <= 1e-10,
        format!(
            "analytic F-1 = {:.1e}, φ = {:.1e}; propagator F-1 = {:.1e}, φ = {:.1e}",
            a.fidelity - 1.0,
            a.phase,
            pf - 1.0,
            pp
        ),
    ))
}

fn endpoint(separation: f64, expect: f64, tol: f64) -> Result<(bool, String), String> {
    let pair = reference_pair(separation)?;
    let rows = tradeoff_curve(&pair, &InteractionSpec::dipole(0.0), &[separation], PI, &SweepOptions::default())
        .map_err(s)?;
    let r = &rows[0];
    Ok((
        (r.fidelity - expect).abs() <= tol,
        format!(
            "g* = {:.6}, |φ| = {:.9}, F = {:.5} (expected {expect} ± {tol})",
            r.g,
            r.phase_unwrapped.abs(),
            r.fidelity
        ),
    ))
}

fn contact_limit() -> Result<(bool, String), String> {
    let pair = reference_pair(0.0)?;
    let u = 1.0;
    let mut phases = Vec::new();
    let mut losses = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let r = fidelity_phase(&pair, &InteractionSpec::contact(u, eps * pair.geometry.sigma), 1e-12).map_err(s)?;
        phases.push(r.phase.abs());
        losses.push(1.0 - r.fidelity);
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let ok = decreasing(&phases) && decreasing(&losses) && phases[2] < phases[0] / 3.0;
    Ok((
        ok,
        format!(
            "u = {u}, ε/σ = 0.2, 0.1, 0.05: |φ| = {:.3e}, {:.3e}, {:.3e}; 1-F = {:.3e}, {:.3e}, {:.3e}",
            phases[0], phases[1], phases[2], losses[0], losses[1], losses[2]
        ),
    ))
}

/// Relative deviation of the propagated overlap from the same run without
/// diffraction, together with the clamped mass.
fn interplay(separation: f64, g: f64, l_over_r: f64, grid: GridSpec) -> Result<(f64, f64), String> {
    let pair = pair_at(separation, l_over_r)?;
    let xi0 = RelativeWavefunction::initial(&pair, grid).map_err(s)?;
    let spec = InteractionSpec::dipole(g);
    let on = EvolveOptions::default();
    let off = EvolveOptions {
        include_diffraction: false,
        ..on
    };
    let clamped = split_step_evolve(&xi0, &spec, &on).map_err(s)?.clamped_mass;
    let with = gate_on_grid(&xi0, &spec, &on)?;
    let without = gate_on_grid(&xi0, &spec, &off)?;
    Ok(((with - without).norm() / without.norm(), clamped))
}

/// Head-on strength used for the interplay check.
pub const INTERPLAY_HEAD_ON_G: f64 = 0.3;

fn interplay_head_on() -> Result<(bool, String), String> {
    let grid = GridSpec::new([64, 64, 24], [10.0; 3]).map_err(s)?;
    let mut devs = Vec::new();
    let mut clamped = 0.0;
    for lr in [0.05, 0.1, 0.2] {
        let (d, c) = interplay(0.0, INTERPLAY_HEAD_ON_G, lr, grid)?;
        devs.push(d);
        clamped = c;
    }
    let ok = (1e-3..=0.1).contains(&devs[2]) && devs[0] < devs[1] && devs[1] < devs[2];
    Ok((
        ok,
        format!(
            "g = {INTERPLAY_HEAD_ON_G}, l/r = 0.05, 0.1, 0.2: deviation {:.3e}, {:.3e}, {:.3e} (0.2 must lie in [1e-3, 0.1]); clamped mass {clamped:.2e}",
            devs[0], devs[1], devs[2]
        ),
    ))
}

fn interplay_separated() -> Result<(bool, String), String> {
    let pair = reference_pair(26.0)?;
    let rows = tradeoff_curve(&pair, &InteractionSpec::dipole(0.0), &[26.0], PI, &SweepOptions::default())
        .map_err(s)?;
    let g = rows[0].g;
    let grid = GridSpec::new([64, 64, 32], [10.0; 3]).map_err(s)?;
    let (d, c) = interplay(26.0, g, 0.2, grid)?;
    Ok((d <= 5e-3, format!("g* = {g:.4}, deviation {d:.3e} (limit 5e-3); clamped mass {c:.1e}")))
}

fn mode_mixing() -> Result<(bool, String), String> {
    let pair = reference_pair(0.0)?;
    // strength with |C₀₀₀₀| = 0.9 under the far-field phase, by bisection
    let c0 = |g: f64| -> Result<Complex64, String> {
        Ok(fidelity_phase(&pair, &InteractionSpec::simplified(g), 1e-12).map_err(s)?.overlap)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if c0(mid)?.norm() > 0.9 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = 0.5 * (lo + hi);
    let independent = c0(g)?;
    let spec = InteractionSpec::simplified(g);
    let t = mode_mix_tensor(&spec, 0.0, 12, 1e-12).map_err(s)?;
    let schmidt = schmidt_spectrum(&t).map_err(s)?;
    let deficit = t.unitarity_deficit();
    let parity = t.parity_violation();
    let c_err = (t.get(0, 0, 0, 0) - independent).norm();
    let checks = [deficit <= 1e-3, parity <= 1e-10, schmidt.entropy > 0.0, c_err <= 1e-6];
    Ok((
        checks.iter().all(|&c| c),
        format!(
            "g = {g:.10}: unitarity deficit {deficit:.3e} (limit 1e-3), parity {parity:.1e}, entropy {:.4}, |ΔC₀₀₀₀| {c_err:.1e}",
            schmidt.entropy
        ),
    ))
}

fn hygiene() -> Result<(bool, String), String> {
    // Gauss-Hermite exactness
    let mut gh_worst: f64 = 0.0;
    for n in [1, 2, 5, 16, 48, 96] {
        let rule = gauss_hermite_rule(n).map_err(s)?;
        let mut moment = PI.sqrt();
        for d in (0..2 * n).step_by(2) {
            if d > 0 {
                moment *= (d - 1) as f64 / 2.0;
            }
            let q = rule.integrate(|x| x.powi(d as i32));
            gh_worst = gh_worst.max(((q - moment) / moment).abs());
            let odd = rule.integrate(|x| x.powi(d as i32 + 1));
            gh_worst = gh_worst.max(odd.abs() / moment.max(1.0));
        }
    }

    // norm over a full default-length run
    let pair = pair_at(0.0, 0.2)?;
    let xi0 = RelativeWavefunction::initial(&pair, GridSpec::new([64, 64, 8], [10.0, 10.0, 12.0]).map_err(s)?).map_err(s)?;
    let ev = split_step_evolve(&xi0, &InteractionSpec::dipole(0.3), &EvolveOptions::default()).map_err(s)?;
    let norm_err = ev.max_norm_error;

    // free diffraction against the closed form
    let box16 = GridSpec::new([64, 64, 8], [16.0, 16.0, 12.0]).map_err(s)?;
    let xi0 = RelativeWavefunction::initial(&pair, box16).map_err(s)?;
    let free = split_step_evolve(&xi0, &InteractionSpec::dipole(0.0), &EvolveOptions { steps: 8, ..Default::default() })
        .map_err(s)?;
    let a = 0.5 / pair.geometry.k_scaled();
    let w = Complex64::new(1.0, -a * pair.geometry.l_scaled());
    let grid = xi0.grid;
    let (xs, ys, zs) = (grid.coords(0), grid.coords(1), grid.coords(2));
    let axis0 = |x: f64, c: f64| (-0.25 * (x - c) * (x - c)).exp();
    let scale = xi0.values[0].re / (axis0(zs[0], grid.center[2]) * axis0(xs[0], grid.center[0]) * axis0(ys[0], grid.center[1]));
    let axis = |x: f64, c: f64| (-(x - c) * (x - c) / (4.0 * w)).exp() / w.sqrt();
    let mut dist = 0.0;
    let mut idx = 0;
    for &z in &zs {
        for &x in &xs {
            for &y in &ys {
                let expect = scale * axis0(z, grid.center[2]) * axis(x, grid.center[0]) * axis(y, grid.center[1]);
                dist += (free.state.values[idx] - expect).norm_sqr();
                idx += 1;
            }
        }
    }
    let free_err = (dist * grid.spec.cell_volume()).sqrt();

    // Strang order on a separated configuration
    let sep = reference_pair(26.0)?;
    let xi0 = RelativeWavefunction::initial(&sep, GridSpec::new([32, 32, 8], [10.0, 10.0, 12.0]).map_err(s)?).map_err(s)?;
    let spec = InteractionSpec::dipole(1345.522_453_799_231_5);
    let run = |steps: usize| gate_on_grid(&xi0, &spec, &EvolveOptions { steps, ..Default::default() });
    let reference = run(512)?;
    let e1 = (run(32)? - reference).norm();
    let e2 = (run(64)? - reference).norm();
    let factor = e1 / e2;

    let ok = gh_worst <= 1e-12 && norm_err <= 1e-8 && free_err <= 1e-6 && (3.0..=5.0).contains(&factor);
    Ok((
        ok,
        format!(
            "GH exactness {gh_worst:.1e}, norm drift {norm_err:.1e}, free Gaussian L2 {free_err:.1e}, Strang factor {factor:.3}"
        ),
    ))
}

/// Head-on strength sweep in the regime of the trade-off figure.
pub fn fig2_rows() -> Result<Vec<SweepRow>, String> {
    let grid = geometric_grid(1e-3, 8.0, 40).map_err(s)?;
    sweep_strength(&reference_pair(0.0)?, &InteractionSpec::dipole(0.0), &grid, &SweepOptions::default()).map_err(s)
}

pub const FIG3_SEPARATIONS: [f64; 8] = [5.0, 10.0, 15.0, 20.0, 26.0, 40.0, 60.0, 79.0];

/// `F` at `|φ| = π` against transverse separation.
pub fn fig3_rows() -> Result<Vec<SweepRow>, String> {
    tradeoff_curve(
        &reference_pair(0.0)?,
        &InteractionSpec::dipole(0.0),
        &FIG3_SEPARATIONS,
        PI,
        &SweepOptions::default(),
    )
    .map_err(s)
}

fn compare(name: &str, frozen: &str, fresh: &[SweepRow]) -> Result<f64, String> {
    let frozen = read_rows(frozen.as_bytes()).map_err(s)?;
    if frozen.len() != fresh.len() {
        return Err(format!("{name}: {} frozen rows, {} computed", frozen.len(), fresh.len()));
    }
    let mut worst: f64 = 0.0;
    for (a, b) in frozen.iter().zip(fresh) {
        for (x, y) in [
            (a.g, b.g),
            (a.separation, b.separation),
            (a.fidelity, b.fidelity),
            (a.phase_wrapped, b.phase_wrapped),
            (a.phase_unwrapped, b.phase_unwrapped),
        ] {
            worst = worst.max((x - y).abs() / x.abs().max(1.0));
        }
    }
    Ok(worst)
}

fn regressions() -> Result<(bool, String), String> {
    let d2 = compare("fig2", FIG2_CSV, &fig2_rows()?)?;
    let d3 = compare("fig3", FIG3_CSV, &fig3_rows()?)?;
    Ok((
        d2 <= 1e-9 && d3 <= 1e-9,
        format!("head-on sweep max deviation {d2:.1e}, trade-off curve {d3:.1e} (limit 1e-9)"),
    ))
}
