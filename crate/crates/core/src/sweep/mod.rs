//! Strength sweeps, phase-targeted root finding and trade-off curves.
//!
//! The gate phase is reported in `(-π, π]`; along a sweep it is continued in
//! `g` from `φ(0) = 0` so that a target of `π` is not sitting on the branch
//! cut. With `g > 0` the continued phase runs negative and targets are
//! compared against its magnitude.

mod csv;

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gatemetrics::{fidelity_phase, GateError, GateResult};
use crate::interaction::{InteractionError, InteractionSpec};
use crate::twophoton::PulsePair;

pub use csv::{read_rows, write_rows, CSV_HEADER};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("strength grid is empty")]
    EmptyGrid,
    #[error("invalid strength grid: {0}")]
    InvalidGrid(String),
    #[error("invalid option: {0}")]
    InvalidOptions(String),
    #[error("bracket [{lo}, {hi}] gives |φ| = [{phi_lo}, {phi_hi}], which does not straddle {target}")]
    NoBracket {
        lo: f64,
        hi: f64,
        phi_lo: f64,
        phi_hi: f64,
        target: f64,
    },
    #[error("no strength up to {g_max:e} reaches |φ| = {target} at R = {separation}")]
    BracketCap { separation: f64, target: f64, g_max: f64 },
    #[error("phase continuation in g did not resolve near g = {g}")]
    Continuation { g: f64 },
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error("csv: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl SweepError {
    pub fn is_numerical(&self) -> bool {
        match self {
            SweepError::BracketCap { .. } | SweepError::Continuation { .. } => true,
            SweepError::Gate(e) => e.is_numerical(),
            _ => false,
        }
    }
}

/// One sweep or trade-off point. Failed evaluations keep their row with NaN
/// values and the message in `error`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub g: f64,
    pub separation: f64,
    pub fidelity: f64,
    pub phase_wrapped: f64,
    pub phase_unwrapped: f64,
    pub err_estimate: f64,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_result(index: usize, g: f64, separation: f64, r: &GateResult, unwrapped: f64) -> Self {
        Self {
            index,
            g,
            separation,
            fidelity: r.fidelity,
            phase_wrapped: r.phase,
            phase_unwrapped: unwrapped,
            err_estimate: r.err_estimate,
            error: None,
        }
    }

    fn failed(index: usize, g: f64, separation: f64, error: String) -> Self {
        Self {
            index,
            g,
            separation,
            fidelity: f64::NAN,
            phase_wrapped: f64::NAN,
            phase_unwrapped: f64::NAN,
            err_estimate: f64::NAN,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptions {
    /// Absolute tolerance on each overlap.
    pub tol: f64,
    /// Root-finding tolerance on `|φ|`, radians.
    pub phase_tol: f64,
    /// First trial strength when no previous root is known.
    pub initial_guess: f64,
    /// Bracket doublings allowed before giving up.
    pub max_expansions: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            phase_tol: 1e-9,
            initial_guess: 1.0,
            max_expansions: 64,
        }
    }
}

impl SweepOptions {
    fn validate(&self) -> Result<(), SweepError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.tol) && ok(self.phase_tol) && ok(self.initial_guess)) {
            return Err(SweepError::InvalidOptions(
                "tolerances and the initial guess must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `0` followed by `n` geometrically spaced strengths from `g_min` to `g_max`.
pub fn geometric_grid(g_min: f64, g_max: f64, n: usize) -> Result<Vec<f64>, SweepError> {
    if !(g_min > 0.0 && g_max > g_min && g_max.is_finite()) || n < 2 {
        return Err(SweepError::InvalidGrid(format!(
            "need 0 < g_min < g_max and n ≥ 2, got {g_min}, {g_max}, {n}"
        )));
    }
    let ratio = (g_max / g_min).ln() / (n - 1) as f64;
    let mut grid = vec![0.0];
    grid.extend((0..n).map(|i| if i == n - 1 { g_max } else { g_min * (ratio * i as f64).exp() }));
    Ok(grid)
}

/// `d` mapped into `(-π, π]`.
fn wrap(d: f64) -> f64 {
    let w = d - 2.0 * PI * (d / (2.0 * PI)).round();
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

fn evaluate(pair: &PulsePair, template: &InteractionSpec, g: f64, tol: f64) -> Result<GateResult, GateError> {
    fidelity_phase(pair, &template.with_strength(g), tol)
}

/// Evaluates the gate along `g_grid` (which must start at 0 and increase)
/// and continues the phase row to row. Rows are computed in parallel and
/// returned in input order; a failed row does not stop the sweep, and the
/// continuation resumes from the last good row.
pub fn sweep_strength(
    pair: &PulsePair,
    template: &InteractionSpec,
    g_grid: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>, SweepError> {
    opts.validate()?;
    if g_grid.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    if g_grid[0] != 0.0 {
        return Err(SweepError::InvalidGrid(format!("must start at 0, starts at {}", g_grid[0])));
    }
    if let Some(w) = g_grid.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(SweepError::InvalidGrid(format!("not increasing at {} → {}", w[0], w[1])));
    }
    template.with_strength(0.0).validate()?;
    let results: Vec<Result<GateResult, GateError>> =
        g_grid.par_iter().map(|&g| evaluate(pair, template, g, opts.tol)).collect();

    let sep = pair.geometry.separation();
    let mut last = (0.0, 0.0);
    Ok(results
        .iter()
        .zip(g_grid)
        .enumerate()
        .map(|(i, (r, &g))| match r {
            Ok(r) => {
                let unwrapped = last.1 + wrap(r.phase - last.0);
                last = (r.phase, unwrapped);
                SweepRow::from_result(i, g, sep, r, unwrapped)
            }
            Err(e) => SweepRow::failed(i, g, sep, e.to_string()),
        })
        .collect())
}

/// A gate evaluation with its phase continued from `g = 0`.
#[derive(Debug, Clone)]
struct Point {
    g: f64,
    unwrapped: f64,
    result: GateResult,
}

struct Continuation<'a> {
    pair: &'a PulsePair,
    template: &'a InteractionSpec,
    tol: f64,
}

impl Continuation<'_> {
    fn origin(&self) -> Result<Point, SweepError> {
        let result = evaluate(self.pair, self.template, 0.0, self.tol)?;
        Ok(Point {
            g: 0.0,
            unwrapped: result.phase,
            result,
        })
    }

    /// Continues the phase from `from` to strength `g`. Steps are accepted
    /// when the wrapped phase turns by at most `π/4` and `g` changes by at
    /// most a factor of two; a step out of `g = 0` must also look linear at
    /// its midpoint. Otherwise the step is split.
    fn step(&self, from: &Point, g: f64) -> Result<Point, SweepError> {
        self.step_depth(from, g, 0)
    }

    fn step_depth(&self, from: &Point, g: f64, depth: usize) -> Result<Point, SweepError> {
        if depth > 200 {
            return Err(SweepError::Continuation { g });
        }
        let same_sign = from.g * g > 0.0;
        if same_sign && (g / from.g > 2.0 || from.g / g > 2.0) {
            let mid = self.step_depth(from, g.signum() * (from.g * g).sqrt(), depth + 1)?;
            return self.step_depth(&mid, g, depth + 1);
        }
        let result = evaluate(self.pair, self.template, g, self.tol)?;
        let d = wrap(result.phase - from.result.phase);
        let mut ok = d.abs() <= FRAC_PI_4;
        let half = 0.5 * (from.g + g);
        if ok && from.g == 0.0 {
            let m = evaluate(self.pair, self.template, half, self.tol)?;
            let dm = wrap(m.phase - from.result.phase);
            ok = (dm - 0.5 * d).abs() <= FRAC_PI_4 / 4.0;
        }
        if ok {
            return Ok(Point {
                g,
                unwrapped: from.unwrapped + d,
                result,
            });
        }
        let mid = self.step_depth(from, half, depth + 1)?;
        self.step_depth(&mid, g, depth + 1)
    }
}

fn finish(p: Point) -> (f64, GateResult) {
    let mut r = p.result;
    r.phase_unwrapped = Some(p.unwrapped);
    (p.g, r)
}

/// Bisection on the continued `|φ(g)|` inside a bracket that straddles
/// `target`.
pub fn find_strength_for_phase(
    pair: &PulsePair,
    template: &InteractionSpec,
    target: f64,
    bracket: (f64, f64),
    opts: &SweepOptions,
) -> Result<(f64, GateResult), SweepError> {
    opts.validate()?;
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) || !target.is_finite() {
        return Err(SweepError::InvalidOptions(format!("bad bracket [{lo}, {hi}] or target {target}")));
    }
    let walk = Continuation {
        pair,
        template,
        tol: opts.tol,
    };
    let origin = walk.origin()?;
    let from_origin = |g: f64| if g == 0.0 { Ok(origin.clone()) } else { walk.step(&origin, g) };
    let p_lo = from_origin(lo)?;
    let p_hi = if hi == lo { p_lo.clone() } else { walk.step(&p_lo, hi)? };
    bisect(&walk, target, p_lo, p_hi, opts.phase_tol)
}

fn bisect(walk: &Continuation, target: f64, mut lo: Point, mut hi: Point, phase_tol: f64) -> Result<(f64, GateResult), SweepError> {
    let f = |p: &Point| p.unwrapped.abs() - target;
    for p in [&lo, &hi] {
        if f(p).abs() <= phase_tol {
            return Ok(finish(p.clone()));
        }
    }
    if f(&lo).signum() == f(&hi).signum() {
        return Err(SweepError::NoBracket {
            lo: lo.g,
            hi: hi.g,
            phi_lo: lo.unwrapped.abs(),
            phi_hi: hi.unwrapped.abs(),
            target,
        });
    }
    loop {
        let g = 0.5 * (lo.g + hi.g);
        if g <= lo.g || g >= hi.g {
            // bracket exhausted in floating point; return the closer end
            let best = if f(&lo).abs() <= f(&hi).abs() { lo } else { hi };
            return Ok(finish(best));
        }
        let mid = walk.step(&lo, g)?;
        let fm = f(&mid);
        if fm.abs() <= phase_tol {
            return Ok(finish(mid));
        }
        if fm.signum() == f(&lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// For each separation, the strength that makes `|φ| = target` and the
/// fidelity there. Brackets are found by doubling from the previous root
/// (or from `opts.initial_guess`); the phase is continued from `g = 0` at
/// every separation.
pub fn tradeoff_curve(
    pair: &PulsePair,
    template: &InteractionSpec,
    separations: &[f64],
    target: f64,
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>, SweepError> {
    opts.validate()?;
    if separations.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    let mut guess = opts.initial_guess;
    let mut rows = Vec::with_capacity(separations.len());
    for (index, &sep) in separations.iter().enumerate() {
        let geometry = pair.geometry.with_separation(sep)?;
        let p = PulsePair { geometry, ..*pair };
        let walk = Continuation {
            pair: &p,
            template,
            tol: opts.tol,
        };
        let origin = walk.origin()?;
        let mut lo = origin.clone();
        let mut hi = walk.step(&origin, guess)?;
        let mut expansions = 0;
        while hi.unwrapped.abs() < target {
            if expansions == opts.max_expansions {
                return Err(SweepError::BracketCap {
                    separation: sep,
                    target,
                    g_max: hi.g,
                });
            }
            let next = walk.step(&hi, 2.0 * hi.g)?;
            lo = hi;
            hi = next;
            expansions += 1;
        }
        let (g, result) = bisect(&walk, target, lo, hi, opts.phase_tol)?;
        guess = g;
        let unwrapped = result.phase_unwrapped.unwrap_or(result.phase);
        rows.push(SweepRow::from_result(index, g, sep, &result, unwrapped));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests;
