use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::MathError;

/// Subdivision cap for the adaptive integrator.
pub const MAX_INTERVALS: usize = 1 << 14;

// G7-K15 abscissae on [-1, 1] (upper half, descending) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values the adaptive integrator can accumulate: scalars or fixed-length
/// vectors of complex numbers.
pub trait QuadValue: Clone + Send {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, scale: f64);
    /// Max-norm; drives error estimates.
    fn norm(&self) -> f64;
}

impl QuadValue for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, other: &Self, scale: f64) {
        *self += other * scale;
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, scale: f64) {
        *self += other * scale;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Vec<Complex64> {
    fn zero_like(&self) -> Self {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }
    fn add_scaled(&mut self, other: &Self, scale: f64) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b * scale;
        }
    }
    fn norm(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl AdaptiveOptions {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol: 0.0,
            max_intervals: MAX_INTERVALS,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Quad<V> {
    pub value: V,
    pub err_estimate: f64,
    pub intervals: usize,
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.a == other.a
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest error first; ties broken by position for determinism
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> (V, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc.zero_like();
    let mut gauss = fc.zero_like();
    kron.add_scaled(&fc, WGK[7]);
    gauss.add_scaled(&fc, WG[3]);
    for j in 0..7 {
        let dx = half * XGK[j];
        let mut pair = f(center - dx);
        pair.add_scaled(&f(center + dx), 1.0);
        kron.add_scaled(&pair, WGK[j]);
        if j % 2 == 1 {
            gauss.add_scaled(&pair, WG[j / 2]);
        }
    }
    let mut diff = kron.clone();
    diff.add_scaled(&gauss, -1.0);
    let err = diff.norm() * half.abs();
    let mut value = kron.zero_like();
    value.add_scaled(&kron, half);
    (value, err)
}

/// Globally adaptive G7-K15 integration of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate is at most `max(rel_tol·|I|, abs_tol)`. Reaching
/// `max_intervals` panels is an error carrying the best estimate.
pub fn integrate_adaptive<V, F>(
    f: F,
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
) -> Result<Quad<V>, (Quad<V>, MathError)>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let (value, err) = gauss_kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    let mut total = value.clone();
    let mut total_err = err;
    heap.push(Panel { a, b, value, err });

    loop {
        let target = (opts.rel_tol * total.norm()).max(opts.abs_tol);
        if total_err <= target || total_err == 0.0 {
            break;
        }
        if heap.len() >= opts.max_intervals {
            let quad = Quad {
                value: total,
                err_estimate: total_err,
                intervals: heap.len(),
            };
            let best = first_component(&quad.value);
            let err = quad.err_estimate;
            let intervals = quad.intervals;
            return Err((
                quad,
                MathError::NonConvergence {
                    best,
                    err,
                    intervals,
                },
            ));
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at f64 resolution; keep it and stop refining
            heap.push(worst);
            break;
        }
        let (lv, le) = gauss_kronrod(&f, worst.a, mid);
        let (rv, re) = gauss_kronrod(&f, mid, worst.b);
        total.add_scaled(&worst.value, -1.0);
        total.add_scaled(&lv, 1.0);
        total.add_scaled(&rv, 1.0);
        total_err += le + re - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            err: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            err: re,
        });
    }

    // resum in panel order so the result does not carry update round-off
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = panels[0].value.zero_like();
    let mut err = 0.0;
    for p in &panels {
        value.add_scaled(&p.value, 1.0);
        err += p.err;
    }
    Ok(Quad {
        value,
        err_estimate: err,
        intervals: panels.len(),
    })
}

/// [`integrate_adaptive`] over consecutive panels `points[i]..points[i+1]`,
/// each held to the same options. `points` must be increasing.
pub fn integrate_with_breakpoints<V, F>(
    f: F,
    points: &[f64],
    opts: &AdaptiveOptions,
) -> Result<Quad<V>, (Quad<V>, MathError)>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    assert!(points.len() >= 2, "need at least one panel");
    let mut total: Option<Quad<V>> = None;
    for w in points.windows(2) {
        let piece = integrate_adaptive(&f, w[0], w[1], opts);
        let (q, failure) = match piece {
            Ok(q) => (q, None),
            Err((q, e)) => (q, Some(e)),
        };
        let acc = match total.take() {
            None => q,
            Some(mut acc) => {
                acc.value.add_scaled(&q.value, 1.0);
                acc.err_estimate += q.err_estimate;
                acc.intervals += q.intervals;
                acc
            }
        };
        if let Some(e) = failure {
            return Err((acc, e));
        }
        total = Some(acc);
    }
    Ok(total.expect("at least one panel"))
}

fn first_component<V: QuadValue>(v: &V) -> Complex64 {
    // report the magnitude when the value is not a plain scalar
    Complex64::new(v.norm(), 0.0)
}

/// `∫_a^b f(x) dx` for complex-valued `f`, to relative tolerance `rel_tol`.
pub fn adaptive_integral_1d<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Quad<Complex64>, MathError>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(MathError::InvalidInterval { a, b });
    }
    if !(rel_tol > 0.0) {
        return Err(MathError::InvalidTolerance(rel_tol));
    }
    match integrate_adaptive(f, a, b, &AdaptiveOptions::relative(rel_tol)) {
        Ok(q) => Ok(q),
        Err((q, _)) => Err(MathError::NonConvergence {
            best: q.value,
            err: q.err_estimate,
            intervals: q.intervals,
        }),
    }
}
