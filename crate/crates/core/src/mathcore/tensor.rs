use num_complex::Complex64;
use rayon::prelude::*;

use super::{MathError, QuadratureRule};

/// Largest dimension accepted by [`tensor_gaussian_integral`]. The gate
/// integrals need at most 4; 6 is used by the full two-photon cross-check.
pub const MAX_TENSOR_DIM: usize = 6;

/// `∫ f(x) ∏ N(x_i; mean_i, std_i) dx` by the affinely mapped tensor
/// product of `rule`.
///
/// The outermost axis is split across workers; partial sums are combined in
/// node order, so the result does not depend on the thread count.
pub fn tensor_gaussian_integral<F>(
    rule: &QuadratureRule,
    means: &[f64],
    stds: &[f64],
    f: F,
) -> Result<Complex64, MathError>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let dim = means.len();
    if dim == 0 || dim > MAX_TENSOR_DIM {
        return Err(MathError::DimensionMismatch(format!(
            "dimension {dim} outside 1..={MAX_TENSOR_DIM}"
        )));
    }
    if stds.len() != dim {
        return Err(MathError::DimensionMismatch(format!(
            "{dim} means but {} standard deviations",
            stds.len()
        )));
    }
    if let Some(&s) = stds.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(MathError::InvalidWidth(s));
    }
    if let Some(&m) = means.iter().find(|m| !m.is_finite()) {
        return Err(MathError::NonFinite(m));
    }

    let axes: Vec<Vec<(f64, f64)>> = (0..dim)
        .map(|d| rule.normal_points(means[d], stds[d]).collect())
        .collect();
    let n = rule.order;

    let partials: Vec<Complex64> = axes[0]
        .par_iter()
        .map(|&(x0, w0)| {
            let mut point = vec![0.0; dim];
            point[0] = x0;
            let mut idx = vec![0usize; dim];
            let mut acc = Complex64::new(0.0, 0.0);
            loop {
                let mut w = w0;
                for d in 1..dim {
                    let (x, wd) = axes[d][idx[d]];
                    point[d] = x;
                    w *= wd;
                }
                acc += f(&point) * w;
                // odometer over the inner axes
                let mut d = dim - 1;
                loop {
                    if d == 0 {
                        return acc;
                    }
                    idx[d] += 1;
                    if idx[d] < n {
                        break;
                    }
                    idx[d] = 0;
                    d -= 1;
                }
            }
        })
        .collect();
    Ok(partials.iter().sum())
}
