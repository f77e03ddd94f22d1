use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Plans for 2D transforms of one `nx × ny` slice stored `[x][y]`. The
/// spectrum is kept transposed, `[qy][qx]`, to save a transpose per step.
#[derive(Clone)]
pub(crate) struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_x: planner.plan_fft_inverse(nx),
            inv_y: planner.plan_fft_inverse(ny),
        }
    }

    /// `field` (`[x][y]`) → `spectrum` (`[qy][qx]`). `field` is clobbered.
    pub fn forward(&self, field: &mut [Complex64], spectrum: &mut [Complex64]) {
        self.fwd_y.process(field);
        transpose(field, spectrum, self.nx, self.ny);
        self.fwd_x.process(spectrum);
    }

    /// `spectrum` (`[qy][qx]`) → `field` (`[x][y]`), normalized.
    /// `spectrum` is clobbered.
    pub fn inverse(&self, spectrum: &mut [Complex64], field: &mut [Complex64]) {
        self.inv_x.process(spectrum);
        transpose(spectrum, field, self.ny, self.nx);
        self.inv_y.process(field);
        let scale = 1.0 / (self.nx * self.ny) as f64;
        field.iter_mut().for_each(|v| *v *= scale);
    }
}

/// `src` is `rows × cols`, row-major; `dst` becomes `cols × rows`.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Spectral Laplacian of one slice, `∇²f = F⁻¹[-q² F f]`.
pub(crate) fn laplacian(fft: &Fft2, q2: &[f64], f: &[Complex64]) -> Vec<Complex64> {
    let mut work = f.to_vec();
    let mut spec = vec![Complex64::new(0.0, 0.0); f.len()];
    fft.forward(&mut work, &mut spec);
    spec.iter_mut().zip(q2).for_each(|(v, &q)| *v *= -q);
    fft.inverse(&mut spec, &mut work);
    work
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_plane_wave_laplacian() {
        let (nx, ny) = (12, 8);
        let (lx, ly) = (3.0, 2.0);
        let fft = Fft2::new(nx, ny);
        let (kx, ky) = (2.0 * std::f64::consts::PI * 2.0 / lx, 2.0 * std::f64::consts::PI * -1.0 / ly);
        let f: Vec<Complex64> = (0..nx * ny)
            .map(|i| {
                let (x, y) = ((i / ny) as f64 * lx / nx as f64, (i % ny) as f64 * ly / ny as f64);
                Complex64::from_polar(1.0, kx * x + ky * y)
            })
            .collect();
        let wave = |n: usize, l: f64| -> Vec<f64> {
            (0..n)
                .map(|j| {
                    let j = if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 };
                    2.0 * std::f64::consts::PI * j / l
                })
                .collect()
        };
        let (qx, qy) = (wave(nx, lx), wave(ny, ly));
        let q2: Vec<f64> = (0..ny * nx).map(|i| qx[i % nx].powi(2) + qy[i / nx].powi(2)).collect();
        let lap = laplacian(&fft, &q2, &f);
        for (a, b) in lap.iter().zip(&f) {
            assert!((a + (kx * kx + ky * ky) * b).norm() < 1e-10);
        }
        let mut work = f.clone();
        let mut spec = vec![Complex64::new(0.0, 0.0); f.len()];
        fft.forward(&mut work, &mut spec);
        fft.inverse(&mut spec, &mut work);
        for (a, b) in work.iter().zip(&f) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
