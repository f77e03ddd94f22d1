use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PropagatorError;
use crate::interaction::{GateGeometry, InteractionSpec};
use crate::mathcore::gaussian_cdf;
use crate::twophoton::{initial_relative_wavefunction, PulsePair};

/// Largest tail mass of `|ξ|²` allowed outside the box along any axis.
pub const MAX_TAIL_MASS: f64 = 1e-6;

/// Cell counts and box lengths (in units of `σ`) along `x`, `y` and the
/// co-moving longitudinal axis `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: [usize; 3],
    pub extent: [f64; 3],
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: [128, 128, 64],
            extent: [12.0, 12.0, 12.0],
        }
    }
}

impl GridSpec {
    pub fn new(n: [usize; 3], extent: [f64; 3]) -> Result<Self, PropagatorError> {
        let spec = Self { n, extent };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), PropagatorError> {
        for axis in 0..3 {
            if self.n[axis] < 2 {
                return Err(PropagatorError::InvalidGrid(format!(
                    "axis {axis} needs at least 2 cells, got {}",
                    self.n[axis]
                )));
            }
            let e = self.extent[axis];
            if !(e.is_finite() && e > 0.0) {
                return Err(PropagatorError::InvalidGrid(format!(
                    "axis {axis} extent must be positive, got {e}"
                )));
            }
        }
        Ok(())
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.n[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..3).map(|a| self.spacing(a)).product()
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cells per `s`-slice.
    pub fn slice_len(&self) -> usize {
        self.n[0] * self.n[1]
    }
}

/// A cell-centred box around `center` (in units of `σ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub spec: GridSpec,
    pub center: [f64; 3],
}

impl Grid {
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let n = self.spec.n[axis] as f64;
        self.center[axis] + (i as f64 + 0.5 - 0.5 * n) * self.spec.spacing(axis)
    }

    pub fn coords(&self, axis: usize) -> Vec<f64> {
        (0..self.spec.n[axis]).map(|i| self.coord(axis, i)).collect()
    }

    /// Angular wave numbers of the FFT ordering along a transverse axis.
    pub(crate) fn wave_numbers(&self, axis: usize) -> Vec<f64> {
        let n = self.spec.n[axis];
        let dq = 2.0 * std::f64::consts::PI / self.spec.extent[axis];
        (0..n)
            .map(|j| {
                let j = if j < n.div_ceil(2) { j as i64 } else { j as i64 - n as i64 };
                j as f64 * dq
            })
            .collect()
    }
}

/// `ξ(x, τ)` on a grid that moves with the initial wavepacket.
///
/// The longitudinal axis is the relative coordinate at `τ = 0`; at time `τ`
/// a cell labelled `s` sits at `s + 2τ`, so the interaction is sampled there
/// and the advection term never has to be integrated. Values are stored
/// slice by slice, `[s][x][y]`, with `y` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeWavefunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    /// Elapsed `τ = vt/σ`.
    pub time: f64,
    pub geometry: GateGeometry,
    /// The interaction the state has been evolved under, if any.
    pub spec: Option<InteractionSpec>,
}

impl RelativeWavefunction {
    /// Samples the initial Gaussian of `pair` on a box centred on it and
    /// normalizes the discrete norm to one.
    pub fn initial(pair: &PulsePair, spec: GridSpec) -> Result<Self, PropagatorError> {
        spec.validate()?;
        let geometry = pair.geometry;
        let sigma = geometry.sigma;
        let xi0 = initial_relative_wavefunction(pair);
        let center = [xi0.center[0] / sigma, xi0.center[1] / sigma, xi0.center[2] / sigma];
        check_tails(&spec, 1.0)?;
        let grid = Grid { spec, center };
        let axes: Vec<Vec<f64>> = (0..3)
            .map(|a| {
                grid.coords(a)
                    .into_iter()
                    .map(|x| {
                        let d = x - center[a];
                        (-0.25 * d * d).exp()
                    })
                    .collect()
            })
            .collect();
        let mut values = Vec::with_capacity(spec.len());
        for &fs in &axes[2] {
            for &fx in &axes[0] {
                for &fy in &axes[1] {
                    values.push(Complex64::new(fs * fx * fy, 0.0));
                }
            }
        }
        let mut state = Self {
            grid,
            values,
            time: 0.0,
            geometry,
            spec: None,
        };
        let scale = state.norm_squared().sqrt().recip();
        state.values.iter_mut().for_each(|v| *v *= scale);
        Ok(state)
    }

    /// `Σ|ξ|² ΔV`.
    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spec.cell_volume()
    }

    /// `Σ conj(self)·other ΔV`.
    pub fn inner(&self, other: &Self) -> Result<Complex64, PropagatorError> {
        self.check_compatible(other)?;
        let dv = self.grid.spec.cell_volume();
        let sum: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(sum * dv)
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<(), PropagatorError> {
        if self.grid != other.grid {
            return Err(PropagatorError::GridMismatch("grids differ".into()));
        }
        if (self.time - other.time).abs() > 1e-12 * self.time.abs().max(1.0) {
            return Err(PropagatorError::GridMismatch(format!(
                "times differ: {} vs {}",
                self.time, other.time
            )));
        }
        Ok(())
    }

    pub fn slice(&self, k: usize) -> &[Complex64] {
        let m = self.grid.spec.slice_len();
        &self.values[k * m..(k + 1) * m]
    }
}

/// Fails if a centred Gaussian `|ξ|²` of variance `variance` per transverse
/// axis (and unit variance along `s`) leaks more than [`MAX_TAIL_MASS`] out
/// of the box along any axis.
pub(crate) fn check_tails(spec: &GridSpec, variance: f64) -> Result<(), PropagatorError> {
    for axis in 0..3 {
        let std = if axis < 2 { variance.sqrt() } else { 1.0 };
        let mass = 2.0 * gaussian_cdf(-0.5 * spec.extent[axis] / std);
        if mass > MAX_TAIL_MASS {
            return Err(PropagatorError::GridTooSmall { axis, mass });
        }
    }
    Ok(())
}
