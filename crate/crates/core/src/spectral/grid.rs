use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Smallest resolution accepted on any axis.
pub const MIN_RESOLUTION: usize = 8;

/// Periodic torus discretization with cached transform plans.
///
/// Samples are stored row-major with axis 0 slowest. The wavenumber of
/// index `i` on an axis of resolution `n` and length `L` is `2π k / L`
/// with `k = i` for `i < n/2` and `k = i - n` otherwise, so the Nyquist
/// index `n/2` carries `k = -n/2`.
pub struct SpectralGrid {
    resolution: Vec<usize>,
    length: Vec<f64>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    modes: Vec<Mode>,
}

/// One lattice point of the discrete dual lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Integer wavenumber per axis (unused axes are 0).
    pub k: [i64; 2],
    /// Physical wavenumber β per axis.
    pub beta: [f64; 2],
    /// β with the Nyquist component zeroed, used by every derivative multiplier.
    pub beta_deriv: [f64; 2],
    /// True when the mode survives the 2/3-rule truncation.
    pub retained: bool,
}

impl Mode {
    pub fn norm(&self) -> f64 {
        self.beta[0].hypot(self.beta[1])
    }
}

impl SpectralGrid {
    pub fn new(resolution: &[usize], length: &[f64]) -> Result<Arc<Self>> {
        let dim = resolution.len();
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension {dim} unsupported (1 or 2)")));
        }
        if length.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "{} lengths given for {} axes",
                length.len(),
                dim
            )));
        }
        for (axis, (&n, &l)) in resolution.iter().zip(length).enumerate() {
            if n < MIN_RESOLUTION || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: resolution {n} must be a power of two >= {MIN_RESOLUTION}"
                )));
            }
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("axis {axis}: length {l} must be positive")));
            }
        }

        let mut planner = FftPlanner::<f64>::new();
        let forward = resolution.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = resolution.iter().map(|&n| planner.plan_fft_inverse(n)).collect();

        let axis_modes: Vec<Vec<(i64, f64, f64, bool)>> = resolution
            .iter()
            .zip(length)
            .map(|(&n, &l)| {
                let cutoff = ((n - 1) / 3) as i64;
                (0..n)
                    .map(|i| {
                        let k = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
                        let beta = 2.0 * PI * k as f64 / l;
                        let nyquist = i == n / 2;
                        let deriv = if nyquist { 0.0 } else { beta };
                        (k, beta, deriv, k.abs() <= cutoff)
                    })
                    .collect()
            })
            .collect();

        let total: usize = resolution.iter().product();
        let mut modes = Vec::with_capacity(total);
        for flat in 0..total {
            let mut mode = Mode {
                k: [0; 2],
                beta: [0.0; 2],
                beta_deriv: [0.0; 2],
                retained: true,
            };
            let mut rem = flat;
            for axis in (0..dim).rev() {
                let n = resolution[axis];
                let (k, beta, deriv, keep) = axis_modes[axis][rem % n];
                rem /= n;
                mode.k[axis] = k;
                mode.beta[axis] = beta;
                mode.beta_deriv[axis] = deriv;
                mode.retained &= keep;
            }
            modes.push(mode);
        }

        Ok(Arc::new(SpectralGrid {
            resolution: resolution.to_vec(),
            length: length.to_vec(),
            forward,
            inverse,
            modes,
        }))
    }

    /// `T^1` of length 2π.
    pub fn periodic_1d(n: usize) -> Result<Arc<Self>> {
        Self::new(&[n], &[2.0 * PI])
    }

    /// `T^2` of side 2π.
    pub fn periodic_2d(n0: usize, n1: usize) -> Result<Arc<Self>> {
        Self::new(&[n0, n1], &[2.0 * PI, 2.0 * PI])
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn length(&self) -> &[f64] {
        &self.length
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// |T^N|.
    pub fn volume(&self) -> f64 {
        self.length.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Smallest grid spacing over all axes.
    pub fn spacing(&self) -> f64 {
        self.resolution
            .iter()
            .zip(&self.length)
            .map(|(&n, &l)| l / n as f64)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Largest |β| representable on the lattice (Nyquist corner).
    pub fn max_wavenumber(&self) -> f64 {
        self.modes.iter().map(Mode::norm).fold(0.0, f64::max)
    }

    /// Physical coordinates of sample `flat`.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let mut x = [0.0; 2];
        let mut rem = flat;
        for axis in (0..self.dim()).rev() {
            let n = self.resolution[axis];
            x[axis] = (rem % n) as f64 * self.length[axis] / n as f64;
            rem /= n;
        }
        x
    }

    /// Flat index of the mode with integer wavenumber `k`, if representable.
    /// Both `±n/2` name the Nyquist index.
    pub fn mode_index(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim() {
            return None;
        }
        let mut flat = 0usize;
        for (axis, &ki) in k.iter().enumerate() {
            let n = self.resolution[axis] as i64;
            if ki.abs() > n / 2 {
                return None;
            }
            flat = flat * n as usize + ki.rem_euclid(n) as usize;
        }
        Some(flat)
    }

    /// In-place unnormalized multidimensional FFT.
    pub(crate) fn fft_in_place(&self, buf: &mut [Complex64], forward: bool) {
        let plans = if forward { &self.forward } else { &self.inverse };
        match self.dim() {
            1 => plans[0].process(buf),
            _ => {
                let (n0, n1) = (self.resolution[0], self.resolution[1]);
                plans[1].process(buf);
                let mut column = vec![Complex64::new(0.0, 0.0); n0];
                for j in 0..n1 {
                    for i in 0..n0 {
                        column[i] = buf[i * n1 + j];
                    }
                    plans[0].process(&mut column);
                    for i in 0..n0 {
                        buf[i * n1 + j] = column[i];
                    }
                }
            }
        }
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || (self.resolution == other.resolution && self.length == other.length)
    }
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("resolution", &self.resolution)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.resolution == other.resolution && self.length == other.length
    }
}
