//! Seeded smooth random fields.
//!
//! A field is a finite trigonometric sum whose terms are drawn in a
//! canonical wavenumber order, so the same seed yields the same function on
//! every resolution that resolves it.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::spectral::{ScalarField, SpectralGrid, Spectrum};

/// Finite Fourier series `Σ c_k e^{ik·x}` (real part taken on evaluation).
#[derive(Debug, Clone)]
pub struct TrigSeries {
    dim: usize,
    terms: Vec<([i64; 2], Complex64)>,
}

impl TrigSeries {
    /// Random coefficients with magnitude `(1 + |k|)^{-slope}` for `1 <= max|k_j| <= kmax`,
    /// scaled so that the sum of magnitudes is one (hence `sup |f| <= 1`).
    pub fn random(dim: usize, seed: u64, slope: f64, kmax: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let km = kmax as i64;
        let mut terms = Vec::new();
        let ky_range = if dim == 2 { -km..=km } else { 0..=0 };
        for kx in -km..=km {
            for ky in ky_range.clone() {
                if kx == 0 && ky == 0 {
                    continue;
                }
                let kn = ((kx * kx + ky * ky) as f64).sqrt();
                let amp = (1.0 + kn).powf(-slope) * rng.gen_range(0.2..1.0);
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                terms.push(([kx, ky], Complex64::from_polar(amp, phase)));
            }
        }
        let total: f64 = terms.iter().map(|(_, c)| c.norm()).sum();
        if total > 0.0 {
            terms.iter_mut().for_each(|(_, c)| *c /= total);
        }
        TrigSeries { dim, terms }
    }

    pub fn max_wavenumber(&self) -> i64 {
        self.terms
            .iter()
            .map(|(k, _)| k[0].abs().max(k[1].abs()))
            .max()
            .unwrap_or(0)
    }

    /// Samples the series on `grid`. Terms at or beyond the Nyquist index are dropped.
    pub fn evaluate(&self, grid: &Arc<SpectralGrid>) -> ScalarField {
        assert_eq!(grid.dim(), self.dim, "series dimension does not match grid");
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (k, c) in &self.terms {
            let k = &k[..self.dim];
            let fits = k
                .iter()
                .zip(grid.resolution())
                .all(|(&ki, &n)| ki.abs() < (n / 2) as i64);
            if !fits {
                continue;
            }
            let neg: Vec<i64> = k.iter().map(|v| -v).collect();
            let (i, j) = (grid.mode_index(k).unwrap(), grid.mode_index(&neg).unwrap());
            // Real part of c e^{ikx} = ½(c e^{ikx} + c̄ e^{-ikx}).
            coeffs[i] += 0.5 * c;
            coeffs[j] += 0.5 * c.conj();
        }
        Spectrum::from_coefficients(grid, coeffs).unwrap().inverse()
    }
}

/// Mean-free smooth field with `sup |f| <= 1`.
pub fn random_smooth(grid: &Arc<SpectralGrid>, seed: u64, slope: f64, kmax: usize) -> ScalarField {
    let kmax = kmax.min(grid.resolution().iter().min().unwrap() / 2 - 1);
    TrigSeries::random(grid.dim(), seed, slope, kmax).evaluate(grid)
}

/// Smooth density with values in `[center - half_width, center + half_width]`.
pub fn random_density(grid: &Arc<SpectralGrid>, seed: u64, center: f64, half_width: f64, kmax: usize) -> ScalarField {
    random_smooth(grid, seed, 1.0, kmax).map(|v| center + half_width * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_function_across_resolutions() {
        let coarse = SpectralGrid::periodic_1d(32).unwrap();
        let fine = SpectralGrid::periodic_1d(64).unwrap();
        let a = random_smooth(&coarse, 5, 1.0, 6);
        let b = random_smooth(&fine, 5, 1.0, 6);
        for i in 0..32 {
            assert!((a.values()[i] - b.values()[2 * i]).abs() < 1e-14);
        }
    }

    #[test]
    fn bounded_and_mean_free() {
        let grid = SpectralGrid::periodic_2d(32, 32).unwrap();
        for seed in 0..5 {
            let f = random_smooth(&grid, seed, 1.0, 6);
            assert!(f.max_abs() <= 1.0 + 1e-12);
            assert!(f.mean().abs() < 1e-14);
        }
        let rho = random_density(&grid, 9, 2.0, 1.0, 4);
        assert!(rho.min() >= 1.0 - 1e-12 && rho.max() <= 3.0 + 1e-12);
    }
}
