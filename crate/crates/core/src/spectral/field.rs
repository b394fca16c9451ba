use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::grid::{Mode, SpectralGrid};
use crate::error::{Error, Result};

/// Real samples of a scalar function on the torus.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<SpectralGrid>,
    data: Vec<f64>,
}

/// Fourier coefficients `û_β = (1/|T^N|) ∫ e^{-iβ·y} u(y) dy`, in grid order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<Complex64>,
}

/// N-component vector field.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

/// N×N tensor field, `components[i][j]`.
#[derive(Clone, Debug)]
pub struct TensorField {
    components: Vec<Vec<ScalarField>>,
}

impl ScalarField {
    pub fn new(grid: &Arc<SpectralGrid>, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} samples, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(ScalarField {
            grid: Arc::clone(grid),
            data,
        })
    }

    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<SpectralGrid>, value: f64) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            data: vec![value; grid.len()],
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let data = (0..grid.len()).map(|i| f(&grid.point(i)[..dim])).collect();
        ScalarField {
            grid: Arc::clone(grid),
            data,
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(Error::InvalidField(format!("non-finite sample at index {i}"))),
            None => Ok(()),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: Arc::clone(&self.grid),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_grid(other)?;
        Ok(ScalarField {
            grid: Arc::clone(&self.grid),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub(crate) fn check_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Pointwise product without dealiasing.
    pub fn mul(&self, other: &ScalarField) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Pointwise product followed by 2/3-rule truncation.
    pub fn product(&self, other: &ScalarField) -> Result<Self> {
        self.mul(other)?.dealias()
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Rectangle-rule quadrature `|T^N| · mean`, exact for resolved trigonometric polynomials.
    pub fn integrate(&self) -> Result<f64> {
        self.check_finite()?;
        Ok(self.grid.volume() * self.mean())
    }

    /// Discrete `L^p` norm; `p = ∞` is the sample maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_of(self.data.iter().map(|v| v.abs()), p, self.grid.cell_volume())
    }

    /// Discrete `L^2` norm.
    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn forward(&self) -> Result<Spectrum> {
        self.check_finite()?;
        let mut buf: Vec<Complex64> = self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.grid.fft_in_place(&mut buf, true);
        let norm = 1.0 / self.data.len() as f64;
        buf.iter_mut().for_each(|c| *c *= norm);
        Ok(Spectrum {
            grid: Arc::clone(&self.grid),
            coeffs: buf,
        })
    }

    /// Applies a real multiplier that is even in β (so the result stays real).
    pub fn apply_multiplier(&self, m: impl Fn(&Mode) -> f64) -> Result<Self> {
        let mut spec = self.forward()?;
        for (c, mode) in spec.coeffs.iter_mut().zip(self.grid.modes()) {
            *c *= m(mode);
        }
        Ok(spec.inverse())
    }

    /// Spectral `∂_axis`.
    pub fn partial(&self, axis: usize) -> Result<Self> {
        self.forward()?.partial(axis).map(|s| s.inverse())
    }

    pub fn gradient(&self) -> Result<VectorField> {
        let spec = self.forward()?;
        let components = (0..self.grid.dim())
            .map(|j| spec.partial(j).map(|s| s.inverse()))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { components })
    }

    pub fn laplacian(&self) -> Result<Self> {
        self.apply_multiplier(|m| -(m.beta_deriv[0].powi(2) + m.beta_deriv[1].powi(2)))
    }

    /// `∂_i ∂_j f`; multiplier `-β_i β_j` with Nyquist components zeroed.
    pub fn hessian(&self) -> Result<TensorField> {
        let spec = self.forward()?;
        let dim = self.grid.dim();
        let mut components = vec![Vec::with_capacity(dim); dim];
        for (i, row) in components.iter_mut().enumerate() {
            for j in 0..dim {
                let mut s = spec.clone();
                for (c, mode) in s.coeffs.iter_mut().zip(self.grid.modes()) {
                    *c *= -mode.beta_deriv[i] * mode.beta_deriv[j];
                }
                row.push(s.inverse());
            }
        }
        Ok(TensorField { components })
    }

    /// Zeroes every coefficient outside the 2/3-rule band.
    pub fn dealias(&self) -> Result<Self> {
        self.apply_multiplier(|m| if m.retained { 1.0 } else { 0.0 })
    }
}

pub(crate) fn lp_norm_of(values: impl Iterator<Item = f64>, p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else if p == 2.0 {
        (values.map(|v| v * v).sum::<f64>() * cell).sqrt()
    } else {
        (values.map(|v| v.powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

impl Spectrum {
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn from_coefficients(grid: &Arc<SpectralGrid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Spectrum {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Coefficient at integer wavenumber `k` (zero if not representable).
    pub fn coefficient(&self, k: &[i64]) -> Complex64 {
        self.grid.mode_index(k).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    /// Mean value `û_0`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    fn partial(&self, axis: usize) -> Result<Spectrum> {
        if axis >= self.grid.dim() {
            return Err(Error::InvalidField(format!("axis {axis} out of range")));
        }
        let mut out = self.clone();
        for (c, mode) in out.coeffs.iter_mut().zip(self.grid.modes()) {
            *c *= Complex64::new(0.0, mode.beta_deriv[axis]);
        }
        Ok(out)
    }

    /// Inverse transform; the imaginary residue of a Hermitian spectrum is discarded.
    pub fn inverse(&self) -> ScalarField {
        let mut buf = self.coeffs.clone();
        self.grid.fft_in_place(&mut buf, false);
        ScalarField {
            grid: Arc::clone(&self.grid),
            data: buf.iter().map(|c| c.re).collect(),
        }
    }
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidField("vector field needs components".into()))?;
        if components.len() != first.grid.dim() {
            return Err(Error::InvalidField(format!(
                "{} components on a {}-dimensional grid",
                components.len(),
                first.grid.dim()
            )));
        }
        for c in &components[1..] {
            first.check_grid(c)?;
        }
        Ok(VectorField { components })
    }

    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self::constant(grid, &vec![0.0; grid.dim()])
    }

    /// Constant vector; missing trailing components are zero.
    pub fn constant(grid: &Arc<SpectralGrid>, value: &[f64]) -> Self {
        VectorField {
            components: (0..grid.dim())
                .map(|j| ScalarField::constant(grid, value.get(j).copied().unwrap_or(0.0)))
                .collect(),
        }
    }

    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn(&[f64], usize) -> f64) -> Self {
        VectorField {
            components: (0..grid.dim())
                .map(|j| ScalarField::from_fn(grid, |x| f(x, j)))
                .collect(),
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &ScalarField {
        &self.components[j]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    pub fn check_finite(&self) -> Result<()> {
        self.components.iter().try_for_each(ScalarField::check_finite)
    }

    fn zip_with(
        &self,
        other: &VectorField,
        f: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>,
    ) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::GridMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { components })
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        self.zip_with(other, ScalarField::add)
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        self.zip_with(other, ScalarField::sub)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_components(|f| f.scale(c))
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        VectorField {
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn try_map_components(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Self> {
        Ok(VectorField {
            components: self.components.iter().map(f).collect::<Result<Vec<_>>>()?,
        })
    }

    /// Pointwise `F · G` (not dealiased).
    pub fn dot(&self, other: &VectorField) -> Result<ScalarField> {
        let mut acc = ScalarField::zeros(self.grid());
        for (a, b) in self.components.iter().zip(&other.components) {
            acc = acc.add(&a.mul(b)?)?;
        }
        Ok(acc)
    }

    /// Pointwise `|F|^2`.
    pub fn norm_squared(&self) -> ScalarField {
        let grid = self.grid();
        let mut data = vec![0.0; grid.len()];
        for c in &self.components {
            for (d, v) in data.iter_mut().zip(c.values()) {
                *d += v * v;
            }
        }
        ScalarField {
            grid: Arc::clone(grid),
            data,
        }
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        self.norm_squared().map(f64::sqrt)
    }

    /// Discrete `L^p` norm of the pointwise Euclidean magnitude.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.magnitude().lp_norm(p)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().max()
    }

    pub fn divergence(&self) -> Result<ScalarField> {
        let mut acc = ScalarField::zeros(self.grid());
        for (j, c) in self.components.iter().enumerate() {
            acc = acc.add(&c.partial(j)?)?;
        }
        Ok(acc)
    }

    /// Jacobian `J[i][j] = ∂_i F_j`.
    pub fn jacobian(&self) -> Result<TensorField> {
        let dim = self.dim();
        let mut rows: Vec<Vec<ScalarField>> = vec![Vec::with_capacity(dim); dim];
        for c in &self.components {
            let g = c.gradient()?;
            for (i, gi) in g.components.into_iter().enumerate() {
                rows[i].push(gi);
            }
        }
        Ok(TensorField { components: rows })
    }

    pub fn dealias(&self) -> Result<Self> {
        self.try_map_components(ScalarField::dealias)
    }
}

impl TensorField {
    pub fn new(components: Vec<Vec<ScalarField>>) -> Result<Self> {
        let n = components.len();
        if n == 0 || components.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidField("tensor field must be square".into()));
        }
        if components[0][0].grid().dim() != n {
            return Err(Error::InvalidField("tensor rank does not match grid dimension".into()));
        }
        Ok(TensorField { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[i][j]
    }

    pub fn components(&self) -> &[Vec<ScalarField>] {
        &self.components
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        TensorField {
            components: (0..n)
                .map(|i| (0..n).map(|j| self.components[j][i].clone()).collect())
                .collect(),
        }
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Self> {
        Ok(TensorField {
            components: self
                .components
                .iter()
                .map(|row| row.iter().map(&f).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// Row divergence: `(div T)_j = Σ_i ∂_i T_ij`.
    pub fn divergence(&self) -> Result<VectorField> {
        let n = self.dim();
        let grid = self.components[0][0].grid();
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = ScalarField::zeros(grid);
            for i in 0..n {
                acc = acc.add(&self.components[i][j].partial(i)?)?;
            }
            out.push(acc);
        }
        VectorField::new(out)
    }

    /// Pointwise Frobenius norm squared `Σ_ij T_ij^2`.
    pub fn frobenius_squared(&self) -> ScalarField {
        let grid = self.components[0][0].grid();
        let mut data = vec![0.0; grid.len()];
        for row in &self.components {
            for c in row {
                for (d, v) in data.iter_mut().zip(c.values()) {
                    *d += v * v;
                }
            }
        }
        ScalarField {
            grid: Arc::clone(grid),
            data,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|row| row.iter().map(ScalarField::max_abs))
            .fold(0.0, f64::max)
    }
}

/// Relative discrete `L^2` distance `‖a − b‖ / ‖b‖` (absolute when `b ≡ 0`).
pub fn relative_l2(a: &VectorField, b: &VectorField) -> Result<f64> {
    let diff = a.sub(b)?.lp_norm(2.0);
    let scale = b.lp_norm(2.0);
    Ok(if scale > 0.0 { diff / scale } else { diff })
}
