//! Closed-form solutions of the forced effective system, for convergence studies.
//!
//! 1D: `ρ = 2 + ½sin(x + t)`, `v = 0.3 cos x e^{−t}`.
//! 2D: `ρ = 2 + ½sin(x + t)cos y`, `v = e^{−t}(0.3 cos x sin y, 0.2 sin(x + y))`.
//! The forcing is assembled pointwise from hand-derived derivatives, never
//! from the spectral operators under test.

use std::sync::Arc;

use crate::integrator::Forcing;
use crate::model::{FieldState, ModelParams, VelocityKind};
use crate::spectral::{ScalarField, SpectralGrid, VectorField};

/// Value, gradient, Laplacian and time derivative at one point.
#[derive(Debug, Clone, Copy)]
struct Jet {
    f: f64,
    grad: [f64; 2],
    lap: f64,
    dt: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Manufactured {
    dim: usize,
    params: ModelParams,
}

impl Manufactured {
    /// Solution on `T^dim` with `μ = 1`, `κ = 1`, `a = 1`, `γ = 2` (simplified variant).
    pub fn new(dim: usize) -> Self {
        assert!(dim == 1 || dim == 2, "manufactured solutions exist for dim 1 and 2");
        Manufactured {
            dim,
            params: ModelParams::effective_v2(1.0, 1.0, 2.0).expect("fixed valid coefficients"),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    fn rho_jet(&self, x: &[f64], t: f64) -> Jet {
        let (s, c) = (x[0] + t).sin_cos();
        if self.dim == 1 {
            Jet {
                f: 2.0 + 0.5 * s,
                grad: [0.5 * c, 0.0],
                lap: -0.5 * s,
                dt: 0.5 * c,
            }
        } else {
            let (sy, cy) = x[1].sin_cos();
            Jet {
                f: 2.0 + 0.5 * s * cy,
                grad: [0.5 * c * cy, -0.5 * s * sy],
                lap: -s * cy,
                dt: 0.5 * c * cy,
            }
        }
    }

    fn velocity_jet(&self, x: &[f64], t: f64, j: usize) -> Jet {
        let e = (-t).exp();
        let (sx, cx) = x[0].sin_cos();
        match (self.dim, j) {
            (1, _) => Jet {
                f: 0.3 * cx * e,
                grad: [-0.3 * sx * e, 0.0],
                lap: -0.3 * cx * e,
                dt: -0.3 * cx * e,
            },
            (_, 0) => {
                let (sy, cy) = x[1].sin_cos();
                Jet {
                    f: 0.3 * cx * sy * e,
                    grad: [-0.3 * sx * sy * e, 0.3 * cx * cy * e],
                    lap: -0.6 * cx * sy * e,
                    dt: -0.3 * cx * sy * e,
                }
            }
            _ => {
                let (s, c) = (x[0] + x[1]).sin_cos();
                Jet {
                    f: 0.2 * s * e,
                    grad: [0.2 * c * e, 0.2 * c * e],
                    lap: -0.4 * s * e,
                    dt: -0.2 * s * e,
                }
            }
        }
    }

    /// Exact state at time `t`.
    pub fn state(&self, grid: &Arc<SpectralGrid>, t: f64) -> FieldState {
        assert_eq!(grid.dim(), self.dim);
        let rho = ScalarField::from_fn(grid, |x| self.rho_jet(x, t).f);
        let w = VectorField::from_fn(grid, |x, j| self.velocity_jet(x, t, j).f);
        FieldState::new(rho, w, VelocityKind::Effective, t).expect("manufactured density is positive")
    }

    fn density_source(&self, x: &[f64], t: f64) -> f64 {
        let r = self.rho_jet(x, t);
        let d = self.params.diffusivity();
        let mut div_flux = 0.0;
        for i in 0..self.dim {
            let v = self.velocity_jet(x, t, i);
            div_flux += r.grad[i] * v.f + r.f * v.grad[i];
        }
        r.dt + div_flux - d * r.lap
    }

    fn velocity_source(&self, x: &[f64], t: f64, j: usize) -> f64 {
        let p = &self.params;
        let r = self.rho_jet(x, t);
        let d = p.diffusivity();
        let vj = self.velocity_jet(x, t, j);
        let mut transport = 0.0;
        let mut weighted = 0.0;
        for i in 0..self.dim {
            let ui = self.velocity_jet(x, t, i).f - d * r.grad[i] / r.f;
            transport += ui * vj.grad[i];
            weighted += r.grad[i] / r.f * vj.grad[i];
        }
        let pressure = p.a * p.gamma * r.f.powf(p.gamma - 2.0) * r.grad[j];
        vj.dt + transport - p.mu * (vj.lap + weighted) + pressure
    }
}

impl Forcing for Manufactured {
    fn density(&self, grid: &Arc<SpectralGrid>, t: f64) -> ScalarField {
        ScalarField::from_fn(grid, |x| self.density_source(x, t))
    }

    fn velocity(&self, grid: &Arc<SpectralGrid>, t: f64) -> VectorField {
        VectorField::from_fn(grid, |x, j| self.velocity_source(x, t, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rhs;

    // The spectral tendency plus the forcing must reproduce the exact time derivative.
    #[test]
    fn forcing_closes_the_equations() {
        for (dim, n) in [(1, 64), (2, 64)] {
            let m = Manufactured::new(dim);
            let grid = if dim == 1 {
                SpectralGrid::periodic_1d(n).unwrap()
            } else {
                SpectralGrid::periodic_2d(n, n).unwrap()
            };
            let t = 0.37;
            let s = m.state(&grid, t);
            let tend = rhs(&s, &m.params()).unwrap();
            let drho = tend.density.add(&m.density(&grid, t)).unwrap();
            let exact = ScalarField::from_fn(&grid, |x| m.rho_jet(x, t).dt);
            assert!(drho.sub(&exact).unwrap().max_abs() < 1e-11);
            let dv = tend.velocity.add(&m.velocity(&grid, t)).unwrap();
            let exact = VectorField::from_fn(&grid, |x, j| m.velocity_jet(x, t, j).dt);
            assert!(dv.sub(&exact).unwrap().max_magnitude() < 1e-11);
        }
    }
}
