//! Isothermal Korteweg system with `μ(ρ) = μρ` and `κ(ρ) = κ/ρ`.
//!
//! Three evolution variants share one state layout:
//!
//! * `Original`: `(ρ, u)` with momentum
//!   `ρ(∂_t u + u·∇u) − div(μρ∇u) − div(αρ∇uᵗ) + ∇P = div K`.
//! * `EffectiveV1` / `EffectiveV2`: `(ρ, v)` with `v = u + (κ/μ)∇ln ρ` and
//!   `∂_t ρ + div(ρv) − (κ/μ)Δρ = 0`, `ρ∂_t v + ρu·∇v − div(μρ∇v) + ∇P = 0`.
//!   The two effective variants evolve by the same operator; they differ only
//!   in the coefficient constraints (`α = κ/μ` versus `α = 0, κ = μ²`).
//!
//! Tensor conventions: `(div(ρ∇u))_j = Σ_i ∂_i(ρ ∂_i u_j)` and
//! `(div(ρ∇uᵗ))_j = Σ_i ∂_i(ρ ∂_j u_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ScalarField, TensorField, VectorField};

/// Samples at or below this value are rejected as vacuum.
pub const DENSITY_FLOOR: f64 = 1e-8;

const COEFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Original,
    EffectiveV1,
    EffectiveV2,
}

impl Variant {
    pub fn velocity_kind(self) -> VelocityKind {
        match self {
            Variant::Original => VelocityKind::Physical,
            _ => VelocityKind::Effective,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::EffectiveV1 => "effective_v1",
            Variant::EffectiveV2 => "effective_v2",
        }
    }
}

/// Which velocity the state's vector field holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityKind {
    /// The fluid velocity `u`.
    Physical,
    /// The effective velocity `v = u + (κ/μ)∇ln ρ`.
    Effective,
}

/// Physical coefficients: viscosity `μ`, second viscosity `α`, capillarity `κ`,
/// pressure law `P = aρ^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub a: f64,
    pub gamma: f64,
    pub variant: Variant,
}

impl ModelParams {
    pub fn new(mu: f64, alpha: f64, kappa: f64, a: f64, gamma: f64, variant: Variant) -> Result<Self> {
        let p = ModelParams {
            mu,
            alpha,
            kappa,
            a,
            gamma,
            variant,
        };
        p.validate()?;
        Ok(p)
    }

    /// Effective variant with `α = κ/μ`.
    pub fn effective_v1(mu: f64, kappa: f64, a: f64, gamma: f64) -> Result<Self> {
        Self::new(mu, kappa / mu, kappa, a, gamma, Variant::EffectiveV1)
    }

    /// Simplified effective variant with `α = 0`, `κ = μ²`.
    pub fn effective_v2(mu: f64, a: f64, gamma: f64) -> Result<Self> {
        Self::new(mu, 0.0, mu * mu, a, gamma, Variant::EffectiveV2)
    }

    /// Every violated coefficient constraint, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let finite = [self.mu, self.alpha, self.kappa, self.a, self.gamma]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            v.push("all coefficients must be finite".to_string());
            return v;
        }
        if self.mu <= 0.0 {
            v.push(format!("mu = {} must be > 0", self.mu));
        }
        if self.alpha < 0.0 {
            v.push(format!("alpha = {} must be >= 0", self.alpha));
        }
        if self.mu <= self.alpha {
            v.push(format!("mu = {} must exceed alpha = {} (μ>α≥0)", self.mu, self.alpha));
        }
        if self.kappa <= 0.0 {
            v.push(format!("kappa = {} must be > 0", self.kappa));
        }
        if self.a <= 0.0 {
            v.push(format!("a = {} must be > 0", self.a));
        }
        if self.gamma < 1.0 {
            v.push(format!("gamma = {} must be >= 1", self.gamma));
        }
        match self.variant {
            Variant::Original => {}
            Variant::EffectiveV1 => {
                if self.mu > 0.0 && !close(self.alpha, self.kappa / self.mu) {
                    v.push(format!(
                        "variant effective_v1 requires alpha = kappa/mu (α=κ/μ); got alpha = {}, kappa/mu = {}",
                        self.alpha,
                        self.kappa / self.mu
                    ));
                }
            }
            Variant::EffectiveV2 => {
                if self.alpha != 0.0 || !close(self.kappa, self.mu * self.mu) {
                    v.push(format!(
                        "variant effective_v2 requires alpha = 0 and kappa = mu^2 (α=0 and κ=μ²); got alpha = {}, kappa = {}, mu^2 = {}",
                        self.alpha,
                        self.kappa,
                        self.mu * self.mu
                    ));
                }
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }

    /// Density diffusivity `κ/μ`.
    pub fn diffusivity(&self) -> f64 {
        self.kappa / self.mu
    }

    /// `P(s) = a s^γ`.
    pub fn pressure_at(&self, s: f64) -> f64 {
        self.a * s.powf(self.gamma)
    }

    /// `P'(s) = aγ s^{γ−1}`.
    pub fn pressure_derivative_at(&self, s: f64) -> f64 {
        self.a * self.gamma * s.powf(self.gamma - 1.0)
    }

    /// `Π(s)`: `a s^γ/(γ−1)` for `γ > 1`, `a(s ln s − s + 1)` for `γ = 1`.
    pub fn potential_at(&self, s: f64) -> f64 {
        if self.gamma == 1.0 {
            self.a * (s * s.ln() - s + 1.0)
        } else {
            self.a * s.powf(self.gamma) / (self.gamma - 1.0)
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= COEFF_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Rejects densities at or below [`DENSITY_FLOOR`] and non-finite samples.
pub fn check_density(rho: &ScalarField) -> Result<()> {
    match rho.values().iter().position(|&v| !(v > DENSITY_FLOOR)) {
        None => Ok(()),
        Some(index) => {
            let value = rho.values()[index];
            if value.is_nan() {
                Err(Error::InvalidField(format!("density is NaN at sample {index}")))
            } else {
                Err(Error::NonpositiveDensity { index, value })
            }
        }
    }
}

/// Simulation state: density, a velocity field, and time.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub rho: ScalarField,
    pub w: VectorField,
    pub kind: VelocityKind,
    pub time: f64,
}

impl FieldState {
    pub fn new(rho: ScalarField, w: VectorField, kind: VelocityKind, time: f64) -> Result<Self> {
        let s = FieldState { rho, w, kind, time };
        s.validate()?;
        Ok(s)
    }

    /// Constant density `rho_bar` at rest.
    pub fn equilibrium(
        grid: &std::sync::Arc<crate::spectral::SpectralGrid>,
        rho_bar: f64,
        kind: VelocityKind,
    ) -> Result<Self> {
        Self::new(
            ScalarField::constant(grid, rho_bar),
            VectorField::zeros(grid),
            kind,
            0.0,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho.grid().same_as(self.w.grid()) {
            return Err(Error::GridMismatch);
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(Error::InvalidField(format!(
                "time {} must be finite and >= 0",
                self.time
            )));
        }
        self.rho.check_finite()?;
        self.w.check_finite()?;
        check_density(&self.rho)
    }

    /// Fluid velocity `u` regardless of the stored kind.
    pub fn physical_velocity(&self, params: &ModelParams) -> Result<VectorField> {
        match self.kind {
            VelocityKind::Physical => Ok(self.w.clone()),
            VelocityKind::Effective => recover_u(&self.rho, &self.w, params),
        }
    }

    /// Effective velocity `v` regardless of the stored kind.
    pub fn effective_velocity(&self, params: &ModelParams) -> Result<VectorField> {
        match self.kind {
            VelocityKind::Effective => Ok(self.w.clone()),
            VelocityKind::Physical => effective_velocity(&self.rho, &self.w, params),
        }
    }

    /// Same physical state expressed with the other velocity.
    pub fn converted(&self, params: &ModelParams, kind: VelocityKind) -> Result<Self> {
        let w = match kind {
            VelocityKind::Physical => self.physical_velocity(params)?,
            VelocityKind::Effective => self.effective_velocity(params)?,
        };
        Ok(FieldState {
            rho: self.rho.clone(),
            w,
            kind,
            time: self.time,
        })
    }

    pub fn mass(&self) -> Result<f64> {
        self.rho.integrate()
    }
}

pub fn pressure(rho: &ScalarField, params: &ModelParams) -> Result<ScalarField> {
    check_density(rho)?;
    Ok(rho.map(|s| params.pressure_at(s)))
}

pub fn pressure_potential(rho: &ScalarField, params: &ModelParams) -> Result<ScalarField> {
    check_density(rho)?;
    Ok(rho.map(|s| params.potential_at(s)))
}

/// A density-dependent capillarity coefficient `κ(ρ)`.
pub trait CapillarityLaw {
    fn value(&self, rho: f64) -> f64;
    fn derivative(&self, rho: f64) -> f64;
}

/// `κ(ρ) = κ ρ^e`; `e = −1` is the coefficient behind the effective velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub kappa: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn constant(kappa: f64) -> Self {
        PowerLaw { kappa, exponent: 0.0 }
    }

    pub fn inverse_density(kappa: f64) -> Self {
        PowerLaw { kappa, exponent: -1.0 }
    }
}

impl CapillarityLaw for PowerLaw {
    fn value(&self, rho: f64) -> f64 {
        self.kappa * rho.powf(self.exponent)
    }

    fn derivative(&self, rho: f64) -> f64 {
        if self.exponent == 0.0 {
            0.0
        } else {
            self.kappa * self.exponent * rho.powf(self.exponent - 1.0)
        }
    }
}

/// `div K = ∇(ρκ(ρ)Δρ + ½(κ(ρ) + ρκ'(ρ))|∇ρ|²) − div(κ(ρ)∇ρ⊗∇ρ)`.
pub fn korteweg_div_general(rho: &ScalarField, law: &dyn CapillarityLaw) -> Result<VectorField> {
    check_density(rho)?;
    let k = rho.map(|s| law.value(s));
    let kp = rho.map(|s| law.derivative(s));
    if let Some(i) = k
        .values()
        .iter()
        .zip(kp.values())
        .position(|(a, b)| !a.is_finite() || !b.is_finite())
    {
        return Err(Error::CoefficientDomain(format!(
            "κ(ρ) or κ'(ρ) not finite at ρ = {}",
            rho.values()[i]
        )));
    }
    let grad = rho.gradient()?;
    let lap = rho.laplacian()?;
    let grad_sq = grad.dot(&grad)?.dealias()?;

    let rk = rho.product(&k)?;
    let first = rk.product(&lap)?;
    let coef = k.add(&rho.product(&kp)?)?;
    let second = coef.product(&grad_sq)?.scale(0.5);
    let scalar = first.add(&second)?;
    let grad_scalar = scalar.gradient()?;

    let dim = rho.grid().dim();
    let mut stress = Vec::with_capacity(dim);
    for i in 0..dim {
        let ki = k.product(grad.component(i))?;
        let row = (0..dim)
            .map(|j| ki.product(grad.component(j)))
            .collect::<Result<Vec<_>>>()?;
        stress.push(row);
    }
    let div_stress = TensorField::new(stress)?.divergence()?;
    grad_scalar.sub(&div_stress)
}

/// `div K = κ div(ρ ∇∇ ln ρ)`, valid for `κ(ρ) = κ/ρ`.
pub fn korteweg_div_special(rho: &ScalarField, kappa: f64) -> Result<VectorField> {
    check_density(rho)?;
    let hess = rho.map(f64::ln).hessian()?;
    let flux = hess.map_components(|h| rho.product(h))?;
    Ok(flux.divergence()?.scale(kappa))
}

/// `v = u + (κ/μ)∇ln ρ`.
pub fn effective_velocity(rho: &ScalarField, u: &VectorField, params: &ModelParams) -> Result<VectorField> {
    check_density(rho)?;
    let g = rho.map(f64::ln).gradient()?;
    u.add(&g.scale(params.diffusivity()))
}

/// `u = v − (κ/μ)∇ln ρ`.
pub fn recover_u(rho: &ScalarField, v: &VectorField, params: &ModelParams) -> Result<VectorField> {
    check_density(rho)?;
    let g = rho.map(f64::ln).gradient()?;
    v.sub(&g.scale(params.diffusivity()))
}

/// `Σ_i a_i ∂_i b_j`, dealiased.
pub fn advection(a: &VectorField, b: &VectorField) -> Result<VectorField> {
    let jac = b.jacobian()?;
    let dim = a.dim();
    let mut out = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut acc = ScalarField::zeros(a.grid());
        for i in 0..dim {
            acc = acc.add(&a.component(i).mul(jac.get(i, j))?)?;
        }
        out.push(acc.dealias()?);
    }
    VectorField::new(out)
}

/// `div(ρ∇u)` with `(∇u)_{ij} = ∂_i u_j`, dealiased flux.
pub fn div_rho_grad(rho: &ScalarField, u: &VectorField) -> Result<VectorField> {
    let jac = u.jacobian()?;
    jac.map_components(|c| rho.product(c))?.divergence()
}

/// `div(ρ∇uᵗ)`, i.e. component `j` is `Σ_i ∂_i(ρ ∂_j u_i)`.
pub fn div_rho_grad_transpose(rho: &ScalarField, u: &VectorField) -> Result<VectorField> {
    let jac = u.jacobian()?.transpose();
    jac.map_components(|c| rho.product(c))?.divergence()
}

/// Viscous force in conservative form `div(μρ∇u) + div(αρ∇uᵗ)`.
pub fn viscous_force(rho: &ScalarField, u: &VectorField, mu: f64, alpha: f64) -> Result<VectorField> {
    div_rho_grad(rho, u)?
        .scale(mu)
        .add(&div_rho_grad_transpose(rho, u)?.scale(alpha))
}

/// Viscous force in strain form `(μ−α)div(ρ∇u) + α div(ρDu)`, `Du = ∇u + ∇uᵗ`.
pub fn viscous_force_strain_form(rho: &ScalarField, u: &VectorField, mu: f64, alpha: f64) -> Result<VectorField> {
    let jac = u.jacobian()?;
    let strain = TensorField::new(
        (0..u.dim())
            .map(|i| {
                (0..u.dim())
                    .map(|j| jac.get(i, j).add(jac.get(j, i)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let div_strain = strain.map_components(|c| rho.product(c))?.divergence()?;
    div_rho_grad(rho, u)?.scale(mu - alpha).add(&div_strain.scale(alpha))
}

/// Time derivative of a state: `dρ/dt` and `dw/dt` (momentum divided by ρ).
#[derive(Debug, Clone)]
pub struct Tendency {
    pub density: ScalarField,
    pub velocity: VectorField,
}

fn check_kind(state: &FieldState, params: &ModelParams) -> Result<()> {
    let expected = params.variant.velocity_kind();
    if state.kind != expected {
        return Err(Error::VariantMismatch(format!(
            "variant {} expects {:?} velocity, state holds {:?}",
            params.variant.name(),
            expected,
            state.kind
        )));
    }
    Ok(())
}

/// Full right-hand side of the selected system.
pub fn rhs(state: &FieldState, params: &ModelParams) -> Result<Tendency> {
    params.validate()?;
    check_kind(state, params)?;
    check_density(&state.rho)?;
    match params.variant {
        Variant::Original => rhs_original(state, params),
        Variant::EffectiveV1 | Variant::EffectiveV2 => {
            let split = effective_rhs_parts(&state.rho, &state.w, params)?;
            Ok(Tendency {
                density: split.density_explicit.add(&split.density_diffusion)?,
                velocity: split.velocity,
            })
        }
    }
}

fn rhs_original(state: &FieldState, params: &ModelParams) -> Result<Tendency> {
    let rho = &state.rho;
    let u = &state.w;
    let mass_flux = u.try_map_components(|c| rho.product(c))?;
    let density = mass_flux.divergence()?.scale(-1.0);

    let force = viscous_force(rho, u, params.mu, params.alpha)?
        .sub(&pressure(rho, params)?.gradient()?)?
        .add(&korteweg_div_special(rho, params.kappa)?)?;
    let inv_rho = rho.map(f64::recip);
    let accel = force.try_map_components(|c| c.product(&inv_rho))?;
    let velocity = accel.sub(&advection(u, u)?)?;
    Ok(Tendency { density, velocity })
}

/// Effective-variant tendency split into the stiff linear density diffusion
/// and everything else.
#[derive(Debug, Clone)]
pub(crate) struct EffectiveParts {
    /// `−div(ρv)`.
    pub density_explicit: ScalarField,
    /// `(κ/μ)Δρ`.
    pub density_diffusion: ScalarField,
    /// `−u·∇v + (div(μρ∇v) − ∇P)/ρ`.
    pub velocity: VectorField,
}

pub(crate) fn effective_rhs_parts(rho: &ScalarField, v: &VectorField, params: &ModelParams) -> Result<EffectiveParts> {
    let u = recover_u(rho, v, params)?;
    let mass_flux = v.try_map_components(|c| rho.product(c))?;
    let density_explicit = mass_flux.divergence()?.scale(-1.0);
    let density_diffusion = rho.laplacian()?.scale(params.diffusivity());

    let force = div_rho_grad(rho, v)?
        .scale(params.mu)
        .sub(&pressure(rho, params)?.gradient()?)?;
    let inv_rho = rho.map(f64::recip);
    let accel = force.try_map_components(|c| c.product(&inv_rho))?;
    let velocity = accel.sub(&advection(&u, v)?)?;
    Ok(EffectiveParts {
        density_explicit,
        density_diffusion,
        velocity,
    })
}
