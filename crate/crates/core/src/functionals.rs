//! Energy, entropy, integrability and blow-up functionals.
//!
//! Every functional accepts a state holding either velocity; the physical
//! velocity `u` enters the energy and BD entropy, the effective velocity `v`
//! enters the Mellet–Vasseur entropy, the integrability functional and the
//! Serrin accumulator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_density, FieldState, ModelParams};
use crate::spectral::ScalarField;
#[cfg(test)]
use crate::spectral::VectorField;

/// Bumped whenever a report field is added, removed or renamed.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// `∫(ρ|u|² + Π(ρ) + κ|∇√ρ|²)` split into its addends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub pressure: f64,
    pub capillary: f64,
    pub total: f64,
}

pub fn energy(state: &FieldState, params: &ModelParams) -> Result<EnergyParts> {
    let u = state.physical_velocity(params)?;
    let rho = &state.rho;
    let kinetic = rho.mul(&u.norm_squared())?.integrate()?;
    let pressure = rho.map(|s| params.potential_at(s)).integrate()?;
    let capillary = params.kappa * rho.map(f64::sqrt).gradient()?.norm_squared().integrate()?;
    Ok(EnergyParts {
        kinetic,
        pressure,
        capillary,
        total: kinetic + pressure + capillary,
    })
}

/// `∫(ρ|v|²/2 + Π(ρ))`, the energy of the simplified system.
pub fn effective_energy(state: &FieldState, params: &ModelParams) -> Result<f64> {
    let v = state.effective_velocity(params)?;
    let rho = &state.rho;
    let kinetic = rho.mul(&v.norm_squared())?.integrate()?;
    let potential = rho.map(|s| params.potential_at(s)).integrate()?;
    Ok(0.5 * kinetic + potential)
}

/// BD entropy and its instantaneous dissipation rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdEntropy {
    pub value: f64,
    /// `(μ−α)∫ρ|∇u|² + (α/2)∫ρ|∇u + ∇uᵗ|²`.
    pub viscous_rate: f64,
    /// `∫∇ln ρ·∇ρ^γ = aγ∫ρ^{γ−2}|∇ρ|²`.
    pub pressure_cross_rate: f64,
    /// `κ∫ρ Σ_ij (∂_ij ln ρ)²`.
    pub capillary_rate: f64,
}

pub fn bd_entropy(state: &FieldState, params: &ModelParams) -> Result<BdEntropy> {
    let e = energy(state, params)?;
    let rho = &state.rho;
    let u = state.physical_velocity(params)?;
    let jac = u.jacobian()?;
    let dim = u.dim();
    let mut grad_sq = ScalarField::zeros(rho.grid());
    let mut sym_sq = ScalarField::zeros(rho.grid());
    for i in 0..dim {
        for j in 0..dim {
            let a = jac.get(i, j);
            grad_sq = grad_sq.add(&a.mul(a)?)?;
            let s = a.add(jac.get(j, i))?;
            sym_sq = sym_sq.add(&s.mul(&s)?)?;
        }
    }
    let viscous_rate = (params.mu - params.alpha) * rho.mul(&grad_sq)?.integrate()?
        + 0.5 * params.alpha * rho.mul(&sym_sq)?.integrate()?;

    let grad_rho_sq = rho.gradient()?.norm_squared();
    let weight = rho.map(|s| params.a * params.gamma * s.powf(params.gamma - 2.0));
    let pressure_cross_rate = weight.mul(&grad_rho_sq)?.integrate()?;

    let hess = rho.map(f64::ln).hessian()?;
    let capillary_rate = params.kappa * rho.mul(&hess.frobenius_squared())?.integrate()?;
    Ok(BdEntropy {
        value: e.total,
        viscous_rate,
        pressure_cross_rate,
        capillary_rate,
    })
}

/// Mellet–Vasseur entropy with exponent `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MvEntropy {
    /// `∫ρ|v|^{2+δ}/(2+δ)`.
    pub value: f64,
    /// `(μ/4)∫ρ|v|^δ|∇v|²`.
    pub dissipation: f64,
    /// `(∫(ρ^{2γ−1−δ/2})^{2/(2−δ)})^{2/(2−δ)} (∫ρ|v|²)^{δ/2}`, taken literally.
    pub rhs_bound: f64,
}

pub fn mv_entropy(state: &FieldState, params: &ModelParams, delta: f64) -> Result<MvEntropy> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    check_density(&state.rho)?;
    let v = state.effective_velocity(params)?;
    let rho = &state.rho;
    let speed = v.magnitude();
    let value = rho.mul(&speed.map(|s| s.powf(2.0 + delta)))?.integrate()? / (2.0 + delta);
    let grad_sq = v.jacobian()?.frobenius_squared();
    let weight = speed.map(|s| s.powf(delta));
    let dissipation = 0.25 * params.mu * rho.mul(&weight)?.mul(&grad_sq)?.integrate()?;

    let e = 2.0 / (2.0 - delta);
    let base = rho
        .map(|s| s.powf(2.0 * params.gamma - 1.0 - 0.5 * delta).powf(e))
        .integrate()?;
    let kinetic = rho.mul(&v.norm_squared())?.integrate()?;
    let rhs_bound = base.powf(e) * kinetic.powf(0.5 * delta);
    Ok(MvEntropy {
        value,
        dissipation,
        rhs_bound,
    })
}

/// Integrability functional `A(p)` and its dissipation rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integrability {
    /// `(1/p)∫ρ|v|^p`.
    pub value: f64,
    /// `∫ρ|v|^{p−2}|∇v|²`.
    pub gradient_rate: f64,
    /// `(p−2)∫ρ|v|^{p−4} Σ_ijk v_j v_k ∂_i v_j ∂_i v_k`, the authoritative quartic rate.
    pub quartic_rate: f64,
    /// `(p−2)∫ρ|v|^{p−4} Σ_i (½∂_i|v|²)²` with `|v|²` differentiated spectrally.
    pub quartic_rate_identity: f64,
    /// `(p−2)∫ρ|v|^{p−4} Σ_i (∂_i|v|²)²`, which carries no ½ and is four times the identity form.
    pub quartic_rate_literal: f64,
}

/// `|v|^e`, with `0` wherever `v = 0` (the weighted terms vanish there).
fn speed_power(speed: &ScalarField, e: f64) -> ScalarField {
    speed.map(|s| if s == 0.0 { 0.0 } else { s.powf(e) })
}

pub fn integrability_functional(state: &FieldState, params: &ModelParams, p: f64) -> Result<Integrability> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::PExponentOutOfRange(p));
    }
    check_density(&state.rho)?;
    let v = state.effective_velocity(params)?;
    let rho = &state.rho;
    let speed = v.magnitude();
    let value = rho.mul(&speed_power(&speed, p))?.integrate()? / p;

    let jac = v.jacobian()?;
    let gradient_rate = rho
        .mul(&speed_power(&speed, p - 2.0))?
        .mul(&jac.frobenius_squared())?
        .integrate()?;

    let dim = v.dim();
    let mut quad = ScalarField::zeros(rho.grid());
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                let t = v
                    .component(j)
                    .mul(v.component(k))?
                    .mul(jac.get(i, j))?
                    .mul(jac.get(i, k))?;
                quad = quad.add(&t)?;
            }
        }
    }
    let w = rho.mul(&speed_power(&speed, p - 4.0))?;
    let quartic_rate = (p - 2.0) * w.mul(&quad)?.integrate()?;

    let half_grad = v.norm_squared().gradient()?.scale(0.5).norm_squared();
    let quartic_rate_identity = (p - 2.0) * w.mul(&half_grad)?.integrate()?;
    Ok(Integrability {
        value,
        gradient_rate,
        quartic_rate,
        quartic_rate_identity,
        quartic_rate_literal: 4.0 * quartic_rate_identity,
    })
}

/// Vacuum functional `B(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VacuumFunctional {
    /// `(1/(p−1))∫ρ^{1−p}`.
    pub value: f64,
    /// `(4pκ/(μ(p−1)²))∫|∇ρ^{−(p−1)/2}|²`.
    pub rate: f64,
    /// Sup-norm gap between the two sides of the multiplier identity.
    pub identity_residual: f64,
}

pub fn vacuum_functional(state: &FieldState, params: &ModelParams, p: f64) -> Result<VacuumFunctional> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::PExponentOutOfRange(p));
    }
    let rho = &state.rho;
    check_density(rho)?;
    let d = params.diffusivity();
    let value = rho.map(|s| s.powf(1.0 - p)).integrate()? / (p - 1.0);
    let coef = 4.0 * p * d / ((p - 1.0) * (p - 1.0));
    let root_sq = rho.map(|s| s.powf(-0.5 * (p - 1.0))).gradient()?.norm_squared();
    let rate = coef * root_sq.integrate()?;
    let residual = vacuum_identity_residual(rho, params, p)?;
    Ok(VacuumFunctional {
        value,
        rate,
        identity_residual: residual.max_abs(),
    })
}

/// `(κ/(μρ^p))Δρ + (κ/(μ(p−1)))Δ(ρ^{1−p}) − (4pκ/(μ(p−1)²))|∇ρ^{−(p−1)/2}|²`, pointwise.
pub fn vacuum_identity_residual(rho: &ScalarField, params: &ModelParams, p: f64) -> Result<ScalarField> {
    check_density(rho)?;
    let d = params.diffusivity();
    let lhs = rho.laplacian()?.zip_map(rho, |l, s| d * l / s.powf(p))?;
    let a = rho.map(|s| s.powf(1.0 - p)).laplacian()?.scale(-d / (p - 1.0));
    let b = rho
        .map(|s| s.powf(-0.5 * (p - 1.0)))
        .gradient()?
        .norm_squared()
        .scale(4.0 * p * d / ((p - 1.0) * (p - 1.0)));
    lhs.sub(&a.add(&b)?)
}

/// `‖v‖_{L^q}^p`, the Serrin integrand.
pub fn serrin_integrand(state: &FieldState, params: &ModelParams, p: f64, q: f64) -> Result<f64> {
    Ok(state.effective_velocity(params)?.lp_norm(q).powf(p))
}

pub fn check_serrin_pair(p: f64, q: f64, dim: usize) -> Result<()> {
    let ok = p >= 1.0 && p.is_finite() && q >= 1.0 && (1.0 / p + dim as f64 / (2.0 * q) - 0.5).abs() <= 1e-12;
    if ok {
        Ok(())
    } else {
        Err(Error::ScalingPairInvalid { p, q, dim })
    }
}

/// `∫_0^T ‖v‖_{L^q}^p dt`, trapezoidal over the snapshots.
pub fn serrin_accumulator(snapshots: &[FieldState], params: &ModelParams, p: f64, q: f64) -> Result<f64> {
    let first = snapshots.first().ok_or(Error::EmptyTrajectory)?;
    check_serrin_pair(p, q, first.rho.grid().dim())?;
    let times: Vec<f64> = snapshots.iter().map(|s| s.time).collect();
    let values = snapshots
        .iter()
        .map(|s| serrin_integrand(s, params, p, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(trapezoid(&times, &values))
}

pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// `∫ρ^{−ε}·[ρ ≤ δ]` with a sharp indicator.
pub fn vacuum_indicator(rho: &ScalarField, epsilon: f64, delta: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::PExponentOutOfRange(epsilon));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    check_density(rho)?;
    rho.map(|s| if s <= delta { s.powf(-epsilon) } else { 0.0 }).integrate()
}

/// `‖ρ^{−(p−1)/2}‖_{L^k_T L^q}` over the snapshots, `k` and `q` possibly infinite.
pub fn vacuum_endpoint_norm(snapshots: &[FieldState], p: f64, k: f64, q: f64) -> Result<f64> {
    if snapshots.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let norms = snapshots
        .iter()
        .map(|s| {
            check_density(&s.rho)?;
            Ok(s.rho.map(|r| r.powf(-0.5 * (p - 1.0))).lp_norm(q))
        })
        .collect::<Result<Vec<_>>>()?;
    if k.is_infinite() {
        return Ok(norms.iter().copied().fold(0.0, f64::max));
    }
    let times: Vec<f64> = snapshots.iter().map(|s| s.time).collect();
    let powered: Vec<f64> = norms.iter().map(|n| n.powf(k)).collect();
    Ok(trapezoid(&times, &powered).powf(1.0 / k))
}

/// Exponents and thresholds selecting which functionals a report evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonitorConfig {
    /// Mellet–Vasseur exponent, in `(0, 2)`.
    pub delta: f64,
    /// Exponent of `A(p)`, `> 2`.
    pub integrability_p: f64,
    /// Exponent of `B(p)`, `>= 2`.
    pub vacuum_p: f64,
    pub serrin_p: f64,
    pub serrin_q: f64,
    pub epsilon: f64,
    pub delta_vac: f64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self::for_dim(2)
    }
}

impl MonitorConfig {
    /// Defaults with the Serrin pair `(4, 4)` in 2D and `(4, 2)` in 1D.
    pub fn for_dim(dim: usize) -> Self {
        MonitorConfig {
            delta: 0.5,
            integrability_p: 4.0,
            vacuum_p: 2.0,
            serrin_p: 4.0,
            serrin_q: if dim == 1 { 2.0 } else { 4.0 },
            epsilon: 0.01,
            delta_vac: 0.1,
        }
    }

    pub fn violations(&self, dim: usize) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.delta > 0.0 && self.delta < 2.0) {
            v.push(format!("monitor delta = {} must lie in (0, 2)", self.delta));
        }
        if !(self.integrability_p > 2.0 && self.integrability_p.is_finite()) {
            v.push(format!("integrability_p = {} must be > 2", self.integrability_p));
        }
        if !(self.vacuum_p >= 2.0 && self.vacuum_p.is_finite()) {
            v.push(format!("vacuum_p = {} must be >= 2", self.vacuum_p));
        }
        if check_serrin_pair(self.serrin_p, self.serrin_q, dim).is_err() {
            v.push(format!(
                "Serrin pair (p, q) = ({}, {}) violates the scaling 1/p + N/(2q) = 1/2 with N = {dim}",
                self.serrin_p, self.serrin_q
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            v.push(format!("epsilon = {} must be > 0", self.epsilon));
        }
        if !(self.delta_vac > 0.0 && self.delta_vac < 1.0) {
            v.push(format!("delta_vac = {} must lie in (0, 1)", self.delta_vac));
        }
        v
    }
}

/// Time integrals of the rates, accumulated trapezoidally along a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Accumulated {
    pub serrin: f64,
    pub integrability_gradient: f64,
    pub integrability_quartic: f64,
    pub vacuum_rate: f64,
}

/// Every functional on one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub time: f64,
    pub mass: f64,
    pub min_density: f64,
    pub max_velocity: f64,
    pub energy: EnergyParts,
    pub effective_energy: f64,
    pub bd: BdEntropy,
    pub mv: MvEntropy,
    pub integrability: Integrability,
    pub vacuum: VacuumFunctional,
    pub serrin_integrand: f64,
    pub vacuum_indicator: f64,
    pub density_variance: f64,
    pub accumulated: Accumulated,
}

pub fn report(state: &FieldState, params: &ModelParams, monitors: &MonitorConfig) -> Result<FunctionalReport> {
    let rho = &state.rho;
    let mean = rho.mean();
    Ok(FunctionalReport {
        time: state.time,
        mass: state.mass()?,
        min_density: rho.min(),
        max_velocity: state.w.max_magnitude(),
        energy: energy(state, params)?,
        effective_energy: effective_energy(state, params)?,
        bd: bd_entropy(state, params)?,
        mv: mv_entropy(state, params, monitors.delta)?,
        integrability: integrability_functional(state, params, monitors.integrability_p)?,
        vacuum: vacuum_functional(state, params, monitors.vacuum_p)?,
        serrin_integrand: serrin_integrand(state, params, monitors.serrin_p, monitors.serrin_q)?,
        vacuum_indicator: vacuum_indicator(rho, monitors.epsilon, monitors.delta_vac)?,
        density_variance: rho.map(|s| (s - mean) * (s - mean)).mean(),
        accumulated: Accumulated::default(),
    })
}

/// Fills `accumulated` of `next` from `prev` by one trapezoid panel.
pub fn accumulate(prev: &FunctionalReport, next: &mut FunctionalReport) {
    let h = 0.5 * (next.time - prev.time);
    let a = &prev.accumulated;
    next.accumulated = Accumulated {
        serrin: a.serrin + h * (prev.serrin_integrand + next.serrin_integrand),
        integrability_gradient: a.integrability_gradient
            + h * (prev.integrability.gradient_rate + next.integrability.gradient_rate),
        integrability_quartic: a.integrability_quartic
            + h * (prev.integrability.quartic_rate + next.integrability.quartic_rate),
        vacuum_rate: a.vacuum_rate + h * (prev.vacuum.rate + next.vacuum.rate),
    };
}

const CSV_COLUMNS: &[&str] = &[
    "time",
    "mass",
    "min_density",
    "max_velocity",
    "energy_kinetic",
    "energy_pressure",
    "energy_capillary",
    "energy_total",
    "effective_energy",
    "bd_value",
    "bd_viscous_rate",
    "bd_pressure_cross_rate",
    "bd_capillary_rate",
    "mv_value",
    "mv_dissipation",
    "mv_rhs_bound",
    "a_value",
    "a_gradient_rate",
    "a_quartic_rate",
    "a_quartic_rate_identity",
    "a_quartic_rate_literal",
    "b_value",
    "b_rate",
    "b_identity_residual",
    "serrin_integrand",
    "vacuum_indicator",
    "density_variance",
    "acc_serrin",
    "acc_a_gradient",
    "acc_a_quartic",
    "acc_b_rate",
];

impl FunctionalReport {
    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    fn columns(&self) -> [f64; 31] {
        let (e, b, m, a, v, acc) = (
            &self.energy,
            &self.bd,
            &self.mv,
            &self.integrability,
            &self.vacuum,
            &self.accumulated,
        );
        [
            self.time,
            self.mass,
            self.min_density,
            self.max_velocity,
            e.kinetic,
            e.pressure,
            e.capillary,
            e.total,
            self.effective_energy,
            b.value,
            b.viscous_rate,
            b.pressure_cross_rate,
            b.capillary_rate,
            m.value,
            m.dissipation,
            m.rhs_bound,
            a.value,
            a.gradient_rate,
            a.quartic_rate,
            a.quartic_rate_identity,
            a.quartic_rate_literal,
            v.value,
            v.rate,
            v.identity_residual,
            self.serrin_integrand,
            self.vacuum_indicator,
            self.density_variance,
            acc.serrin,
            acc.integrability_gradient,
            acc.integrability_quartic,
            acc.vacuum_rate,
        ]
    }

    /// Shortest round-trip decimal form of every column.
    pub fn csv_row(&self) -> String {
        self.columns()
            .iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Column value by CSV header name.
    pub fn column(&self, name: &str) -> Option<f64> {
        CSV_COLUMNS.iter().position(|c| *c == name).map(|i| self.columns()[i])
    }
}

/// Continuation-criteria thresholds for [`blow_up_verdict`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerdictThresholds {
    /// Serrin accumulator values above this count as unbounded.
    pub serrin_max: f64,
    /// Vacuum indicator values above this count as unbounded.
    pub indicator_max: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            serrin_max: 1e8,
            indicator_max: 1e8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Breakdown {
    None,
    PositivityLoss,
    StepUnderflow,
    NonFinite,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowUpVerdict {
    pub insufficient_data: bool,
    pub final_time: f64,
    pub serrin_accumulated: f64,
    pub serrin_bounded: bool,
    pub indicator_initial: f64,
    pub indicator_sup: f64,
    pub indicator_bounded: bool,
    /// First report time at which the indicator exceeded ten times its initial value.
    pub indicator_tenfold_time: Option<f64>,
    pub breakdown: Breakdown,
}

/// Summarizes continuation criteria over a run's report stream.
pub fn blow_up_verdict(
    reports: &[FunctionalReport],
    breakdown: Breakdown,
    thresholds: &VerdictThresholds,
) -> BlowUpVerdict {
    let Some(first) = reports.first() else {
        return BlowUpVerdict {
            insufficient_data: true,
            final_time: 0.0,
            serrin_accumulated: 0.0,
            serrin_bounded: true,
            indicator_initial: 0.0,
            indicator_sup: 0.0,
            indicator_bounded: true,
            indicator_tenfold_time: None,
            breakdown,
        };
    };
    let last = reports.last().unwrap();
    let initial = first.vacuum_indicator;
    let sup = reports.iter().map(|r| r.vacuum_indicator).fold(0.0, f64::max);
    let tenfold = reports
        .iter()
        .find(|r| r.vacuum_indicator > 10.0 * initial && r.vacuum_indicator > 0.0)
        .map(|r| r.time);
    let serrin = last.accumulated.serrin;
    BlowUpVerdict {
        insufficient_data: reports.len() < 2,
        final_time: last.time,
        serrin_accumulated: serrin,
        serrin_bounded: serrin.is_finite() && serrin <= thresholds.serrin_max,
        indicator_initial: initial,
        indicator_sup: sup,
        indicator_bounded: sup.is_finite() && sup <= thresholds.indicator_max,
        indicator_tenfold_time: tenfold,
        breakdown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_density, random_smooth};
    use crate::model::{Variant, VelocityKind};
    use crate::spectral::SpectralGrid;
    use std::f64::consts::PI;

    fn v2() -> ModelParams {
        ModelParams::effective_v2(1.0, 1.0, 2.0).unwrap()
    }

    fn state(rho: ScalarField, w: VectorField) -> FieldState {
        FieldState::new(rho, w, VelocityKind::Effective, 0.0).unwrap()
    }

    // Composite Gauss–Legendre on [0, 2π] as an independent 1D quadrature oracle.
    fn gauss(f: impl Fn(f64) -> f64) -> f64 {
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let panels = 400;
        let h = 2.0 * PI / panels as f64;
        (0..panels)
            .map(|i| {
                let c = (i as f64 + 0.5) * h;
                nodes.iter().map(|(x, w)| w * f(c + 0.5 * h * x)).sum::<f64>() * 0.5 * h
            })
            .sum()
    }

    #[test]
    fn energy_examples() {
        let grid = SpectralGrid::periodic_1d(32).unwrap();
        let eq = FieldState::equilibrium(&grid, 1.0, VelocityKind::Effective).unwrap();
        let e = energy(&eq, &v2()).unwrap();
        assert!((e.total - 2.0 * PI).abs() < 1e-13 && e.kinetic == 0.0 && e.capillary == 0.0);

        let g2 = SpectralGrid::periodic_2d(16, 16).unwrap();
        let p = ModelParams::new(1.0, 0.2, 1.0, 1.0, 2.0, Variant::Original).unwrap();
        let s = FieldState::new(
            ScalarField::constant(&g2, 1.0),
            VectorField::constant(&g2, &[1.0, 0.0]),
            VelocityKind::Physical,
            0.0,
        )
        .unwrap();
        assert!((energy(&s, &p).unwrap().kinetic - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn capillary_energy_two_assemblies() {
        let grid = SpectralGrid::periodic_1d(128).unwrap();
        let rho = ScalarField::from_fn(&grid, |x| x[0].sin().exp());
        let s = state(rho.clone(), VectorField::zeros(&grid));
        let p = v2();
        let direct = energy(&s, &p).unwrap().capillary;
        let via_log = rho
            .mul(&rho.map(f64::ln).gradient().unwrap().norm_squared())
            .unwrap()
            .integrate()
            .unwrap()
            * p.kappa
            / 4.0;
        assert!((direct - via_log).abs() < 1e-10);
        // ∫ (e^{sin x}/4) cos² x dx
        let oracle = gauss(|x| x.sin().exp() * x.cos().powi(2) / 4.0);
        assert!((direct - oracle).abs() < 1e-10);
    }

    #[test]
    fn energy_same_through_either_velocity() {
        let grid = SpectralGrid::periodic_2d(32, 32).unwrap();
        let p = ModelParams::effective_v1(1.0, 0.4, 1.0, 1.5).unwrap();
        let rho = random_density(&grid, 3, 2.0, 0.8, 4);
        let u = VectorField::new(vec![random_smooth(&grid, 4, 1.0, 4), random_smooth(&grid, 5, 1.0, 4)]).unwrap();
        let phys = FieldState::new(rho, u, VelocityKind::Physical, 0.0).unwrap();
        let eff = phys.converted(&p, VelocityKind::Effective).unwrap();
        let (a, b) = (energy(&phys, &p).unwrap().total, energy(&eff, &p).unwrap().total);
        assert!((a - b).abs() < 1e-10 * a.abs());
    }

    #[test]
    fn bd_rates() {
        let grid = SpectralGrid::periodic_1d(128).unwrap();
        let p = v2();
        let eq = FieldState::equilibrium(&grid, 1.3, VelocityKind::Effective).unwrap();
        let bd = bd_entropy(&eq, &p).unwrap();
        assert_eq!(
            (bd.viscous_rate, bd.pressure_cross_rate, bd.capillary_rate),
            (0.0, 0.0, 0.0)
        );

        // ρ = 1 + 0.2 sin x, γ = 2, a = 1: cross term = 2∫|ρ'|².
        let rho = ScalarField::from_fn(&grid, |x| 1.0 + 0.2 * x[0].sin());
        let bd = bd_entropy(&state(rho, VectorField::zeros(&grid)), &p).unwrap();
        let oracle = gauss(|x| 2.0 * (0.2 * x.cos()).powi(2));
        assert!((bd.pressure_cross_rate - oracle).abs() < 1e-12);

        let eps = 0.3;
        let rho = ScalarField::from_fn(&grid, |x| (eps * x[0].sin()).exp());
        let bd = bd_entropy(&state(rho, VectorField::zeros(&grid)), &p).unwrap();
        let oracle = p.kappa * eps * eps * gauss(|x| (eps * x.sin()).exp() * x.sin().powi(2));
        assert!((bd.capillary_rate - oracle).abs() < 1e-8);
    }

    #[test]
    fn viscous_rate_is_energy_dissipation_of_viscous_force() {
        // −∫u·(div(μρ∇u) + div(αρ∇uᵗ)) equals the reported viscous rate.
        let grid = SpectralGrid::periodic_2d(32, 32).unwrap();
        let p = ModelParams::new(1.0, 0.4, 0.5, 1.0, 2.0, Variant::Original).unwrap();
        let rho = random_density(&grid, 7, 2.0, 0.5, 3);
        let u = VectorField::new(vec![random_smooth(&grid, 8, 1.0, 3), random_smooth(&grid, 9, 1.0, 3)]).unwrap();
        let s = FieldState::new(rho.clone(), u.clone(), VelocityKind::Physical, 0.0).unwrap();
        let force = crate::model::viscous_force(&rho, &u, p.mu, p.alpha).unwrap();
        let work = -u.dot(&force).unwrap().integrate().unwrap();
        let rate = bd_entropy(&s, &p).unwrap().viscous_rate;
        assert!((work - rate).abs() < 1e-10 * rate);
    }

    #[test]
    fn mv_examples() {
        let grid = SpectralGrid::periodic_1d(32).unwrap();
        let p = v2();
        let eq = FieldState::equilibrium(&grid, 1.0, VelocityKind::Effective).unwrap();
        let m = mv_entropy(&eq, &p, 0.5).unwrap();
        assert_eq!((m.value, m.dissipation, m.rhs_bound), (0.0, 0.0, 0.0));
        let c = 0.7;
        let s = state(ScalarField::constant(&grid, 1.0), VectorField::constant(&grid, &[c]));
        let m = mv_entropy(&s, &p, 0.5).unwrap();
        assert!((m.value - 2.0 * PI * c.powf(2.5) / 2.5).abs() < 1e-13);
        assert_eq!(m.dissipation, 0.0);
        assert!(m.rhs_bound > 0.0);
        assert!(matches!(mv_entropy(&s, &p, 2.0), Err(Error::DeltaOutOfRange(_))));
        assert!(matches!(mv_entropy(&s, &p, 0.0), Err(Error::DeltaOutOfRange(_))));
    }

    #[test]
    fn integrability_examples() {
        let grid = SpectralGrid::periodic_1d(64).unwrap();
        let p = v2();
        let eq = FieldState::equilibrium(&grid, 1.0, VelocityKind::Effective).unwrap();
        assert_eq!(integrability_functional(&eq, &p, 4.0).unwrap().value, 0.0);
        assert!(matches!(
            integrability_functional(&eq, &p, 2.0),
            Err(Error::PExponentOutOfRange(_))
        ));

        let s = state(
            ScalarField::constant(&grid, 1.0),
            VectorField::from_fn(&grid, |x, _| x[0].sin()),
        );
        let a = integrability_functional(&s, &p, 4.0).unwrap();
        assert!((a.quartic_rate - a.quartic_rate_identity).abs() < 1e-12);
        assert!((a.quartic_rate_literal - 4.0 * a.quartic_rate).abs() < 1e-12);
        // (1/4)∫sin⁴ = (1/4)(3π/4)
        assert!((a.value - 3.0 * PI / 16.0).abs() < 1e-13);
    }

    #[test]
    fn quartic_identity_on_random_fields() {
        let grid = SpectralGrid::periodic_2d(32, 32).unwrap();
        let p = v2();
        for seed in 0..4 {
            let v = VectorField::new(vec![
                random_smooth(&grid, 10 + seed, 1.0, 6),
                random_smooth(&grid, 20 + seed, 1.0, 6),
            ])
            .unwrap();
            let s = state(random_density(&grid, seed, 2.0, 0.5, 6), v);
            for pe in [3.0, 4.0, 6.0] {
                let a = integrability_functional(&s, &p, pe).unwrap();
                assert!((a.quartic_rate - a.quartic_rate_identity).abs() < 1e-12 * a.quartic_rate.abs().max(1.0));
            }
        }
    }

    #[test]
    fn vacuum_examples() {
        let grid = SpectralGrid::periodic_1d(256).unwrap();
        let p = v2();
        let eq = FieldState::equilibrium(&grid, 1.0, VelocityKind::Effective).unwrap();
        let b = vacuum_functional(&eq, &p, 2.0).unwrap();
        assert!((b.value - 2.0 * PI).abs() < 1e-13);
        assert_eq!((b.rate, b.identity_residual), (0.0, 0.0));
        assert!(vacuum_functional(&eq, &p, 1.5).is_err());

        let s = state(
            ScalarField::from_fn(&grid, |x| 2.0 + x[0].sin()),
            VectorField::zeros(&grid),
        );
        assert!(vacuum_functional(&s, &p, 3.0).unwrap().identity_residual < 1e-8);

        // B grows monotonically as min ρ → 0 along ρ = 1 + a sin x.
        let mut last = 0.0;
        for amp in [0.5, 0.7, 0.8, 0.9, 0.95] {
            let s = state(
                ScalarField::from_fn(&grid, |x| 1.0 + amp * x[0].sin()),
                VectorField::zeros(&grid),
            );
            let b = vacuum_functional(&s, &p, 2.0).unwrap().value;
            assert!(b > last);
            last = b;
        }
    }

    #[test]
    fn vacuum_identity_residual_converges() {
        let p = v2();
        let mut errs = Vec::new();
        for n in [16, 32, 64] {
            let grid = SpectralGrid::periodic_1d(n).unwrap();
            let rho = ScalarField::from_fn(&grid, |x| 2.0 + x[0].sin());
            errs.push(vacuum_identity_residual(&rho, &p, 3.0).unwrap().max_abs());
        }
        assert!(errs[0] > 100.0 * errs[1], "{errs:?}");
    }

    #[test]
    fn serrin_examples() {
        let grid = SpectralGrid::periodic_2d(16, 16).unwrap();
        let p = v2();
        let zero: Vec<FieldState> = (0..3)
            .map(|i| {
                FieldState::new(
                    ScalarField::constant(&grid, 1.0),
                    VectorField::zeros(&grid),
                    VelocityKind::Effective,
                    i as f64,
                )
                .unwrap()
            })
            .collect();
        assert_eq!(serrin_accumulator(&zero, &p, 4.0, 4.0).unwrap(), 0.0);
        assert!(matches!(
            serrin_accumulator(&zero, &p, 3.0, 3.0),
            Err(Error::ScalingPairInvalid { .. })
        ));
        assert!(matches!(
            serrin_accumulator(&[], &p, 4.0, 4.0),
            Err(Error::EmptyTrajectory)
        ));

        let steady: Vec<FieldState> = (0..5)
            .map(|i| {
                FieldState::new(
                    ScalarField::constant(&grid, 1.0),
                    VectorField::constant(&grid, &[0.5, 0.0]),
                    VelocityKind::Effective,
                    0.5 * i as f64,
                )
                .unwrap()
            })
            .collect();
        let c = 0.5 * (4.0 * PI * PI).powf(0.25);
        assert!((serrin_accumulator(&steady, &p, 4.0, 4.0).unwrap() - c.powi(4) * 2.0).abs() < 1e-12);
    }

    #[test]
    fn serrin_matches_trapezoid_on_varying_series() {
        let grid = SpectralGrid::periodic_2d(16, 16).unwrap();
        let p = v2();
        let times = [0.0, 0.1, 0.25, 0.6];
        let snaps: Vec<FieldState> = times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let v = VectorField::new(vec![
                    random_smooth(&grid, i as u64, 1.0, 3),
                    random_smooth(&grid, 9 + i as u64, 1.0, 3),
                ])
                .unwrap();
                FieldState::new(ScalarField::constant(&grid, 1.0), v, VelocityKind::Effective, t).unwrap()
            })
            .collect();
        let mut oracle = 0.0;
        for k in 0..3 {
            let f = |s: &FieldState| {
                let m = s.w.magnitude();
                (m.values().iter().map(|x| x.powi(4)).sum::<f64>() * grid.cell_volume())
                    .powf(0.25)
                    .powi(4)
            };
            oracle += 0.5 * (times[k + 1] - times[k]) * (f(&snaps[k]) + f(&snaps[k + 1]));
        }
        assert!((serrin_accumulator(&snaps, &p, 4.0, 4.0).unwrap() - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn indicator_examples() {
        let grid = SpectralGrid::periodic_1d(64).unwrap();
        assert_eq!(
            vacuum_indicator(&ScalarField::constant(&grid, 1.0), 0.01, 0.1).unwrap(),
            0.0
        );
        let v = vacuum_indicator(&ScalarField::constant(&grid, 0.05), 0.5, 0.1).unwrap();
        assert!((v - 2.0 * PI * 0.05f64.powf(-0.5)).abs() < 1e-12);
        assert!(vacuum_indicator(&ScalarField::constant(&grid, 0.05), 0.5, 1.0).is_err());

        // ρ = 0.2 + 0.19 sin x: the sharp indicator converges at first order in h.
        let f = |x: f64| 0.2 + 0.19 * x.sin();
        let oracle = {
            let n = 2_000_000;
            let h = 2.0 * PI / n as f64;
            (0..n)
                .map(|i| f(i as f64 * h))
                .filter(|&r| r <= 0.1)
                .map(|r| r.powf(-0.01))
                .sum::<f64>()
                * h
        };
        let grid = SpectralGrid::periodic_1d(4096).unwrap();
        let got = vacuum_indicator(&ScalarField::from_fn(&grid, |x| f(x[0])), 0.01, 0.1).unwrap();
        // two jump points, each off by at most one cell of height ≤ 0.1^{-0.01}
        let bound = 2.0 * grid.spacing() * 0.019f64.powf(-0.01) + 1e-5;
        assert!((got - oracle).abs() <= bound, "{got} vs {oracle}");
    }

    #[test]
    fn verdict_on_empty_input() {
        let v = blow_up_verdict(&[], Breakdown::None, &VerdictThresholds::default());
        assert!(v.insufficient_data);
    }

    #[test]
    fn csv_row_matches_header() {
        let grid = SpectralGrid::periodic_1d(16).unwrap();
        let eq = FieldState::equilibrium(&grid, 1.0, VelocityKind::Effective).unwrap();
        let r = report(&eq, &v2(), &MonitorConfig::for_dim(1)).unwrap();
        assert_eq!(
            FunctionalReport::csv_header().split(',').count(),
            r.csv_row().split(',').count()
        );
        assert_eq!(r.column("mass"), Some(r.mass));
    }
}
