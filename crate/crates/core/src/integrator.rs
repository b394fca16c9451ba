//! IMEX time stepping for the effective-velocity system.
//!
//! Density: the linear diffusion `(κ/μ)Δρ` is integrated exactly by the
//! factor `E = exp(−(κ/μ)|β|²dt)`, everything else (`−div(ρv)` plus forcing)
//! is explicit.
//!
//! Velocity: `ν Δv` is implicit with a constant `ν`, the remainder
//! `R = ∂_t v|_{rhs} − νΔv + f` explicit. Because the momentum balance is
//! divided by `ρ`, the principal viscous part is exactly `μΔv`, so the default
//! `ν = μ` leaves only first-order terms explicit.
//!
//! | scheme       | density                                      | velocity                                             |
//! |--------------|----------------------------------------------|------------------------------------------------------|
//! | `imex_euler` | `E(ρ̂ + dt N̂)`                               | `(v̂ + dt R̂) / (1 + dt ν|β|²)`                       |
//! | `imex_bdf2`  | `Eρ̂ + dt(3/2 E N̂ − 1/2 E² N̂⁻)`              | `(4v̂ − v̂⁻ + 2dt(2R̂ − R̂⁻)) / (3 + 2dt ν|β|²)`       |
//!
//! `imex_bdf2` falls back to one `imex_euler` step whenever no history for the
//! current `dt` exists (first step, after a rejection, after a step change).

use serde::{Deserialize, Serialize};

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functionals::{self, Breakdown, FunctionalReport, MonitorConfig};
use crate::model::{effective_rhs_parts, recover_u, FieldState, ModelParams, Variant, VelocityKind, DENSITY_FLOOR};
use crate::spectral::{ScalarField, SpectralGrid, Spectrum, VectorField};

use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ImexEuler,
    ImexBdf2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt_initial: f64,
    pub dt_min: f64,
    /// Absolute final time.
    pub t_end: f64,
    pub cfl_safety: f64,
    /// Implicit Laplacian coefficient in the velocity update; `None` selects `μ`.
    #[serde(default)]
    pub implicit_viscosity_shift: Option<f64>,
    pub scheme: Scheme,
    /// Snapshot spacing in time; `None` keeps every accepted step.
    #[serde(default)]
    pub output_interval: Option<f64>,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, scheme: Scheme) -> Self {
        IntegratorConfig {
            dt_initial: dt,
            dt_min: dt * 1e-6,
            t_end,
            cfl_safety: 0.5,
            implicit_viscosity_shift: None,
            scheme,
            output_interval: None,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !pos(self.dt_initial) {
            v.push(format!("dt_initial = {} must be > 0", self.dt_initial));
        }
        if !pos(self.dt_min) {
            v.push(format!("dt_min = {} must be > 0", self.dt_min));
        }
        if self.dt_min > self.dt_initial {
            v.push(format!(
                "dt_min = {} must not exceed dt_initial = {}",
                self.dt_min, self.dt_initial
            ));
        }
        if !pos(self.t_end) {
            v.push(format!("t_end = {} must be > 0", self.t_end));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            v.push(format!("cfl_safety = {} must lie in (0, 1]", self.cfl_safety));
        }
        if let Some(nu) = self.implicit_viscosity_shift {
            if !(nu >= 0.0 && nu.is_finite()) {
                v.push(format!("implicit_viscosity_shift = {nu} must be >= 0"));
            }
        }
        if let Some(h) = self.output_interval {
            if !pos(h) {
                v.push(format!("output_interval = {h} must be > 0"));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidIntegrator(v))
        }
    }

    pub fn viscosity_shift(&self, params: &ModelParams) -> f64 {
        self.implicit_viscosity_shift.unwrap_or(params.mu)
    }
}

/// Source terms added to the density and velocity tendencies.
pub trait Forcing {
    fn density(&self, grid: &Arc<SpectralGrid>, t: f64) -> ScalarField;
    fn velocity(&self, grid: &Arc<SpectralGrid>, t: f64) -> VectorField;
}

fn check_effective(state: &FieldState, params: &ModelParams) -> Result<()> {
    if params.variant == Variant::Original {
        return Err(Error::VariantMismatch(
            "the integrator advances the effective variants only".into(),
        ));
    }
    if state.kind != VelocityKind::Effective {
        return Err(Error::VariantMismatch("state must hold the effective velocity".into()));
    }
    Ok(())
}

/// Largest transport speed seen by the explicit terms: `|v|` in the density
/// flux, `|u|` and `|u − μ∇ln ρ|` in the velocity advection.
pub fn transport_speed(state: &FieldState, params: &ModelParams) -> Result<f64> {
    let v = &state.w;
    let u = recover_u(&state.rho, v, params)?;
    let grad_log = state.rho.map(f64::ln).gradient()?;
    let drift = u.sub(&grad_log.scale(params.mu))?;
    Ok(v.max_magnitude().max(u.max_magnitude()).max(drift.max_magnitude()))
}

/// `cfl_safety · min(h / speed, h² / (2N|μ − ν|))`; infinite when neither
/// bound is active.
pub fn cfl_dt(state: &FieldState, params: &ModelParams, config: &IntegratorConfig) -> Result<f64> {
    let grid = state.rho.grid();
    let h = grid.spacing();
    let speed = transport_speed(state, params)?;
    let advective = if speed > 0.0 { h / speed } else { f64::INFINITY };
    let excess = (params.mu - config.viscosity_shift(params)).abs();
    let diffusive = if excess > 0.0 {
        h * h / (2.0 * grid.dim() as f64 * excess)
    } else {
        f64::INFINITY
    };
    let dt = config.cfl_safety * advective.min(diffusive);
    if dt < config.dt_min {
        return Err(Error::StepUnderflow {
            required: dt,
            dt_min: config.dt_min,
        });
    }
    Ok(dt)
}

#[derive(Debug, Clone)]
struct History {
    dt: f64,
    n_rho: Vec<Complex64>,
    r_v: Vec<Vec<Complex64>>,
    v: Vec<Vec<Complex64>>,
}

/// Multistep state of a run. Histories are only committed for accepted steps.
pub struct Stepper<'a> {
    params: ModelParams,
    config: IntegratorConfig,
    forcing: Option<&'a dyn Forcing>,
    history: Option<History>,
    pending: Option<History>,
}

impl<'a> Stepper<'a> {
    pub fn new(params: ModelParams, config: IntegratorConfig, forcing: Option<&'a dyn Forcing>) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        Ok(Stepper {
            params,
            config,
            forcing,
            history: None,
            pending: None,
        })
    }

    /// Proposes the state at `t + dt`; call [`Stepper::accept`] to keep it as history.
    pub fn advance(&mut self, state: &FieldState, dt: f64) -> Result<FieldState> {
        check_effective(state, &self.params)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidIntegrator(vec![format!("dt = {dt} must be > 0")]));
        }
        let grid = state.rho.grid().clone();
        let p = &self.params;
        let nu = self.config.viscosity_shift(p);
        let d = p.diffusivity();
        let t = state.time;

        let parts = effective_rhs_parts(&state.rho, &state.w, p)?;
        let mut n_rho = parts.density_explicit;
        let mut r_v = parts
            .velocity
            .sub(&state.w.try_map_components(|c| c.laplacian())?.scale(nu))?;
        if let Some(f) = self.forcing {
            n_rho = n_rho.add(&f.density(&grid, t))?;
            r_v = r_v.add(&f.velocity(&grid, t))?;
        }
        let n_hat = n_rho
            .forward()
            .map_err(|_| Error::NonFinite { time: t })?
            .coefficients()
            .to_vec();
        let r_hat = r_v
            .components()
            .iter()
            .map(|c| c.forward().map(|s| s.coefficients().to_vec()))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::NonFinite { time: t })?;
        let rho_hat = state.rho.forward()?;
        let v_hat = state
            .w
            .components()
            .iter()
            .map(|c| c.forward().map(|s| s.coefficients().to_vec()))
            .collect::<Result<Vec<_>>>()?;

        let prev = match (self.config.scheme, &self.history) {
            (Scheme::ImexBdf2, Some(h)) if (h.dt - dt).abs() <= 1e-9 * dt => Some(h),
            _ => None,
        };

        let modes = grid.modes();
        let mut rho_new = rho_hat.coefficients().to_vec();
        let mut v_new = v_hat.clone();
        for (i, m) in modes.iter().enumerate() {
            let k2 = m.beta_deriv[0].powi(2) + m.beta_deriv[1].powi(2);
            let e = (-d * k2 * dt).exp();
            match prev {
                None => {
                    rho_new[i] = e * (rho_new[i] + dt * n_hat[i]);
                    let denom = 1.0 + dt * nu * k2;
                    for j in 0..v_new.len() {
                        v_new[j][i] = (v_hat[j][i] + dt * r_hat[j][i]) / denom;
                    }
                }
                Some(h) => {
                    rho_new[i] = e * rho_new[i] + dt * (1.5 * e * n_hat[i] - 0.5 * e * e * h.n_rho[i]);
                    let denom = 3.0 + 2.0 * dt * nu * k2;
                    for j in 0..v_new.len() {
                        v_new[j][i] =
                            (4.0 * v_hat[j][i] - h.v[j][i] + 2.0 * dt * (2.0 * r_hat[j][i] - h.r_v[j][i])) / denom;
                    }
                }
            }
        }

        let time = t + dt;
        let rho = Spectrum::from_coefficients(&grid, rho_new)?.inverse();
        let w = VectorField::new(
            v_new
                .into_iter()
                .map(|c| Spectrum::from_coefficients(&grid, c).map(|s| s.inverse()))
                .collect::<Result<Vec<_>>>()?,
        )?;
        if rho.check_finite().is_err() || w.check_finite().is_err() {
            return Err(Error::NonFinite { time });
        }
        if let Some(index) = rho.values().iter().position(|&s| s <= DENSITY_FLOOR) {
            return Err(Error::PositivityLoss {
                time,
                index,
                value: rho.values()[index],
            });
        }
        self.pending = Some(History {
            dt,
            n_rho: n_hat,
            r_v: r_hat,
            v: v_hat,
        });
        Ok(FieldState {
            rho,
            w,
            kind: VelocityKind::Effective,
            time,
        })
    }

    /// Commits the history of the last successful [`Stepper::advance`].
    pub fn accept(&mut self) {
        self.history = self.pending.take();
    }

    /// Forgets the multistep history, forcing a one-step restart.
    pub fn reset(&mut self) {
        self.history = None;
        self.pending = None;
    }
}

/// One unforced `imex_euler` step.
pub fn step(state: &FieldState, params: &ModelParams, config: &IntegratorConfig, dt: f64) -> Result<FieldState> {
    let mut cfg = *config;
    cfg.scheme = Scheme::ImexEuler;
    Stepper::new(*params, cfg, None)?.advance(state, dt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    PositivityLoss,
    StepUnderflow,
    NonFinite,
    Failed,
}

impl Termination {
    fn from_error(e: &Error) -> Self {
        match e {
            Error::PositivityLoss { .. } => Termination::PositivityLoss,
            Error::StepUnderflow { .. } => Termination::StepUnderflow,
            Error::NonFinite { .. } => Termination::NonFinite,
            _ => Termination::Failed,
        }
    }

    pub fn breakdown(self) -> Breakdown {
        match self {
            Termination::Completed => Breakdown::None,
            Termination::PositivityLoss => Breakdown::PositivityLoss,
            Termination::StepUnderflow => Breakdown::StepUnderflow,
            Termination::NonFinite => Breakdown::NonFinite,
            Termination::Failed => Breakdown::Other,
        }
    }
}

/// Snapshots at the output cadence plus one report per accepted step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<FieldState>,
    pub reports: Vec<FunctionalReport>,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Step size in force when the run ended.
    pub final_dt: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &FieldState {
        self.snapshots
            .last()
            .expect("trajectory always holds the initial state")
    }
}

/// A failed run: the error and everything computed up to the last valid state.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: Error,
    pub trajectory: Option<Trajectory>,
}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        RunFailure {
            error,
            trajectory: None,
        }
    }
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for RunFailure {}

pub fn run(
    initial: &FieldState,
    params: &ModelParams,
    config: &IntegratorConfig,
    monitors: &MonitorConfig,
) -> std::result::Result<Trajectory, RunFailure> {
    run_forced(initial, params, config, monitors, None)
}

pub fn run_forced(
    initial: &FieldState,
    params: &ModelParams,
    config: &IntegratorConfig,
    monitors: &MonitorConfig,
    forcing: Option<&dyn Forcing>,
) -> std::result::Result<Trajectory, RunFailure> {
    initial.validate()?;
    check_effective(initial, params)?;
    let dim = initial.rho.grid().dim();
    let monitor_issues = monitors.violations(dim);
    if !monitor_issues.is_empty() {
        return Err(Error::ConstraintViolation(monitor_issues).into());
    }
    if config.t_end <= initial.time {
        return Err(Error::InvalidIntegrator(vec![format!(
            "t_end = {} must exceed the initial time {}",
            config.t_end, initial.time
        )])
        .into());
    }
    let mut stepper = Stepper::new(*params, *config, forcing)?;
    let mut traj = Trajectory {
        snapshots: vec![initial.clone()],
        reports: vec![functionals::report(initial, params, monitors)?],
        termination: Termination::Completed,
        accepted_steps: 0,
        rejected_steps: 0,
        final_dt: config.dt_initial,
    };
    let mut state = initial.clone();
    let mut dt = config.dt_initial;
    let mut next_output = config.output_interval.map(|h| initial.time + h);
    let t_end = config.t_end;

    let fail = |mut traj: Trajectory, state: &FieldState, dt: f64, error: Error| {
        if traj.snapshots.last().map(|s| s.time) != Some(state.time) {
            traj.snapshots.push(state.clone());
        }
        traj.termination = Termination::from_error(&error);
        traj.final_dt = dt;
        RunFailure {
            error,
            trajectory: Some(traj),
        }
    };

    while state.time < t_end {
        let limit = match cfl_dt(&state, params, config) {
            Ok(l) => l,
            Err(e) => return Err(fail(traj, &state, dt, e)),
        };
        // Halving keeps dt piecewise constant, so bdf2 rarely restarts.
        while dt > limit {
            dt *= 0.5;
        }
        if dt < config.dt_min {
            let e = Error::StepUnderflow {
                required: limit,
                dt_min: config.dt_min,
            };
            return Err(fail(traj, &state, dt, e));
        }
        let remaining = t_end - state.time;
        let last = dt >= remaining * (1.0 - 1e-9);
        let h = if last { remaining } else { dt };

        match stepper.advance(&state, h) {
            Ok(mut next) => {
                if last {
                    next.time = t_end;
                }
                stepper.accept();
                let mut r = match functionals::report(&next, params, monitors) {
                    Ok(r) => r,
                    Err(e) => return Err(fail(traj, &state, dt, e)),
                };
                functionals::accumulate(traj.reports.last().unwrap(), &mut r);
                traj.reports.push(r);
                traj.accepted_steps += 1;
                state = next;
                let keep = match next_output.as_mut() {
                    None => true,
                    Some(t_out) => {
                        if state.time >= *t_out - 1e-9 * dt || last {
                            let interval = config.output_interval.unwrap();
                            while *t_out <= state.time + 1e-9 * dt {
                                *t_out += interval;
                            }
                            true
                        } else {
                            false
                        }
                    }
                };
                if keep {
                    traj.snapshots.push(state.clone());
                }
            }
            Err(e @ Error::PositivityLoss { .. }) => {
                if dt * 0.5 < config.dt_min {
                    return Err(fail(traj, &state, dt, e));
                }
                dt *= 0.5;
                traj.rejected_steps += 1;
                stepper.reset();
            }
            Err(e) => return Err(fail(traj, &state, dt, e)),
        }
    }
    traj.final_dt = dt;
    Ok(traj)
}
