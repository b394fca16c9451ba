//! Named initial-condition families.
//!
//! Every family yields a density and an effective velocity `v`.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::random_smooth;
use crate::error::{Error, Result};
use crate::manufactured::Manufactured;
use crate::model::{FieldState, VelocityKind};
use crate::spectral::{load_dump, ScalarField, SpectralGrid, VectorField};

use super::config::ScenarioConfig;

fn one() -> f64 {
    1.0
}

fn default_amplitude() -> f64 {
    0.3
}

fn default_kmax() -> usize {
    8
}

fn default_squeeze_depth() -> f64 {
    0.91
}

fn default_squeeze_width() -> f64 {
    0.5
}

fn default_squeeze_speed() -> f64 {
    40.0
}

/// Identifier of the built-in manufactured solution.
pub const MANUFACTURED_ID: &str = "trig";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Constant density at rest.
    Equilibrium {
        #[serde(default = "one")]
        rho_bar: f64,
    },
    /// `ρ = ρ̄ + A cos(k·x)`, `v = B sin(k·x) k/|k|`.
    SingleMode {
        amplitude: f64,
        wavenumber: Vec<i64>,
        #[serde(default)]
        velocity_amplitude: f64,
        #[serde(default = "one")]
        rho_bar: f64,
    },
    /// `ρ = ρ̄(1 − d·g)` with the periodic Gaussian `g = exp(Σ_j (cos(x_j − c_j) − 1)/w²)`, at rest.
    GaussianBump {
        depth: f64,
        width: f64,
        #[serde(default = "one")]
        rho_bar: f64,
    },
    /// `ρ = ρ̄ + A·f_seed`, `v_j = B·f_{seed+1+j}` with seeded smooth `f`, `sup |f| ≤ 1`.
    RandomSmooth {
        seed: u64,
        slope: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_amplitude")]
        velocity_amplitude: f64,
        #[serde(default = "default_kmax")]
        kmax: usize,
        #[serde(default = "one")]
        rho_bar: f64,
    },
    /// Closed-form forced solution; the matching forcing is applied during the run.
    Manufactured { id: String },
    /// Density dip below `δ_vac` driven apart by `v_j = V sin(x_j − c_j)`; the
    /// seed jitters the center, the speed and a small velocity perturbation.
    VacuumSqueeze {
        seed: u64,
        #[serde(default = "default_squeeze_depth")]
        depth: f64,
        #[serde(default = "default_squeeze_width")]
        width: f64,
        #[serde(default = "default_squeeze_speed")]
        speed: f64,
    },
    /// Restart from a dump holding `ρ` followed by the `N` components of `v`.
    Checkpoint {
        path: PathBuf,
        #[serde(default)]
        time: f64,
    },
}

impl InitialSpec {
    pub fn name(&self) -> &'static str {
        match self {
            InitialSpec::Equilibrium { .. } => "equilibrium",
            InitialSpec::SingleMode { .. } => "single_mode",
            InitialSpec::GaussianBump { .. } => "gaussian_bump",
            InitialSpec::RandomSmooth { .. } => "random_smooth",
            InitialSpec::Manufactured { .. } => "manufactured",
            InitialSpec::VacuumSqueeze { .. } => "vacuum_squeeze",
            InitialSpec::Checkpoint { .. } => "checkpoint",
        }
    }

    /// Parameter constraints that can be checked without building fields.
    pub fn violations(&self, cfg: &ScenarioConfig) -> Vec<String> {
        let mut v = Vec::new();
        let dim = cfg.dim();
        let positive = |x: f64| x > 0.0 && x.is_finite();
        match self {
            InitialSpec::Equilibrium { rho_bar } => {
                if !positive(*rho_bar) {
                    v.push(format!("rho_bar = {rho_bar} must be > 0"));
                }
            }
            InitialSpec::SingleMode {
                amplitude,
                wavenumber,
                rho_bar,
                ..
            } => {
                if !positive(*rho_bar) || amplitude.abs() >= *rho_bar {
                    v.push(format!(
                        "single_mode needs |amplitude| < rho_bar (got {amplitude}, {rho_bar})"
                    ));
                }
                if wavenumber.len() != dim {
                    v.push(format!("wavenumber has {} entries for a {dim}D grid", wavenumber.len()));
                } else if let Some(&n) = cfg.grid.resolution.iter().min() {
                    if wavenumber.iter().any(|k| k.unsigned_abs() as usize >= n / 2) {
                        v.push(format!("wavenumber {wavenumber:?} is not resolved below Nyquist"));
                    }
                }
            }
            InitialSpec::GaussianBump { depth, width, rho_bar } => {
                if !(0.0..1.0).contains(depth) {
                    v.push(format!("gaussian_bump depth = {depth} must lie in [0, 1)"));
                }
                if !positive(*width) {
                    v.push(format!("gaussian_bump width = {width} must be > 0"));
                }
                if !positive(*rho_bar) {
                    v.push(format!("rho_bar = {rho_bar} must be > 0"));
                }
            }
            InitialSpec::RandomSmooth {
                amplitude,
                velocity_amplitude,
                kmax,
                rho_bar,
                slope,
                ..
            } => {
                if !positive(*rho_bar) || !(*amplitude >= 0.0 && amplitude < rho_bar) {
                    v.push(format!(
                        "random_smooth needs 0 <= amplitude < rho_bar (got {amplitude}, {rho_bar})"
                    ));
                }
                if !velocity_amplitude.is_finite() || !slope.is_finite() {
                    v.push("random_smooth slope and velocity_amplitude must be finite".into());
                }
                if *kmax == 0 {
                    v.push("random_smooth kmax must be >= 1".into());
                }
            }
            InitialSpec::Manufactured { id } => {
                if id != MANUFACTURED_ID {
                    v.push(format!("unknown manufactured id '{id}' (available: {MANUFACTURED_ID})"));
                }
                let expected = Manufactured::new(if dim == 2 { 2 } else { 1 }).params();
                if cfg.model.params_unchecked() != expected {
                    v.push("manufactured solution requires variant effective_v2 with mu = 1, a = 1, gamma = 2".into());
                }
            }
            InitialSpec::VacuumSqueeze {
                depth, width, speed, ..
            } => {
                if !(*depth > 0.0 && *depth < 1.0) {
                    v.push(format!("vacuum_squeeze depth = {depth} must lie in (0, 1)"));
                }
                if !positive(*width) || !positive(*speed) {
                    v.push(format!(
                        "vacuum_squeeze width = {width} and speed = {speed} must be > 0"
                    ));
                }
            }
            InitialSpec::Checkpoint { time, .. } => {
                if !(*time >= 0.0 && time.is_finite()) {
                    v.push(format!("checkpoint time = {time} must be >= 0"));
                }
                if *time >= cfg.integrator.t_end {
                    v.push(format!(
                        "checkpoint time = {time} must precede t_end = {}",
                        cfg.integrator.t_end
                    ));
                }
            }
        }
        v
    }

    /// Effective-velocity state on `grid`.
    pub fn build(&self, grid: &Arc<SpectralGrid>) -> Result<FieldState> {
        let dim = grid.dim();
        let eff = VelocityKind::Effective;
        match self {
            InitialSpec::Equilibrium { rho_bar } => FieldState::equilibrium(grid, *rho_bar, eff),
            InitialSpec::SingleMode {
                amplitude,
                wavenumber,
                velocity_amplitude,
                rho_bar,
            } => {
                let k: Vec<f64> = wavenumber.iter().map(|&k| k as f64).collect();
                let len = grid.length().to_vec();
                let phase = move |x: &[f64]| (0..x.len()).map(|j| TAU / len[j] * k[j] * x[j]).sum::<f64>();
                let knorm = wavenumber.iter().map(|&k| (k * k) as f64).sum::<f64>().sqrt().max(1.0);
                let rho = ScalarField::from_fn(grid, |x| rho_bar + amplitude * phase(x).cos());
                let w = VectorField::from_fn(grid, |x, j| {
                    velocity_amplitude * phase(x).sin() * wavenumber[j] as f64 / knorm
                });
                FieldState::new(rho, w, eff, 0.0)
            }
            InitialSpec::GaussianBump { depth, width, rho_bar } => {
                let center: Vec<f64> = grid.length().iter().map(|l| 0.5 * l).collect();
                let g = periodic_gaussian(grid, &center, *width);
                let rho = g.map(|s| rho_bar * (1.0 - depth * s));
                FieldState::new(rho, VectorField::zeros(grid), eff, 0.0)
            }
            InitialSpec::RandomSmooth {
                seed,
                slope,
                amplitude,
                velocity_amplitude,
                kmax,
                rho_bar,
            } => {
                let rho = random_smooth(grid, *seed, *slope, *kmax).map(|s| rho_bar + amplitude * s);
                let comps = (0..dim)
                    .map(|j| random_smooth(grid, seed + 1 + j as u64, *slope, *kmax).scale(*velocity_amplitude))
                    .collect();
                FieldState::new(rho, VectorField::new(comps)?, eff, 0.0)
            }
            InitialSpec::Manufactured { .. } => Ok(Manufactured::new(dim).state(grid, 0.0)),
            InitialSpec::VacuumSqueeze {
                seed,
                depth,
                width,
                speed,
            } => vacuum_squeeze(grid, *seed, *depth, *width, *speed),
            InitialSpec::Checkpoint { path, time } => {
                let dump = load_dump(path)?;
                if dump.grid.resolution() != grid.resolution() || dump.grid.length() != grid.length() {
                    return Err(Error::InvalidField(format!(
                        "checkpoint grid {:?} does not match configured grid {:?}",
                        dump.grid.resolution(),
                        grid.resolution()
                    )));
                }
                if dump.components.len() != 1 + dim {
                    return Err(Error::InvalidField(format!(
                        "checkpoint holds {} components, expected {}",
                        dump.components.len(),
                        1 + dim
                    )));
                }
                // Rebind onto the configured grid instance.
                let rebind = |f: &ScalarField| ScalarField::new(grid, f.values().to_vec());
                let rho = rebind(&dump.components[0])?;
                let comps = dump.components[1..].iter().map(rebind).collect::<Result<Vec<_>>>()?;
                FieldState::new(rho, VectorField::new(comps)?, eff, *time)
            }
        }
    }
}

/// `exp(Σ_j (cos(2π(x_j − c_j)/L_j) − 1)/w²)`, analytic and periodic, peak 1 at `c`.
pub fn periodic_gaussian(grid: &Arc<SpectralGrid>, center: &[f64], width: f64) -> ScalarField {
    let len = grid.length().to_vec();
    ScalarField::from_fn(grid, |x| {
        let s: f64 = (0..x.len())
            .map(|j| (TAU / len[j] * (x[j] - center[j])).cos() - 1.0)
            .sum();
        (s / (width * width)).exp()
    })
}

/// The engineered vacuum-approach family.
pub fn vacuum_squeeze(grid: &Arc<SpectralGrid>, seed: u64, depth: f64, width: f64, speed: f64) -> Result<FieldState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let center: Vec<f64> = grid.length().iter().map(|l| rng.gen_range(0.0..*l)).collect();
    let speed = speed * rng.gen_range(0.9..1.1);
    let g = periodic_gaussian(grid, &center, width);
    let rho = g.map(|s| 1.0 - depth * s);
    let len = grid.length().to_vec();
    let comps = (0..dim)
        .map(|j| {
            let base = ScalarField::from_fn(grid, |x| speed * (TAU / len[j] * (x[j] - center[j])).sin());
            let wobble = random_smooth(grid, seed.wrapping_mul(31).wrapping_add(j as u64), 2.0, 4);
            base.add(&wobble.scale(0.05 * speed))
        })
        .collect::<Result<Vec<_>>>()?;
    FieldState::new(rho, VectorField::new(comps)?, VelocityKind::Effective, 0.0)
}
