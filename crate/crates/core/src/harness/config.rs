//! Scenario configuration: JSON parsing, defaults, validation, canonical form.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{MonitorConfig, VerdictThresholds};
use crate::integrator::{IntegratorConfig, Scheme};
use crate::model::{ModelParams, Variant};
use crate::spectral::SpectralGrid;

use super::initial::InitialSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub resolution: Vec<usize>,
    /// Period per axis; `2π` when omitted.
    #[serde(default)]
    pub length: Option<Vec<f64>>,
}

impl GridSpec {
    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.length.clone().unwrap_or_else(|| vec![TAU; self.resolution.len()])
    }

    pub fn build(&self) -> Result<Arc<SpectralGrid>> {
        SpectralGrid::new(&self.resolution, &self.lengths())
    }
}

/// Model coefficients; omitted ones take variant defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

fn default_variant() -> Variant {
    Variant::EffectiveV2
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            variant: default_variant(),
            mu: None,
            alpha: None,
            kappa: None,
            a: None,
            gamma: None,
        }
    }
}

impl ModelSpec {
    /// Fills every omitted coefficient. `v1` ties `α = κ/μ` with `κ = μ²/2`
    /// by default, `v2` ties `α = 0, κ = μ²`.
    pub fn resolved(&self) -> ModelSpec {
        let mu = self.mu.unwrap_or(1.0);
        let (alpha, kappa) = match self.variant {
            Variant::EffectiveV2 => (self.alpha.unwrap_or(0.0), self.kappa.unwrap_or(mu * mu)),
            Variant::EffectiveV1 | Variant::Original => {
                let kappa = self.kappa.unwrap_or(0.5 * mu * mu);
                (self.alpha.unwrap_or(kappa / mu), kappa)
            }
        };
        ModelSpec {
            variant: self.variant,
            mu: Some(mu),
            alpha: Some(alpha),
            kappa: Some(kappa),
            a: Some(self.a.unwrap_or(1.0)),
            gamma: Some(self.gamma.unwrap_or(2.0)),
        }
    }

    /// Unvalidated parameters after defaults.
    pub fn params_unchecked(&self) -> ModelParams {
        let r = self.resolved();
        ModelParams {
            mu: r.mu.unwrap(),
            alpha: r.alpha.unwrap(),
            kappa: r.kappa.unwrap(),
            a: r.a.unwrap(),
            gamma: r.gamma.unwrap(),
            variant: r.variant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    /// `dt·1e−6` when omitted.
    #[serde(default)]
    pub dt_min: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    #[serde(default)]
    pub implicit_viscosity_shift: Option<f64>,
    #[serde(default)]
    pub output_interval: Option<f64>,
}

fn default_cfl() -> f64 {
    0.5
}

impl IntegratorSpec {
    pub fn resolved(&self) -> IntegratorSpec {
        IntegratorSpec {
            dt_min: Some(self.dt_min.unwrap_or(self.dt * 1e-6)),
            ..*self
        }
    }

    pub fn config(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt_initial: self.dt,
            dt_min: self.dt_min.unwrap_or(self.dt * 1e-6),
            t_end: self.t_end,
            cfl_safety: self.cfl_safety,
            implicit_viscosity_shift: self.implicit_viscosity_shift,
            scheme: self.scheme,
            output_interval: self.output_interval,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Run directory, relative paths resolved against the output root.
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Write snapshot dumps at the integrator's output cadence.
    #[serde(default = "default_true")]
    pub dumps: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("run")
}

fn default_true() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: default_dir(),
            dumps: true,
        }
    }
}

/// Everything one `simulate` invocation needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub model: ModelSpec,
    pub integrator: IntegratorSpec,
    pub initial: InitialSpec,
    /// Dimension-dependent defaults when omitted.
    #[serde(default)]
    pub monitors: Option<MonitorConfig>,
    #[serde(default)]
    pub verdict: VerdictThresholds,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn params(&self) -> Result<ModelParams> {
        let p = self.model.params_unchecked();
        p.validate()?;
        Ok(p)
    }

    pub fn monitors(&self) -> MonitorConfig {
        self.monitors.unwrap_or_else(|| MonitorConfig::for_dim(self.dim()))
    }

    /// Same scenario with every default written out.
    pub fn canonical(&self) -> ScenarioConfig {
        ScenarioConfig {
            grid: GridSpec {
                resolution: self.grid.resolution.clone(),
                length: Some(self.grid.lengths()),
            },
            model: self.model.resolved(),
            integrator: self.integrator.resolved(),
            initial: self.initial.clone(),
            monitors: Some(self.monitors()),
            verdict: self.verdict,
            output: self.output.clone(),
        }
    }

    /// Every violated constraint, across all sections.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let dim = self.dim();
        if let Err(e) = self.grid.build() {
            v.push(match e {
                Error::InvalidGrid(m) => format!("grid: {m}"),
                other => format!("grid: {other}"),
            });
        }
        v.extend(
            self.model
                .params_unchecked()
                .violations()
                .into_iter()
                .map(|m| format!("model: {m}")),
        );
        v.extend(
            self.integrator
                .config()
                .violations()
                .into_iter()
                .map(|m| format!("integrator: {m}")),
        );
        if self.model.variant == Variant::Original {
            v.push("model: variant original cannot be integrated; choose effective_v1 or effective_v2".into());
        }
        if dim == 1 || dim == 2 {
            v.extend(
                self.monitors()
                    .violations(dim)
                    .into_iter()
                    .map(|m| format!("monitors: {m}")),
            );
        }
        let t = &self.verdict;
        if !(t.serrin_max > 0.0) || !(t.indicator_max > 0.0) {
            v.push("verdict: thresholds must be positive".into());
        }
        v.extend(
            self.initial
                .violations(self)
                .into_iter()
                .map(|m| format!("initial: {m}")),
        );
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::ConstraintViolation(v))
        }
    }

    /// Pretty JSON of [`ScenarioConfig::canonical`].
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.canonical()).expect("config serializes")
    }
}

/// Parses and validates a scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}
