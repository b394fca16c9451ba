//! Scenario execution and on-disk run layout.
//!
//! A run directory holds
//! - `config.json`: the canonical scenario,
//! - `functionals.csv`: one row per accepted step (plus the initial state),
//! - `reports.jsonl`: the same reports as JSON lines,
//! - `summary.json`: termination, mass drift and the blow-up verdict,
//! - `snapshots/manifest.json` and `snapshots/NNNNNN.bin` when dumps are enabled.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{blow_up_verdict, BlowUpVerdict, FunctionalReport, REPORT_SCHEMA_VERSION};
use crate::integrator::{run_forced, Forcing, Termination, Trajectory};
use crate::manufactured::Manufactured;
use crate::model::FieldState;
use crate::spectral::{save_dump, VectorField};

use super::config::ScenarioConfig;
use super::initial::InitialSpec;

/// Environment variable naming the directory that relative run paths resolve against.
pub const OUTPUT_ROOT_ENV: &str = "KORTEWEG_OUTPUT_ROOT";

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BlowUpDetected,
    Failed,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Completed => 0,
            RunStatus::BlowUpDetected | RunStatus::Failed => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub status: RunStatus,
    pub termination: Termination,
    pub error: Option<String>,
    pub initial_condition: String,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub initial_time: f64,
    pub final_time: f64,
    pub final_dt: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
    pub mass_relative_drift: f64,
    pub snapshot_count: usize,
    /// Relative `L²` error of `(ρ, v)` at the final time, manufactured runs only.
    pub manufactured_error: Option<f64>,
    pub verdict: BlowUpVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub file: String,
    pub time: f64,
}

/// Index of the snapshot dumps; each dump holds `ρ` then the components of `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotManifest {
    pub schema_version: u32,
    pub components: Vec<String>,
    pub snapshots: Vec<SnapshotEntry>,
}

#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub dir: PathBuf,
    pub summary: RunSummary,
    pub trajectory: Trajectory,
}

pub fn run_dir(cfg: &ScenarioConfig, root: &Path) -> PathBuf {
    if cfg.output.dir.is_absolute() {
        cfg.output.dir.clone()
    } else {
        root.join(&cfg.output.dir)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub fn csv_text(reports: &[FunctionalReport]) -> String {
    let mut out = FunctionalReport::csv_header();
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

fn relative_state_error(state: &FieldState, exact: &FieldState) -> Result<f64> {
    let dr = state.rho.sub(&exact.rho)?.l2_norm();
    let dv = state.w.sub(&exact.w)?.lp_norm(2.0);
    let norm = exact.rho.l2_norm().hypot(exact.w.lp_norm(2.0));
    Ok(dr.hypot(dv) / norm)
}

/// Runs the scenario and writes its run directory under `root`.
///
/// Configuration and I/O problems are errors; numerical breakdown is reported
/// in the summary with a nonzero exit status.
pub fn simulate(cfg: &ScenarioConfig, root: &Path) -> Result<SimulationOutcome> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let params = cfg.params()?;
    let integrator = cfg.integrator.config();
    let monitors = cfg.monitors();
    let initial = cfg.initial.build(&grid)?;

    let manufactured = match cfg.initial {
        InitialSpec::Manufactured { .. } => Some(Manufactured::new(grid.dim())),
        _ => None,
    };
    let forcing = manufactured.as_ref().map(|m| m as &dyn Forcing);
    let (trajectory, error) = match run_forced(&initial, &params, &integrator, &monitors, forcing) {
        Ok(t) => (t, None),
        Err(failure) => match failure.trajectory {
            Some(t) => (t, Some(failure.error)),
            None => return Err(failure.error),
        },
    };

    let dir = run_dir(cfg, root);
    fs::create_dir_all(&dir)?;
    write_text(&dir.join("config.json"), &(cfg.to_canonical_json() + "\n"))?;
    write_text(&dir.join("functionals.csv"), &csv_text(&trajectory.reports))?;
    let mut jsonl = String::new();
    for r in &trajectory.reports {
        jsonl.push_str(&serde_json::to_string(r).expect("report serializes"));
        jsonl.push('\n');
    }
    write_text(&dir.join("reports.jsonl"), &jsonl)?;

    let mut snapshot_count = 0;
    if cfg.output.dumps {
        snapshot_count = write_snapshots(&dir.join("snapshots"), &trajectory.snapshots)?;
    }

    let verdict = blow_up_verdict(&trajectory.reports, trajectory.termination.breakdown(), &cfg.verdict);
    let status = match (trajectory.termination, &error) {
        (Termination::Failed, _) => RunStatus::Failed,
        (Termination::Completed, None) if verdict.serrin_bounded && verdict.indicator_bounded => RunStatus::Completed,
        _ => RunStatus::BlowUpDetected,
    };
    let first = trajectory.reports.first().expect("initial report");
    let last = trajectory.reports.last().expect("initial report");
    let final_state = trajectory.final_state();
    let manufactured_error = match &manufactured {
        Some(m) => Some(relative_state_error(final_state, &m.state(&grid, final_state.time))?),
        None => None,
    };
    let summary = RunSummary {
        schema_version: REPORT_SCHEMA_VERSION,
        status,
        termination: trajectory.termination,
        error: error.as_ref().map(|e| e.to_string()),
        initial_condition: cfg.initial.name().to_string(),
        accepted_steps: trajectory.accepted_steps,
        rejected_steps: trajectory.rejected_steps,
        initial_time: first.time,
        final_time: last.time,
        final_dt: trajectory.final_dt,
        mass_initial: first.mass,
        mass_final: last.mass,
        mass_relative_drift: (last.mass - first.mass).abs() / first.mass,
        snapshot_count,
        manufactured_error,
        verdict,
    };
    write_text(
        &dir.join("summary.json"),
        &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
    )?;
    Ok(SimulationOutcome {
        dir,
        summary,
        trajectory,
    })
}

fn component_names(dim: usize) -> Vec<String> {
    let axes = ["x", "y"];
    std::iter::once("rho".to_string())
        .chain((0..dim).map(|j| format!("v_{}", axes[j])))
        .collect()
}

fn write_snapshots(dir: &Path, snapshots: &[FieldState]) -> Result<usize> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(snapshots.len());
    for (i, s) in snapshots.iter().enumerate() {
        let file = format!("{i:06}.bin");
        let mut fields = vec![&s.rho];
        fields.extend(s.w.components());
        save_dump(dir.join(&file), &fields)?;
        entries.push(SnapshotEntry { file, time: s.time });
    }
    let dim = snapshots.first().map_or(1, |s| s.rho.grid().dim());
    let manifest = SnapshotManifest {
        schema_version: REPORT_SCHEMA_VERSION,
        components: component_names(dim),
        snapshots: entries,
    };
    write_text(
        &dir.join("manifest.json"),
        &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"),
    )?;
    Ok(snapshots.len())
}

/// Loads the snapshots of a run directory.
pub fn load_snapshots(dir: &Path) -> Result<Vec<FieldState>> {
    let snap_dir = dir.join("snapshots");
    let text = fs::read_to_string(snap_dir.join("manifest.json"))?;
    let manifest: SnapshotManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("snapshots/manifest.json: {e}"),
    })?;
    let mut grid = None;
    manifest
        .snapshots
        .iter()
        .map(|entry| {
            let dump = crate::spectral::load_dump(snap_dir.join(&entry.file))?;
            // Keep one grid instance so the states can be combined.
            let g = grid.get_or_insert_with(|| dump.grid.clone()).clone();
            let rebind = |f: &crate::spectral::ScalarField| crate::spectral::ScalarField::new(&g, f.values().to_vec());
            if dump.components.len() != 1 + g.dim() {
                return Err(Error::InvalidField(format!(
                    "{}: {} components, expected {}",
                    entry.file,
                    dump.components.len(),
                    1 + g.dim()
                )));
            }
            let rho = rebind(&dump.components[0])?;
            let v = dump.components[1..].iter().map(rebind).collect::<Result<Vec<_>>>()?;
            FieldState::new(
                rho,
                VectorField::new(v)?,
                crate::model::VelocityKind::Effective,
                entry.time,
            )
        })
        .collect()
}
