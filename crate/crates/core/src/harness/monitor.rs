//! Post-hoc monitoring of a stored run and Besov reports of field dumps.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    accumulate, blow_up_verdict, report, serrin_accumulator, vacuum_endpoint_norm, BlowUpVerdict, Breakdown,
    REPORT_SCHEMA_VERSION,
};
use crate::lp::{BesovIndex, DyadicFamily, Flavor};
use crate::spectral::load_dump;

use super::config::{parse_config, ScenarioConfig};
use super::simulate::{load_snapshots, RunSummary};

/// Continuation diagnostics recomputed from a run's snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorSummary {
    pub schema_version: u32,
    pub snapshot_count: usize,
    pub initial_time: f64,
    pub final_time: f64,
    /// `∫‖v‖_{L^q}^p dt` by the trapezoid rule over the snapshots.
    pub serrin_accumulated: f64,
    /// `‖ρ^{−(p−1)/2}‖_{L^∞_T L²}` with `p` the vacuum exponent.
    pub vacuum_endpoint: f64,
    pub indicator_series: Vec<f64>,
    /// Largest increase of the effective energy between consecutive snapshots.
    pub max_effective_energy_increase: f64,
    pub mass_relative_drift: f64,
    pub verdict: BlowUpVerdict,
}

fn read_config(dir: &Path) -> Result<ScenarioConfig> {
    parse_config(&fs::read_to_string(dir.join("config.json"))?)
}

pub fn monitor(dir: &Path) -> Result<MonitorSummary> {
    let cfg = read_config(dir)?;
    let params = cfg.params()?;
    let monitors = cfg.monitors();
    let snapshots = load_snapshots(dir)?;
    if snapshots.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let breakdown = match fs::read_to_string(dir.join("summary.json")) {
        Ok(text) => serde_json::from_str::<RunSummary>(&text)
            .map(|s| s.termination.breakdown())
            .unwrap_or(Breakdown::Other),
        Err(_) => Breakdown::None,
    };
    let mut reports = Vec::with_capacity(snapshots.len());
    for s in &snapshots {
        let mut r = report(s, &params, &monitors)?;
        if let Some(prev) = reports.last() {
            accumulate(prev, &mut r);
        }
        reports.push(r);
    }
    let serrin = serrin_accumulator(&snapshots, &params, monitors.serrin_p, monitors.serrin_q)?;
    let vacuum_endpoint = vacuum_endpoint_norm(&snapshots, monitors.vacuum_p, f64::INFINITY, 2.0)?;
    let increase = reports
        .windows(2)
        .map(|w| w[1].effective_energy - w[0].effective_energy)
        .fold(0.0, f64::max);
    let (first, last) = (&reports[0], reports.last().unwrap());
    Ok(MonitorSummary {
        schema_version: REPORT_SCHEMA_VERSION,
        snapshot_count: snapshots.len(),
        initial_time: first.time,
        final_time: last.time,
        serrin_accumulated: serrin,
        vacuum_endpoint,
        indicator_series: reports.iter().map(|r| r.vacuum_indicator).collect(),
        max_effective_energy_increase: increase,
        mass_relative_drift: (last.mass - first.mass).abs() / first.mass,
        verdict: blow_up_verdict(&reports, breakdown, &cfg.verdict),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellValue {
    pub q: i32,
    /// `2^{qs}‖Δ_q u‖_{L^p}`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovReport {
    pub s: f64,
    /// `null` encodes `∞`.
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub flavor: Flavor,
    pub component: usize,
    pub shells: Vec<ShellValue>,
    pub norm: f64,
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn besov_report(dump: &Path, idx: &BesovIndex, component: usize) -> Result<BesovReport> {
    let dump = load_dump(dump)?;
    let field = dump.components.get(component).ok_or_else(|| {
        Error::InvalidField(format!(
            "component {component} requested from a dump with {} components",
            dump.components.len()
        ))
    })?;
    let fam = DyadicFamily::new(field.grid())?;
    let shells = fam.besov_shells(field, idx)?;
    let norm = crate::lp::lr_sum(shells.iter().map(|s| s.1), idx.r);
    Ok(BesovReport {
        s: idx.s,
        p: finite_or_none(idx.p),
        r: finite_or_none(idx.r),
        flavor: idx.flavor,
        component,
        shells: shells.into_iter().map(|(q, value)| ShellValue { q, value }).collect(),
        norm,
    })
}
