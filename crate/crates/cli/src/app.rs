//! Executes a resolved configuration and writes its output files.

use std::path::Path;

use serde::Serialize;

use netflux::schemes::run_observed;
use netflux::Network;

use crate::config::{Preset, RunConfig};
use crate::convergence::{study, StudySettings, Variant};
use crate::error::{CliError, Result};
use crate::output::{write_json, write_snapshots, write_table, write_text, DiagnosticsWriter};
use crate::presets::setup;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeSummary {
    pub edge: usize,
    pub incoming: bool,
    pub flux: String,
    pub lambda: f64,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub preset: String,
    pub status: String,
    pub steps: usize,
    pub dt: f64,
    pub dx: f64,
    pub t_end: f64,
    pub initial_mass: f64,
    pub final_mass: Option<f64>,
    pub max_node_residual: f64,
    /// Net mass that entered through the outer boundaries.
    pub boundary_inflow: f64,
    pub edges: Vec<EdgeSummary>,
}

fn edges(network: &Network) -> Vec<EdgeSummary> {
    network
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| EdgeSummary {
            edge: k + 1,
            incoming: e.is_incoming(),
            flux: e.flux.name(),
            lambda: e.lambda,
        })
        .collect()
}

fn prepare(out: &Path, cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|source| CliError::Write {
        path: out.to_path_buf(),
        source,
    })?;
    write_text(&out.join("config.toml"), &cfg.to_toml())
}

/// Runs a preset. Writes `config.toml`, `diagnostics.csv`, `snapshots.csv`
/// and `summary.json`; the convergence preset writes `table.csv` and
/// `table.json` instead. After a numerical failure the diagnostics up to the
/// last completed step and a summary with the error are still written.
pub fn run_preset(cfg: &RunConfig) -> Result<Option<RunSummary>> {
    if cfg.preset == Preset::BurgersConvergence {
        run_convergence(cfg)?;
        return Ok(None);
    }
    let s = setup(cfg)?;
    let out = cfg.out.as_path();
    prepare(out, cfg)?;

    let mut writer = DiagnosticsWriter::create(&out.join("diagnostics.csv"), s.network.len())?;
    let mut write_failure = None;
    let mut steps = 0;
    let mut max_residual: f64 = 0.0;
    let mut inflow = 0.0;
    let mut last_mass = None;
    let mut observer = |d: &netflux::schemes::StepDiagnostics| {
        steps = d.step;
        max_residual = max_residual.max(d.node_residual);
        inflow += d.boundary_inflow;
        last_mass = Some(d.total_mass);
        if write_failure.is_none() {
            write_failure = writer.write(d).err();
        }
    };
    let result = run_observed(
        &s.initial,
        &s.network,
        &s.scheme,
        &s.options,
        Some(&mut observer),
    );
    if let Some(e) = write_failure {
        return Err(e);
    }
    writer.finish()?;

    let dx = s.network.grid().dx;
    let mut summary = RunSummary {
        preset: cfg.preset.name().into(),
        status: "ok".into(),
        steps,
        dt: s.scheme.dt(&s.network),
        dx,
        t_end: cfg.t_end,
        initial_mass: s.initial.total_mass(dx),
        final_mass: last_mass.or(Some(s.initial.total_mass(dx))),
        max_node_residual: max_residual,
        boundary_inflow: inflow,
        edges: edges(&s.network),
    };
    match result {
        Ok(tr) => {
            write_snapshots(&out.join("snapshots.csv"), &s.network, &tr.snapshots)?;
            write_json(&out.join("summary.json"), &summary)?;
            Ok(Some(summary))
        }
        Err(e) => {
            summary.status = format!("failed: {e}");
            summary.final_mass = None;
            write_json(&out.join("summary.json"), &summary)?;
            Err(e.into())
        }
    }
}

#[derive(Serialize)]
struct TableMeta<'a> {
    scheme: &'a str,
    time_step: &'a str,
    t_eval: f64,
    resolution: &'static str,
}

/// Writes `table.csv` and a `table.json` sidecar describing each variant.
pub fn run_convergence(cfg: &RunConfig) -> Result<Vec<netflux::analysis::ErrorReport>> {
    let out = cfg.out.as_path();
    prepare(out, cfg)?;
    let reports = study(&Variant::ALL, &StudySettings::from_config(cfg))?;
    write_table(&out.join("table.csv"), &reports)?;
    let meta: Vec<TableMeta> = reports
        .iter()
        .map(|r| TableMeta {
            scheme: &r.scheme,
            time_step: &r.time_step,
            t_eval: r.t_eval,
            resolution: "inv_dx counts the cells covering (-1, 1)",
        })
        .collect();
    write_json(&out.join("table.json"), &meta)?;
    Ok(reports)
}
