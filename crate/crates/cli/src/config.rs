//! Run configuration. Values are layered: preset defaults, then a TOML file,
//! then command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use netflux::coupling::DEFAULT_EPS_REG;

use crate::error::{CliError, Result};
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Burgers,
    BurgersConvergence,
    TrafficFreeFlow,
    TrafficCongestion,
    BuckleyLeverett,
    Custom,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Burgers => "burgers",
            Preset::BurgersConvergence => "burgers-convergence",
            Preset::TrafficFreeFlow => "traffic-free-flow",
            Preset::TrafficCongestion => "traffic-congestion",
            Preset::BuckleyLeverett => "buckley-leverett",
            Preset::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    First,
    Muscl,
    MusclTvd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    Central,
    Flowmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Incoming,
    Outgoing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    ZeroFlux,
    Neumann,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FluxSpec {
    Burgers,
    Lwr { u_max: f64 },
    BuckleyLeverett,
}

/// Initial data on one edge, as a function of the network coordinate `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    Constant {
        value: f64,
    },
    /// `left` for `x <= at`, `right` otherwise.
    Step {
        left: f64,
        right: f64,
        at: f64,
    },
    /// `1/2 + sin(pi (x + 1)) / 2`.
    Sine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub direction: Direction,
    pub flux: FluxSpec,
    pub lambda: f64,
    pub boundary: Boundary,
    pub initial: InitialSpec,
}

/// Fully resolved configuration of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Preset,
    pub scheme: Scheme,
    pub coupling: Coupling,
    /// Cells per edge.
    pub m: usize,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Right-of-way parameter of flow maximization.
    pub beta: f64,
    pub eps_reg: f64,
    /// Table resolutions of the convergence study.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolutions: Vec<usize>,
    pub out: PathBuf,
    pub edges: Vec<EdgeSpec>,
}

/// One configuration layer; unset fields defer to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub preset: Option<Preset>,
    pub scheme: Option<Scheme>,
    pub coupling: Option<Coupling>,
    pub m: Option<usize>,
    pub t_end: Option<f64>,
    pub snapshot_times: Option<Vec<f64>>,
    pub cfl: Option<f64>,
    pub dt: Option<f64>,
    pub beta: Option<f64>,
    pub eps_reg: Option<f64>,
    pub resolutions: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
    pub edges: Option<Vec<EdgeSpec>>,
    /// Sets the relaxation speed of every edge.
    pub lambda: Option<f64>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// `self` with every field set in `top` replaced.
    ///
    /// Outside the convergence study `cfl` and `dt` form one choice, so a
    /// layer setting either of them replaces both.
    pub fn overlay(mut self, top: ConfigLayer, preset: Preset) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(if top.$f.is_some() { self.$f = top.$f; })*};
        }
        take!(
            preset,
            scheme,
            coupling,
            m,
            t_end,
            snapshot_times,
            beta,
            eps_reg,
            resolutions,
            out,
            edges,
            lambda
        );
        if preset == Preset::BurgersConvergence {
            take!(cfl, dt);
        } else if top.cfl.is_some() || top.dt.is_some() {
            self.cfl = top.cfl;
            self.dt = top.dt;
        }
        self
    }
}

/// Merges preset defaults, the file layer and the flag layer into a checked
/// configuration. The preset is taken from the flags, then from the file.
pub fn resolve(file: ConfigLayer, flags: ConfigLayer) -> Result<RunConfig> {
    let preset = flags
        .preset
        .or(file.preset)
        .ok_or_else(|| CliError::Config("no preset given".into()))?;
    let merged = presets::defaults(preset)
        .overlay(file, preset)
        .overlay(flags, preset);
    finalize(preset, merged)
}

fn finalize(preset: Preset, layer: ConfigLayer) -> Result<RunConfig> {
    let mut missing = Vec::new();
    if layer.edges.is_none() {
        missing.push("edges".to_string());
    }
    if layer.m.is_none() {
        missing.push("m".to_string());
    }
    if layer.t_end.is_none() {
        missing.push(match presets::suggested_t_end(preset) {
            Some(t) => format!("t_end (suggested: {t})"),
            None => "t_end".to_string(),
        });
    }
    let scheme = layer.scheme.unwrap_or(Scheme::First);
    let (cfl, dt) = match (layer.cfl, layer.dt) {
        (None, None) => match presets::default_cfl(preset, scheme) {
            Some(c) => (Some(c), None),
            None => {
                missing.push("cfl or dt".to_string());
                (None, None)
            }
        },
        other => other,
    };
    if !missing.is_empty() {
        return Err(CliError::Config(format!(
            "missing required fields for preset {}: {}",
            preset.name(),
            missing.join(", ")
        )));
    }
    let mut edges = layer.edges.unwrap_or_default();
    if let Some(lam) = layer.lambda {
        for e in &mut edges {
            e.lambda = lam;
        }
    }
    let cfg = RunConfig {
        preset,
        scheme,
        coupling: layer.coupling.unwrap_or(Coupling::Central),
        m: layer.m.unwrap_or_default(),
        t_end: layer.t_end.unwrap_or_default(),
        snapshot_times: layer.snapshot_times.unwrap_or_default(),
        cfl,
        dt,
        beta: layer.beta.unwrap_or(0.2),
        eps_reg: layer.eps_reg.unwrap_or(DEFAULT_EPS_REG),
        resolutions: layer.resolutions.unwrap_or_default(),
        out: layer.out.unwrap_or_else(|| PathBuf::from("out")),
        edges,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(CliError::Config(msg));
        if self.m == 0 {
            return err("m must be positive".into());
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return err(format!(
                "t_end must be a non-negative number, got {}",
                self.t_end
            ));
        }
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|t| !(**t >= 0.0 && t.is_finite()))
        {
            return err(format!("invalid snapshot time {t}"));
        }
        if self.preset != Preset::BurgersConvergence && self.cfl.is_some() && self.dt.is_some() {
            return err("set either cfl or dt, not both".into());
        }
        if let Some(c) = self.cfl {
            if !(c > 0.0 && c <= 1.0) {
                return err(format!("cfl must lie in (0, 1], got {c}"));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return err(format!("dt must be positive, got {dt}"));
            }
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return err(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        if !(self.eps_reg > 0.0 && self.eps_reg.is_finite()) {
            return err(format!("eps_reg must be positive, got {}", self.eps_reg));
        }
        if self.edges.is_empty() {
            return err("at least one incoming and one outgoing edge are required".into());
        }
        let first_out = self
            .edges
            .iter()
            .position(|e| e.direction == Direction::Outgoing)
            .unwrap_or(self.edges.len());
        if self.edges[first_out..]
            .iter()
            .any(|e| e.direction == Direction::Incoming)
        {
            return err("incoming edges must be listed before outgoing edges".into());
        }
        for (k, e) in self.edges.iter().enumerate() {
            if !(e.lambda > 0.0 && e.lambda.is_finite()) {
                return err(format!(
                    "edge {}: lambda must be positive, got {}",
                    k + 1,
                    e.lambda
                ));
            }
            if let FluxSpec::Lwr { u_max } = e.flux {
                if u_max.is_nan() || u_max <= 0.0 {
                    return err(format!("edge {}: u_max must be positive", k + 1));
                }
            }
        }
        if self.preset == Preset::BurgersConvergence {
            if self.cfl.is_none() || self.dt.is_none() {
                return err(
                    "the convergence study needs both cfl (first order) and dt (MUSCL)".into(),
                );
            }
            if self.resolutions.is_empty() || self.resolutions.iter().any(|&n| n < 4 || n % 2 != 0)
            {
                return err("resolutions must be even numbers of at least 4".into());
            }
        }
        Ok(())
    }

    /// The configuration as TOML; parsing it as a file layer over any preset
    /// gives back the same configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes to TOML")
    }
}
