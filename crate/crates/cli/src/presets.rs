//! Experiment presets and the translation of a [`RunConfig`] into solver inputs.

use netflux::analysis::burgers_initial;
use netflux::coupling::{ConditionRule, ConditionSet, RateMatrix};
use netflux::schemes::{CouplingMode, RunOptions, SchemeConfig, SchemeOrder, TimeStep};
use netflux::{BoundaryCondition, CellField, FluxFunction, Grid, Network};

use crate::config::{
    Boundary, ConfigLayer, Coupling, Direction, EdgeSpec, FluxSpec, InitialSpec, Preset, RunConfig,
    Scheme,
};
use crate::error::Result;

fn edge(
    direction: Direction,
    flux: FluxSpec,
    lambda: f64,
    boundary: Boundary,
    initial: InitialSpec,
) -> EdgeSpec {
    EdgeSpec {
        direction,
        flux,
        lambda,
        boundary,
        initial,
    }
}

fn constant(value: f64) -> InitialSpec {
    InitialSpec::Constant { value }
}

fn burgers_edges() -> Vec<EdgeSpec> {
    [Direction::Incoming, Direction::Outgoing]
        .into_iter()
        .map(|d| {
            edge(
                d,
                FluxSpec::Burgers,
                1.0,
                Boundary::Periodic,
                InitialSpec::Sine,
            )
        })
        .collect()
}

fn traffic_edges(u0: [f64; 3]) -> Vec<EdgeSpec> {
    let road = FluxSpec::Lwr { u_max: 1.0 };
    vec![
        edge(
            Direction::Incoming,
            road,
            1.0,
            Boundary::ZeroFlux,
            constant(u0[0]),
        ),
        edge(
            Direction::Incoming,
            road,
            1.0,
            Boundary::ZeroFlux,
            constant(u0[1]),
        ),
        edge(
            Direction::Outgoing,
            FluxSpec::Lwr { u_max: 1.2 },
            1.0,
            Boundary::Neumann,
            constant(u0[2]),
        ),
    ]
}

fn buckley_leverett_edges() -> Vec<EdgeSpec> {
    let bl = FluxSpec::BuckleyLeverett;
    vec![
        edge(
            Direction::Incoming,
            bl,
            2.5,
            Boundary::Neumann,
            InitialSpec::Step {
                left: 1.0,
                right: 0.0,
                at: -0.5,
            },
        ),
        edge(
            Direction::Incoming,
            bl,
            2.5,
            Boundary::Neumann,
            constant(0.16),
        ),
        edge(
            Direction::Outgoing,
            bl,
            2.5,
            Boundary::Neumann,
            constant(0.0),
        ),
    ]
}

/// Bottom configuration layer of a preset.
pub fn defaults(preset: Preset) -> ConfigLayer {
    let base = ConfigLayer {
        preset: Some(preset),
        scheme: Some(Scheme::First),
        coupling: Some(Coupling::Central),
        snapshot_times: Some(Vec::new()),
        ..Default::default()
    };
    match preset {
        Preset::Burgers => ConfigLayer {
            m: Some(200),
            t_end: Some(0.75),
            snapshot_times: Some(vec![0.2, 0.5, 0.75]),
            edges: Some(burgers_edges()),
            ..base
        },
        Preset::BurgersConvergence => ConfigLayer {
            m: Some(200),
            t_end: Some(0.5),
            cfl: Some(0.49),
            dt: Some(2e-6),
            resolutions: Some(vec![100, 200, 400, 800]),
            edges: Some(burgers_edges()),
            ..base
        },
        Preset::TrafficFreeFlow => ConfigLayer {
            m: Some(200),
            edges: Some(traffic_edges([0.07, 0.15, 0.2])),
            ..base
        },
        Preset::TrafficCongestion => ConfigLayer {
            m: Some(200),
            edges: Some(traffic_edges([0.6, 0.35, 0.35])),
            ..base
        },
        Preset::BuckleyLeverett => ConfigLayer {
            m: Some(300),
            scheme: Some(Scheme::Muscl),
            edges: Some(buckley_leverett_edges()),
            ..base
        },
        Preset::Custom => ConfigLayer {
            preset: Some(preset),
            ..Default::default()
        },
    }
}

/// CFL number used when neither `cfl` nor `dt` is configured.
pub fn default_cfl(preset: Preset, scheme: Scheme) -> Option<f64> {
    match preset {
        Preset::Burgers => Some(if scheme == Scheme::First { 0.9 } else { 0.2 }),
        Preset::BurgersConvergence | Preset::TrafficFreeFlow | Preset::BuckleyLeverett => {
            Some(0.49)
        }
        Preset::TrafficCongestion => Some(0.2),
        Preset::Custom => None,
    }
}

/// Final times suggested in error messages for presets without a default.
pub fn suggested_t_end(preset: Preset) -> Option<f64> {
    match preset {
        Preset::TrafficFreeFlow => Some(1.0),
        Preset::TrafficCongestion => Some(1.0),
        Preset::BuckleyLeverett => Some(0.6),
        _ => None,
    }
}

pub fn flux(spec: FluxSpec) -> FluxFunction {
    match spec {
        FluxSpec::Burgers => FluxFunction::Burgers,
        FluxSpec::Lwr { u_max } => FluxFunction::lwr(u_max),
        FluxSpec::BuckleyLeverett => FluxFunction::BuckleyLeverett,
    }
}

pub fn boundary(b: Boundary) -> BoundaryCondition {
    match b {
        Boundary::ZeroFlux => BoundaryCondition::ZeroFlux,
        Boundary::Neumann => BoundaryCondition::HomogeneousNeumann,
        Boundary::Periodic => BoundaryCondition::Periodic,
    }
}

pub fn initial_value(spec: InitialSpec, x: f64) -> f64 {
    match spec {
        InitialSpec::Constant { value } => value,
        InitialSpec::Step { left, right, at } => {
            if x <= at {
                left
            } else {
                right
            }
        }
        InitialSpec::Sine => burgers_initial(x),
    }
}

pub fn order(scheme: Scheme) -> SchemeOrder {
    match scheme {
        Scheme::First => SchemeOrder::First,
        Scheme::Muscl => SchemeOrder::MusclCentral,
        Scheme::MusclTvd => SchemeOrder::MusclTvd,
    }
}

/// Network on `m` cells per edge with the configured junction conditions.
pub fn build_network(cfg: &RunConfig, m: usize) -> Result<Network> {
    let mut b = Network::builder(Grid::unit(m)?);
    for e in &cfg.edges {
        b = match e.direction {
            Direction::Incoming => b.incoming(flux(e.flux), e.lambda, boundary(e.boundary)),
            Direction::Outgoing => b.outgoing(flux(e.flux), e.lambda, boundary(e.boundary)),
        };
    }
    let n_minus = cfg
        .edges
        .iter()
        .filter(|e| e.direction == Direction::Incoming)
        .count();
    let n_plus = cfg.edges.len() - n_minus;
    let mut rules = Vec::new();
    if n_minus > 1 {
        rules.push(ConditionRule::IncomingProportional {
            eps_reg: cfg.eps_reg,
        });
    }
    if n_plus > 1 {
        rules.push(ConditionRule::OutgoingDistribution(RateMatrix::uniform(
            n_minus, n_plus,
        )));
    }
    Ok(b.conditions(ConditionSet::new(rules)).build()?)
}

/// Cell averages of the configured initial data.
pub fn initial_field(cfg: &RunConfig, network: &Network) -> CellField {
    CellField::from_cell_averages(network, |k, x| initial_value(cfg.edges[k].initial, x))
}

pub fn scheme_config(cfg: &RunConfig) -> SchemeConfig {
    let time_step = match (cfg.dt, cfg.cfl) {
        (Some(dt), _) => TimeStep::Fixed(dt),
        (None, Some(c)) => TimeStep::Cfl(c),
        (None, None) => unreachable!("resolved configurations carry a time step"),
    };
    let coupling = match cfg.coupling {
        Coupling::Central => CouplingMode::Central,
        Coupling::Flowmax => CouplingMode::FlowMax { beta: cfg.beta },
    };
    SchemeConfig::new(order(cfg.scheme), time_step).with_coupling(coupling)
}

/// Snapshot times always include `t = 0`.
pub fn run_options(cfg: &RunConfig) -> RunOptions {
    let mut times = vec![0.0];
    times.extend(cfg.snapshot_times.iter().copied());
    RunOptions::new(cfg.t_end).snapshots(times)
}

/// Everything a single run needs.
pub struct Setup {
    pub network: Network,
    pub initial: CellField,
    pub scheme: SchemeConfig,
    pub options: RunOptions,
}

pub fn setup(cfg: &RunConfig) -> Result<Setup> {
    let network = build_network(cfg, cfg.m)?;
    let initial = initial_field(cfg, &network);
    let scheme = scheme_config(cfg);
    scheme.validate(&network)?;
    Ok(Setup {
        network,
        initial,
        scheme,
        options: run_options(cfg),
    })
}
