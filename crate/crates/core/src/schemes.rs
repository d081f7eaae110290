//! Explicit central schemes on the network in conservative form.
//!
//! Every edge is updated by `u_j <- u_j - dt/dx (F_{j+1/2} - F_{j-1/2})`. Interior
//! faces use the relaxed (first order or MUSCL) flux, junction faces the
//! coupling flux and outer faces follow the boundary condition.

use crate::analysis::total_variation;
use crate::coupling::{flowmax_riemann_2to1, solve_coupling, CouplingData, CouplingTraces};
use crate::error::{Error, Result};
use crate::network::{BoundaryCondition, CellField, FluxFunction, Network, GHOSTS};

/// `max` of the arguments if all are negative, `min` if all are positive, `0` otherwise.
pub fn minmod(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "minmod of an empty list");
    if values.iter().all(|&q| q > 0.0) {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    } else if values.iter().all(|&q| q < 0.0) {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    }
}

/// Monotonized central-difference slope of the middle value.
#[inline]
pub fn mc_slope(w_prev: f64, w_mid: f64, w_next: f64, dx: f64) -> f64 {
    let a = 2.0 * (w_mid - w_prev) / dx;
    let b = (w_next - w_prev) / (2.0 * dx);
    let c = 2.0 * (w_next - w_mid) / dx;
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Relaxed flux across the face between `u_left` and `u_right`, with slope
/// corrections `s_left_plus` (of `w+` in the left cell) and `s_right_minus`
/// (of `w-` in the right cell). Zero slopes give the first order flux.
#[inline]
pub fn interior_flux(
    u_left: f64,
    u_right: f64,
    flux: &FluxFunction,
    lambda: f64,
    s_left_plus: f64,
    s_right_minus: f64,
    dx: f64,
) -> f64 {
    relaxed_flux(
        u_left,
        u_right,
        flux.eval(u_left),
        flux.eval(u_right),
        lambda,
        s_left_plus,
        s_right_minus,
        dx,
    )
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn relaxed_flux(
    u_left: f64,
    u_right: f64,
    f_left: f64,
    f_right: f64,
    lambda: f64,
    s_left_plus: f64,
    s_right_minus: f64,
    dx: f64,
) -> f64 {
    0.5 * (f_left + f_right)
        - 0.5 * lambda * (u_right - u_left)
        - 0.5 * dx * (s_right_minus - s_left_plus)
}

/// Junction-face fluxes `F_{-1/2}` per edge.
///
/// Evaluates the first order face formula with the coupling state as ghost
/// value and checks that it reproduces `v_R` (incoming) or `v_L` (outgoing).
pub fn node_flux(
    coupling: &CouplingData,
    traces: &CouplingTraces,
    network: &Network,
) -> Result<Vec<f64>> {
    network
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let (u0, f0) = (traces.u[k], e.flux.eval(traces.u[k]));
            let (uc, vc) = (coupling.u[k], coupling.v[k]);
            let face = if e.is_incoming() {
                0.5 * (f0 + vc) - 0.5 * e.lambda * (uc - u0)
            } else {
                0.5 * (vc + f0) - 0.5 * e.lambda * (u0 - uc)
            };
            let scale = 1.0f64.max(vc.abs()).max(e.lambda * uc.abs());
            let deviation = (face - vc).abs();
            if deviation > 1e-12 * scale {
                return Err(Error::NodeFluxMismatch {
                    edge: e.index,
                    deviation,
                });
            }
            Ok(vc)
        })
        .collect()
}

/// Scaled Kirchhoff residual `|sum_in F - sum_out F| / max(1, sum |F|)`.
pub fn node_residual(node_fluxes: &[f64], network: &Network) -> f64 {
    let mut balance = 0.0;
    let mut scale = 0.0;
    for (f, e) in node_fluxes.iter().zip(network.edges()) {
        balance -= e.sign() * f;
        scale += f.abs();
    }
    balance.abs() / scale.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeOrder {
    First,
    /// MUSCL with node-adjacent slopes built from the coupling state.
    MusclCentral,
    /// MUSCL with node-adjacent slopes set to zero.
    MusclTvd,
}

impl SchemeOrder {
    pub fn is_muscl(self) -> bool {
        !matches!(self, SchemeOrder::First)
    }

    /// Largest admissible `lambda dt / dx`.
    pub fn courant_limit(self) -> f64 {
        if self.is_muscl() {
            0.5
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `dt = cfl dx / lambda_max`.
    Cfl(f64),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingMode {
    /// Relaxation Riemann solver at the junction.
    Central,
    /// Demand/supply fluxes of a 2-to-1 traffic junction.
    FlowMax { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub order: SchemeOrder,
    pub time_step: TimeStep,
    pub coupling: CouplingMode,
}

impl SchemeConfig {
    pub fn new(order: SchemeOrder, time_step: TimeStep) -> Self {
        Self {
            order,
            time_step,
            coupling: CouplingMode::Central,
        }
    }

    pub fn with_coupling(mut self, coupling: CouplingMode) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn validate(&self, network: &Network) -> Result<()> {
        match self.time_step {
            TimeStep::Cfl(c) if !(c > 0.0 && c <= 1.0) => {
                return Err(Error::Config(format!(
                    "CFL number must lie in (0, 1], got {c}"
                )))
            }
            TimeStep::Cfl(c) if self.order.is_muscl() && c > 0.5 => {
                return Err(Error::Config(format!(
                    "MUSCL schemes need a CFL number of at most 0.5, got {c}"
                )))
            }
            TimeStep::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::Config(format!(
                    "time step must be positive, got {dt}"
                )))
            }
            _ => {}
        }
        if let CouplingMode::FlowMax { beta } = self.coupling {
            if network.n_minus() != 2 || network.n_plus() != 1 {
                return Err(Error::Config(
                    "flow maximization is implemented for 2-to-1 junctions only".into(),
                ));
            }
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::Config(format!(
                    "right-of-way parameter must lie in [0, 1], got {beta}"
                )));
            }
        }
        Ok(())
    }

    /// Nominal time step on the given network.
    pub fn dt(&self, network: &Network) -> f64 {
        match self.time_step {
            TimeStep::Cfl(c) => c * network.grid().dx / network.lambda_max(),
            TimeStep::Fixed(dt) => dt,
        }
    }

    fn check_cfl(&self, network: &Network, dt: f64) -> Result<()> {
        let dx = network.grid().dx;
        let limit = self.order.courant_limit() * dx;
        for e in network.edges() {
            let lambda_dt = e.lambda * dt;
            if lambda_dt > limit * (1.0 + 1e-12) {
                return Err(Error::Cfl {
                    edge: e.index,
                    lambda_dt,
                    limit,
                    dx,
                });
            }
        }
        Ok(())
    }
}

/// Result of a single step.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub field: CellField,
    /// Junction-face fluxes per edge.
    pub node_fluxes: Vec<f64>,
    /// Outer-face fluxes per edge; positive values point in `+x` direction.
    pub boundary_fluxes: Vec<f64>,
    /// Relaxation coupling state, absent under flow maximization.
    pub coupling: Option<CouplingData>,
}

/// Advances the field by one forward Euler step of size `dt`.
pub fn step(
    field: &CellField,
    network: &Network,
    config: &SchemeConfig,
    dt: f64,
) -> Result<StepOutput> {
    config.check_cfl(network, dt)?;
    let mut work = field.clone();
    work.apply_outer_boundary(network)?;
    let traces = CouplingTraces::from_cells(&work, network);
    let (node_fluxes, coupling) = match config.coupling {
        CouplingMode::Central => {
            let data = solve_coupling(&traces, network)?;
            (node_flux(&data, &traces, network)?, Some(data))
        }
        CouplingMode::FlowMax { beta } => {
            let fl = [
                &network.edge(0).flux,
                &network.edge(1).flux,
                &network.edge(2).flux,
            ];
            let q = flowmax_riemann_2to1([traces.u[0], traces.u[1], traces.u[2]], beta, fl)?;
            (q.to_vec(), None)
        }
    };

    let m = network.grid().m;
    let dx = network.grid().dx;
    let ratio = dt / dx;
    let mut faces: Vec<Vec<f64>> = (0..network.len())
        .map(|k| {
            let junction = JunctionGhost::new(config, coupling.as_ref(), network, k);
            edge_faces(
                work.extended(k),
                network,
                k,
                config.order,
                junction,
                node_fluxes[k],
            )
        })
        .collect();

    let mut boundary_fluxes = vec![0.0; network.len()];
    for k in 0..network.len() {
        let outer = if network.edge(k).is_incoming() { 0 } else { m };
        if network.boundary(k) == BoundaryCondition::ZeroFlux {
            faces[k][outer] = 0.0;
        }
    }
    if network.is_periodic() {
        // Both outer faces are the same physical face; share one value.
        faces[1][m] = faces[0][0];
    }
    for k in 0..network.len() {
        let outer = if network.edge(k).is_incoming() { 0 } else { m };
        boundary_fluxes[k] = faces[k][outer];
    }

    let mut next = field.clone();
    for (k, f) in faces.iter().enumerate() {
        let u_old = field.interior(k);
        for (j, u) in next.interior_mut(k).iter_mut().enumerate() {
            *u = u_old[j] - ratio * (f[j + 1] - f[j]);
        }
    }
    Ok(StepOutput {
        field: next,
        node_fluxes,
        boundary_fluxes,
        coupling,
    })
}

/// How the junction-side slope of an edge is formed.
#[derive(Debug, Clone, Copy)]
enum JunctionGhost {
    /// Characteristic ghost value from the coupling state.
    Coupling(f64),
    /// Slope forced to zero.
    ZeroSlope,
    /// First order scheme; no slopes at all.
    None,
}

impl JunctionGhost {
    fn new(
        config: &SchemeConfig,
        coupling: Option<&CouplingData>,
        network: &Network,
        k: usize,
    ) -> Self {
        match (config.order, coupling) {
            (SchemeOrder::First, _) => JunctionGhost::None,
            (SchemeOrder::MusclCentral, Some(c)) => {
                let (w_minus, w_plus) = c.characteristic(k, network.edge(k).lambda);
                if network.edge(k).is_incoming() {
                    JunctionGhost::Coupling(w_minus)
                } else {
                    JunctionGhost::Coupling(w_plus)
                }
            }
            _ => JunctionGhost::ZeroSlope,
        }
    }
}

/// Face fluxes `F_0 .. F_m` of one edge from its extended cell array.
fn edge_faces(
    ext: &[f64],
    network: &Network,
    k: usize,
    order: SchemeOrder,
    junction: JunctionGhost,
    node_flux: f64,
) -> Vec<f64> {
    let edge = network.edge(k);
    let m = network.grid().m;
    let dx = network.grid().dx;
    let lam = edge.lambda;
    let f: Vec<f64> = ext.iter().map(|&u| edge.flux.eval(u)).collect();
    let n = ext.len();

    let (s_minus, s_plus) = if order.is_muscl() {
        let mut w_minus: Vec<f64> = (0..n).map(|i| 0.5 * (f[i] - lam * ext[i])).collect();
        let mut w_plus: Vec<f64> = (0..n).map(|i| 0.5 * (f[i] + lam * ext[i])).collect();
        if let JunctionGhost::Coupling(w) = junction {
            if edge.is_incoming() {
                w_minus[GHOSTS + m] = w;
            } else {
                w_plus[GHOSTS - 1] = w;
            }
        }
        let slopes = |w: &[f64]| -> Vec<f64> {
            let mut s = vec![0.0; n];
            for i in 1..n - 1 {
                s[i] = mc_slope(w[i - 1], w[i], w[i + 1], dx);
            }
            s
        };
        let mut s_minus = slopes(&w_minus);
        let mut s_plus = slopes(&w_plus);
        if let JunctionGhost::ZeroSlope = junction {
            if edge.is_incoming() {
                s_minus[GHOSTS + m - 1] = 0.0;
            } else {
                s_plus[GHOSTS] = 0.0;
            }
        }
        (s_minus, s_plus)
    } else {
        (vec![0.0; n], vec![0.0; n])
    };

    let junction_face = if edge.is_incoming() { m } else { 0 };
    (0..=m)
        .map(|face| {
            if face == junction_face {
                return node_flux;
            }
            let l = GHOSTS + face - 1;
            let r = GHOSTS + face;
            relaxed_flux(ext[l], ext[r], f[l], f[r], lam, s_plus[l], s_minus[r], dx)
        })
        .collect()
}

/// Single-edge periodic solver on a line of `u.len()` cells, used as the
/// uncoupled reference scheme.
pub fn step_periodic_line(
    u: &[f64],
    flux: &FluxFunction,
    lambda: f64,
    dx: f64,
    dt: f64,
    order: SchemeOrder,
) -> Vec<f64> {
    let n = u.len();
    let idx = |i: isize| u[i.rem_euclid(n as isize) as usize];
    let f: Vec<f64> = u.iter().map(|&x| flux.eval(x)).collect();
    let fi = |i: isize| f[i.rem_euclid(n as isize) as usize];
    let (s_minus, s_plus): (Vec<f64>, Vec<f64>) = if order.is_muscl() {
        (0..n as isize)
            .map(|i| {
                let wm = |j: isize| 0.5 * (fi(j) - lambda * idx(j));
                let wp = |j: isize| 0.5 * (fi(j) + lambda * idx(j));
                (
                    mc_slope(wm(i - 1), wm(i), wm(i + 1), dx),
                    mc_slope(wp(i - 1), wp(i), wp(i + 1), dx),
                )
            })
            .unzip()
    } else {
        (vec![0.0; n], vec![0.0; n])
    };
    // faces[i] is the left face of cell i
    let faces: Vec<f64> = (0..n)
        .map(|i| {
            let l = (i + n - 1) % n;
            relaxed_flux(u[l], u[i], f[l], f[i], lambda, s_plus[l], s_minus[i], dx)
        })
        .collect();
    let ratio = dt / dx;
    (0..n)
        .map(|i| u[i] - ratio * (faces[(i + 1) % n] - faces[i]))
        .collect()
}

/// Per-step record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    /// Time after the step.
    pub time: f64,
    pub dt: f64,
    pub total_mass: f64,
    pub node_residual: f64,
    pub total_variation: f64,
    pub node_fluxes: Vec<f64>,
    /// Net mass entering through outer faces during the step.
    pub boundary_inflow: f64,
    /// The step was shortened to land on a snapshot or the final time.
    pub clipped: bool,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub field: CellField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    /// Output times in `[0, t_end]`; `t_end` is always included.
    pub snapshot_times: Vec<f64>,
    pub record_diagnostics: bool,
}

impl RunOptions {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            snapshot_times: Vec::new(),
            record_diagnostics: false,
        }
    }

    pub fn snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn diagnostics(mut self, on: bool) -> Self {
        self.record_diagnostics = on;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub final_field: CellField,
    pub steps: usize,
    pub initial_mass: f64,
}

impl Trajectory {
    /// Largest per-step node residual.
    pub fn max_node_residual(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.node_residual)
            .fold(0.0, f64::max)
    }
}

const TIME_TOL: f64 = 1e-12;

/// Integrates from `t = 0` to `options.t_end`, clipping steps so that every
/// requested snapshot time is hit exactly.
pub fn run(
    initial: &CellField,
    network: &Network,
    config: &SchemeConfig,
    options: &RunOptions,
) -> Result<Trajectory> {
    run_observed(initial, network, config, options, None)
}

/// [`run`] that also hands every step's diagnostics to `observer` as soon as
/// the step completes, so callers keep a record of a run that aborts.
pub fn run_observed(
    initial: &CellField,
    network: &Network,
    config: &SchemeConfig,
    options: &RunOptions,
    mut observer: Option<&mut dyn FnMut(&StepDiagnostics)>,
) -> Result<Trajectory> {
    config.validate(network)?;
    if !(options.t_end >= 0.0 && options.t_end.is_finite()) {
        return Err(Error::Config(format!(
            "invalid final time {}",
            options.t_end
        )));
    }
    let mut targets: Vec<f64> = options
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t <= options.t_end + TIME_TOL)
        .chain(std::iter::once(options.t_end))
        .collect();
    if targets.iter().any(|t| t.is_nan() || *t < 0.0) {
        return Err(Error::Config("snapshot times must be non-negative".into()));
    }
    targets.sort_by(f64::total_cmp);
    targets.dedup_by(|a, b| (*a - *b).abs() <= TIME_TOL);

    let dx = network.grid().dx;
    let dt_nominal = config.dt(network);
    let mut field = initial.clone();
    let initial_mass = field.total_mass(dx);
    let mut t = 0.0;
    let mut steps = 0;
    let mut snapshots = Vec::new();
    let mut diagnostics = Vec::new();

    for &target in &targets {
        while target - t > TIME_TOL {
            let remaining = target - t;
            let (dt, clipped) = if remaining <= dt_nominal * (1.0 + 1e-12) {
                (remaining, (remaining - dt_nominal).abs() > TIME_TOL)
            } else {
                (dt_nominal, false)
            };
            let out = step(&field, network, config, dt)?;
            steps += 1;
            if let Some((k, j)) = out.field.first_non_finite() {
                return Err(Error::NonFinite {
                    step: steps,
                    edge: k + 1,
                    cell: j,
                });
            }
            field = out.field;
            t = if clipped || remaining <= dt_nominal * (1.0 + 1e-12) {
                target
            } else {
                t + dt
            };
            if options.record_diagnostics || observer.is_some() {
                let inflow = out
                    .boundary_fluxes
                    .iter()
                    .zip(network.edges())
                    .map(|(f, e)| if e.is_incoming() { f * dt } else { -f * dt })
                    .sum::<f64>();
                let d = StepDiagnostics {
                    step: steps,
                    time: t,
                    dt,
                    total_mass: field.total_mass(dx),
                    node_residual: node_residual(&out.node_fluxes, network),
                    total_variation: total_variation(&field, network),
                    node_fluxes: out.node_fluxes,
                    boundary_inflow: if network.is_periodic() { 0.0 } else { inflow },
                    clipped,
                };
                if let Some(obs) = observer.as_mut() {
                    obs(&d);
                }
                if options.record_diagnostics {
                    diagnostics.push(d);
                }
            }
        }
        snapshots.push(Snapshot {
            time: target,
            field: field.clone(),
        });
    }
    Ok(Trajectory {
        snapshots,
        diagnostics,
        final_field: field,
        steps,
        initial_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Grid;
    use approx::assert_relative_eq;

    fn burgers_1to1(m: usize, bc: BoundaryCondition) -> Network {
        Network::one_to_one(
            Grid::unit(m).unwrap(),
            FluxFunction::Burgers,
            1.0,
            FluxFunction::Burgers,
            1.0,
            bc,
        )
        .unwrap()
    }

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(minmod(&[-1.0, -4.0]), -1.0);
        assert_eq!(minmod(&[-1.0, 2.0]), 0.0);
        assert_eq!(minmod(&[0.0, 2.0]), 0.0);
    }

    #[test]
    fn mc_slope_cases() {
        assert_relative_eq!(mc_slope(1.0, 1.5, 2.0, 0.25), 2.0, epsilon = 1e-15);
        assert_eq!(mc_slope(0.0, 0.0, 1.0, 1.0), 0.0);
        assert_eq!(mc_slope(0.0, 1.0, 1.0, 1.0), 0.0);
        assert_relative_eq!(mc_slope(0.0, 1.0, 1.5, 1.0), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn interior_flux_cases() {
        let f = FluxFunction::Burgers;
        assert_relative_eq!(
            interior_flux(0.3, 0.3, &f, 1.0, 0.0, 0.0, 0.1),
            0.045,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            interior_flux(1.0, 0.0, &f, 1.0, 0.0, 0.0, 0.1),
            0.75,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            interior_flux(1.0, 0.0, &f, 1.0, 0.4, 0.2, 0.1),
            0.75 - 0.05 * (0.2 - 0.4),
            epsilon = 1e-15
        );
    }

    #[test]
    fn appendix_node_flux_example() {
        let net = Network::one_to_one(
            Grid::unit(4).unwrap(),
            FluxFunction::Burgers,
            1.0,
            FluxFunction::Burgers,
            2.0,
            BoundaryCondition::HomogeneousNeumann,
        )
        .unwrap();
        let traces = CouplingTraces::new(vec![1.0, 0.0], vec![0.5, 0.0]);
        let c = solve_coupling(&traces, &net).unwrap();
        let fl = node_flux(&c, &traces, &net).unwrap();
        assert_relative_eq!(fl[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(fl[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn corrupted_coupling_is_detected() {
        let net = burgers_1to1(4, BoundaryCondition::Periodic);
        let traces = CouplingTraces::new(vec![0.2, 0.4], vec![0.02, 0.08]);
        let mut c = solve_coupling(&traces, &net).unwrap();
        c.u[0] += 1e-3;
        assert!(matches!(
            node_flux(&c, &traces, &net),
            Err(Error::NodeFluxMismatch { edge: 1, .. })
        ));
    }

    #[test]
    fn constant_state_is_stationary() {
        let net = burgers_1to1(16, BoundaryCondition::Periodic);
        let field = CellField::from_point_values(&net, |_, _| 0.4);
        for order in [
            SchemeOrder::First,
            SchemeOrder::MusclCentral,
            SchemeOrder::MusclTvd,
        ] {
            let cfg = SchemeConfig::new(order, TimeStep::Cfl(0.4));
            let out = step(&field, &net, &cfg, cfg.dt(&net)).unwrap();
            for k in 0..2 {
                for &u in out.field.interior(k) {
                    assert_relative_eq!(u, 0.4, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let net = burgers_1to1(10, BoundaryCondition::Periodic);
        let field = CellField::zeros(&net);
        let cfg = SchemeConfig::new(SchemeOrder::MusclCentral, TimeStep::Fixed(0.06));
        assert!(matches!(
            step(&field, &net, &cfg, 0.06),
            Err(Error::Cfl { .. })
        ));
        let cfg = SchemeConfig::new(SchemeOrder::First, TimeStep::Fixed(0.06));
        assert!(step(&field, &net, &cfg, 0.06).is_ok());
    }

    #[test]
    fn run_hits_snapshot_times() {
        let net = burgers_1to1(20, BoundaryCondition::Periodic);
        let field = CellField::from_point_values(&net, |_, x| 0.5 + 0.1 * x);
        let cfg = SchemeConfig::new(SchemeOrder::First, TimeStep::Cfl(0.9));
        let opts = RunOptions::new(0.1)
            .snapshots(vec![0.033, 0.0])
            .diagnostics(true);
        let tr = run(&field, &net, &cfg, &opts).unwrap();
        let times: Vec<f64> = tr.snapshots.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.0, 0.033, 0.1]);
        assert_eq!(tr.snapshots[0].field, field);
        assert!(tr.diagnostics.iter().any(|d| d.clipped));
        assert_eq!(tr.diagnostics.last().unwrap().time, 0.1);

        let zero = run(&field, &net, &cfg, &RunOptions::new(0.0)).unwrap();
        assert_eq!(zero.steps, 0);
        assert_eq!(zero.final_field, field);
    }

    #[test]
    fn flowmax_requires_two_to_one() {
        let net = burgers_1to1(8, BoundaryCondition::Periodic);
        let cfg = SchemeConfig::new(SchemeOrder::First, TimeStep::Cfl(0.5))
            .with_coupling(CouplingMode::FlowMax { beta: 0.5 });
        assert!(cfg.validate(&net).is_err());
    }

    #[test]
    fn periodic_line_preserves_mass() {
        let u: Vec<f64> = (0..32).map(|i| (i as f64 * 0.3).sin()).collect();
        let f = FluxFunction::Burgers;
        let next = step_periodic_line(&u, &f, 1.0, 1.0 / 16.0, 0.02, SchemeOrder::MusclCentral);
        let before: f64 = u.iter().sum();
        let after: f64 = next.iter().sum();
        assert!((before - after).abs() < 1e-13);
    }

    #[test]
    fn final_step_at_courant_limit_is_accepted() {
        // accumulated rounding in t must not push the last step over the limit
        let net = burgers_1to1(200, BoundaryCondition::Periodic);
        let field = CellField::from_point_values(&net, |_, x| 0.5 + 0.5 * (3.0 * x).sin());
        let cfg = SchemeConfig::new(SchemeOrder::MusclTvd, TimeStep::Cfl(0.5));
        let tr = run(&field, &net, &cfg, &RunOptions::new(0.75)).unwrap();
        assert_eq!(tr.steps, 300);
    }
}
