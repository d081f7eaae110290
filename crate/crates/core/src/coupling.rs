//! Junction coupling data for the relaxation system.
//!
//! Given junction traces `(u0, v0)` on every edge, the relaxation Riemann
//! solver returns states `(u_R, v_R)` on incoming edges and `(u_L, v_L)` on
//! outgoing edges. Each state lies on the straight Lax curve of the wave
//! family leaving the junction:
//!
//! * incoming: `u_R = u0 - s`, `v_R = v0 + lambda s`
//! * outgoing: `u_L = u0 + s`, `v_L = v0 + lambda s`
//!
//! The `N` wave strengths `s` are fixed by Kirchhoff conditions on both `u`
//! and `v` plus `N - 2` linear conditions on the coupling fluxes.

use log::warn;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::network::{CellField, FluxFunction, Network};

/// Default regularization for the incoming-proportional rows.
pub const DEFAULT_EPS_REG: f64 = 1e-12;

/// Junction traces `(u0, v0)` for every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTraces {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl CouplingTraces {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(u.len(), v.len(), "trace vectors differ in length");
        Self { u, v }
    }

    /// Equilibrium traces `v0 = f_k(u0)` from the junction-adjacent cells.
    pub fn from_cells(field: &CellField, network: &Network) -> Self {
        let u: Vec<f64> = (0..network.len())
            .map(|k| field.junction_cell(network, k))
            .collect();
        let v = u
            .iter()
            .zip(network.edges())
            .map(|(&u, e)| e.flux.eval(u))
            .collect();
        Self { u, v }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Solver output: `(u_R, v_R)` on incoming edges, `(u_L, v_L)` on outgoing
/// edges, indexed like the network edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingData {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl CouplingData {
    /// Characteristic values `(w-, w+) = (v - lambda u, v + lambda u) / 2` of
    /// the coupling state on edge `k`.
    pub fn characteristic(&self, k: usize, lambda: f64) -> (f64, f64) {
        (
            0.5 * (self.v[k] - lambda * self.u[k]),
            0.5 * (self.v[k] + lambda * self.u[k]),
        )
    }

    /// Largest scaled violation of the Lax-curve conditions.
    pub fn lax_residual(&self, traces: &CouplingTraces, network: &Network) -> f64 {
        network
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let lam = e.lambda;
                // incoming: v + lam u conserved; outgoing: v - lam u conserved
                let s = -e.sign();
                let lhs = self.v[k] + s * lam * self.u[k];
                let rhs = traces.v[k] + s * lam * traces.u[k];
                let scale = 1.0f64.max(traces.v[k].abs() + lam * traces.u[k].abs());
                (lhs - rhs).abs() / scale
            })
            .fold(0.0, f64::max)
    }

    /// Scaled residuals of the Kirchhoff conditions on `v` and on `lambda^2 u`.
    pub fn kirchhoff_residuals(&self, network: &Network) -> (f64, f64) {
        let mut flux = 0.0;
        let mut flux_scale = 1.0f64;
        let mut aux = 0.0;
        let mut aux_scale = 1.0f64;
        for (k, e) in network.edges().iter().enumerate() {
            let s = -e.sign();
            let l2 = e.lambda * e.lambda;
            flux += s * self.v[k];
            flux_scale += self.v[k].abs();
            aux += s * l2 * self.u[k];
            aux_scale += l2 * self.u[k].abs();
        }
        (flux.abs() / flux_scale, aux.abs() / aux_scale)
    }
}

/// Closed-form coupling data of a 1-to-1 junction.
pub fn solve_coupling_1to1(traces: &CouplingTraces, lambda1: f64, lambda2: f64) -> CouplingData {
    assert_eq!(traces.len(), 2, "1-to-1 solver needs exactly two traces");
    let (u_in, v_in) = (traces.u[0], traces.v[0]);
    let (u_out, v_out) = (traces.u[1], traces.v[1]);
    let sum = lambda1 + lambda2;
    let common = (lambda1 * u_in + lambda2 * u_out + v_in - v_out) / sum;
    let u_r = lambda2 / lambda1 * common;
    let u_l = lambda1 / lambda2 * common;
    let v = (lambda1 * v_in + lambda2 * v_out + lambda1 * lambda1 * u_in
        - lambda2 * lambda2 * u_out)
        / sum;
    CouplingData {
        u: vec![u_r, u_l],
        v: vec![v, v],
    }
}

/// One additional junction condition `sum_k beta_k v_k = rhs` on the coupling fluxes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    pub beta: Vec<f64>,
    pub rhs: f64,
}

/// Distribution rates `alpha[k][m]`: share of the flux from incoming edge `k`
/// sent to outgoing edge `m` (both zero-based within their group).
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    rates: Vec<Vec<f64>>,
}

impl RateMatrix {
    pub fn new(rates: Vec<Vec<f64>>) -> Result<Self> {
        for (k, row) in rates.iter().enumerate() {
            if row.iter().any(|a| !(0.0..=1.0).contains(a)) {
                return Err(Error::Config(format!(
                    "distribution rates of incoming edge {} must lie in [0, 1]",
                    k + 1
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "distribution rates of incoming edge {} sum to {sum}, expected 1",
                    k + 1
                )));
            }
        }
        Ok(Self { rates })
    }

    /// Equal split over all outgoing edges.
    pub fn uniform(n_minus: usize, n_plus: usize) -> Self {
        Self {
            rates: vec![vec![1.0 / n_plus as f64; n_plus]; n_minus],
        }
    }

    pub fn rate(&self, incoming: usize, outgoing: usize) -> f64 {
        self.rates[incoming][outgoing]
    }

    pub fn n_minus(&self) -> usize {
        self.rates.len()
    }

    pub fn n_plus(&self) -> usize {
        self.rates.first().map_or(0, Vec::len)
    }
}

/// Source of additional condition rows.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionRule {
    /// Incoming coupling fluxes keep the ratios of the incoming trace fluxes;
    /// `N- - 1` rows, rebuilt from the traces at every solve.
    IncomingProportional { eps_reg: f64 },
    /// Outgoing fluxes follow a distribution matrix; `N+ - 1` rows.
    OutgoingDistribution(RateMatrix),
    /// Fixed rows given by the caller.
    CustomRows(Vec<ConditionRow>),
}

/// The `N - 2` additional junction conditions, as an ordered list of rules.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSet {
    pub rules: Vec<ConditionRule>,
}

impl ConditionSet {
    pub fn new(rules: Vec<ConditionRule>) -> Self {
        Self { rules }
    }

    /// Incoming-proportional rows plus a uniform outgoing split.
    pub fn default_for(n_minus: usize, n_plus: usize) -> Self {
        let mut rules = Vec::new();
        if n_minus > 1 {
            rules.push(ConditionRule::IncomingProportional {
                eps_reg: DEFAULT_EPS_REG,
            });
        }
        if n_plus > 1 {
            rules.push(ConditionRule::OutgoingDistribution(RateMatrix::uniform(
                n_minus, n_plus,
            )));
        }
        Self { rules }
    }

    fn row_count(&self, n_minus: usize, n_plus: usize) -> usize {
        self.rules
            .iter()
            .map(|r| match r {
                ConditionRule::IncomingProportional { .. } => n_minus - 1,
                ConditionRule::OutgoingDistribution(_) => n_plus - 1,
                ConditionRule::CustomRows(rows) => rows.len(),
            })
            .sum()
    }

    pub fn validate(&self, n_minus: usize, n_plus: usize) -> Result<()> {
        let n = n_minus + n_plus;
        let rows = self.row_count(n_minus, n_plus);
        if rows != n - 2 {
            return Err(Error::Config(format!(
                "a junction with {n} edges needs {} additional conditions, the rules provide {rows}",
                n - 2
            )));
        }
        for rule in &self.rules {
            match rule {
                ConditionRule::IncomingProportional { eps_reg } if *eps_reg < 0.0 => {
                    return Err(Error::Config(format!(
                        "regularization must be non-negative, got {eps_reg}"
                    )));
                }
                ConditionRule::OutgoingDistribution(alpha)
                    if alpha.n_minus() != n_minus || alpha.n_plus() != n_plus =>
                {
                    return Err(Error::Config(format!(
                        "distribution matrix is {}x{}, junction is {n_minus}-to-{n_plus}",
                        alpha.n_minus(),
                        alpha.n_plus()
                    )));
                }
                ConditionRule::CustomRows(rows) if rows.iter().any(|r| r.beta.len() != n) => {
                    return Err(Error::Config(format!(
                        "custom condition rows need {n} coefficients"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Expands the rules into concrete rows for the given traces.
    pub fn rows(&self, traces: &CouplingTraces, network: &Network) -> Result<Vec<ConditionRow>> {
        let (n_minus, n_plus) = (network.n_minus(), network.n_plus());
        self.validate(n_minus, n_plus)?;
        let mut rows = Vec::with_capacity(network.len() - 2);
        for rule in &self.rules {
            match rule {
                ConditionRule::IncomingProportional { eps_reg } => {
                    rows.extend(build_incoming_proportional(traces, n_minus, *eps_reg))
                }
                ConditionRule::OutgoingDistribution(alpha) => {
                    rows.extend(build_outgoing_distribution(alpha)?)
                }
                ConditionRule::CustomRows(custom) => rows.extend(custom.iter().cloned()),
            }
        }
        Ok(rows)
    }
}

/// Rows that keep `v_R^l / sum v_R = v0^l / sum v0` for the first `N- - 1`
/// incoming edges, regularized by `eps_reg` in both denominators.
pub fn build_incoming_proportional(
    traces: &CouplingTraces,
    n_minus: usize,
    eps_reg: f64,
) -> Vec<ConditionRow> {
    let n = traces.len();
    let incoming = &traces.v[..n_minus];
    if incoming.iter().any(|&v| v < 0.0) {
        warn!(
            "incoming-proportional conditions assume non-negative trace fluxes, got {incoming:?}"
        );
    }
    let total: f64 = incoming.iter().sum();
    (0..n_minus.saturating_sub(1))
        .map(|l| {
            let mut beta = vec![0.0; n];
            for (k, b) in beta.iter_mut().enumerate().take(n_minus) {
                *b = if k == l {
                    total - incoming[l] + eps_reg
                } else {
                    -incoming[l]
                };
            }
            ConditionRow {
                beta,
                rhs: eps_reg * incoming[l],
            }
        })
        .collect()
}

/// Rows `sum_k alpha_k^m v_R^k - v_L^m = 0` for all but the last outgoing edge.
pub fn build_outgoing_distribution(alpha: &RateMatrix) -> Result<Vec<ConditionRow>> {
    let alpha = RateMatrix::new(alpha.rates.clone())?;
    let (n_minus, n_plus) = (alpha.n_minus(), alpha.n_plus());
    let n = n_minus + n_plus;
    Ok((0..n_plus.saturating_sub(1))
        .map(|m| {
            let mut beta = vec![0.0; n];
            for (k, b) in beta.iter_mut().enumerate().take(n_minus) {
                *b = alpha.rate(k, m);
            }
            beta[n_minus + m] = -1.0;
            ConditionRow { beta, rhs: 0.0 }
        })
        .collect())
}

/// Linear system `A s = b` for the wave strengths `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    pub signs: Vec<f64>,
    pub lambdas: Vec<f64>,
}

pub fn assemble_coupling_system(
    traces: &CouplingTraces,
    network: &Network,
    rows: &[ConditionRow],
) -> Result<CouplingSystem> {
    let n = network.len();
    if traces.len() != n {
        return Err(Error::Config(format!(
            "expected {n} traces, got {}",
            traces.len()
        )));
    }
    if rows.len() != n - 2 {
        return Err(Error::Config(format!(
            "expected {} condition rows, got {}",
            n - 2,
            rows.len()
        )));
    }
    let signs: Vec<f64> = network.edges().iter().map(|e| e.sign()).collect();
    let lambdas: Vec<f64> = network.edges().iter().map(|e| e.lambda).collect();
    let mut matrix = DenseMatrix::zeros(n);
    let mut rhs = vec![0.0; n];
    for k in 0..n {
        let (nu, lam) = (signs[k], lambdas[k]);
        matrix.set(0, k, nu * lam);
        matrix.set(1, k, lam * lam);
        rhs[0] -= nu * traces.v[k];
        rhs[1] -= nu * lam * lam * traces.u[k];
    }
    for (l, row) in rows.iter().enumerate() {
        let mut b = row.rhs;
        for k in 0..n {
            matrix.set(2 + l, k, row.beta[k] * lambdas[k]);
            b -= row.beta[k] * traces.v[k];
        }
        rhs[2 + l] = b;
    }
    Ok(CouplingSystem {
        matrix,
        rhs,
        signs,
        lambdas,
    })
}

impl CouplingSystem {
    /// Wave strengths along the Lax curves.
    ///
    /// Rows are scaled to unit maximum norm first, so that a regularized row
    /// with tiny coefficients is not mistaken for a dependent one.
    pub fn solve_strengths(&self) -> Result<Vec<f64>> {
        let n = self.matrix.dim();
        let mut scaled = DenseMatrix::zeros(n);
        let mut rhs = self.rhs.clone();
        for i in 0..n {
            let norm = self
                .matrix
                .row(i)
                .iter()
                .fold(0.0, |a: f64, x| a.max(x.abs()));
            let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
            for j in 0..n {
                scaled.set(i, j, self.matrix.get(i, j) * scale);
            }
            rhs[i] *= scale;
        }
        let tol = 1e-12 * scaled.norm_inf().max(1.0);
        let dependent = scaled.dependent_rows(tol);
        if !dependent.is_empty() {
            return Err(Error::SingularCoupling { rows: dependent });
        }
        scaled
            .solve(&rhs, tol)
            .ok_or_else(|| Error::SingularCoupling {
                rows: scaled.dependent_rows(tol),
            })
    }

    /// Coupling data `u_c = u0 + nu s`, `v_c = v0 + lambda s`, the solution of
    /// `A N (u_c - u0) = b` and `A Lambda^-1 (v_c - v0) = b`.
    pub fn coupling_data(&self, traces: &CouplingTraces) -> Result<CouplingData> {
        let s = self.solve_strengths()?;
        let u = (0..s.len())
            .map(|k| traces.u[k] + self.signs[k] * s[k])
            .collect();
        let v = (0..s.len())
            .map(|k| traces.v[k] + self.lambdas[k] * s[k])
            .collect();
        Ok(CouplingData { u, v })
    }
}

/// General `N`-edge relaxation Riemann solver using the network's condition set.
pub fn solve_coupling_network(traces: &CouplingTraces, network: &Network) -> Result<CouplingData> {
    let rows = network.conditions().rows(traces, network)?;
    solve_coupling_with_rows(traces, network, &rows)
}

pub fn solve_coupling_with_rows(
    traces: &CouplingTraces,
    network: &Network,
    rows: &[ConditionRow],
) -> Result<CouplingData> {
    assemble_coupling_system(traces, network, rows)?.coupling_data(traces)
}

/// Coupling data for the scheme: the closed form on 1-to-1 junctions, the
/// linear system otherwise.
pub fn solve_coupling(traces: &CouplingTraces, network: &Network) -> Result<CouplingData> {
    if network.len() == 2 {
        Ok(solve_coupling_1to1(
            traces,
            network.edge(0).lambda,
            network.edge(1).lambda,
        ))
    } else {
        solve_coupling_network(traces, network)
    }
}

/// Density of maximal flux for fluxes with a unique interior maximum.
pub fn critical_density(flux: &FluxFunction) -> Result<f64> {
    match flux {
        FluxFunction::Lwr { u_max } => Ok(0.5 * u_max),
        other => Err(Error::NotUnimodal(other.name())),
    }
}

/// Demand: `f(u)` below the critical density, `f_max` above.
pub fn demand(flux: &FluxFunction, u: f64) -> Result<f64> {
    let crit = critical_density(flux)?;
    Ok(if u <= crit {
        flux.eval(u)
    } else {
        flux.eval(crit)
    })
}

/// Supply: `f_max` below the critical density, `f(u)` above.
pub fn supply(flux: &FluxFunction, u: f64) -> Result<f64> {
    let crit = critical_density(flux)?;
    Ok(if u <= crit {
        flux.eval(crit)
    } else {
        flux.eval(u)
    })
}

/// Flow-maximizing coupling fluxes `(v_R^1, v_R^2, v_L^3)` of a 2-to-1 junction
/// with right-of-way parameter `beta` for incoming edge 1.
pub fn flowmax_riemann_2to1(
    u0: [f64; 3],
    beta: f64,
    fluxes: [&FluxFunction; 3],
) -> Result<[f64; 3]> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Config(format!(
            "right-of-way parameter must lie in [0, 1], got {beta}"
        )));
    }
    let d1 = demand(fluxes[0], u0[0])?;
    let d2 = demand(fluxes[1], u0[1])?;
    let s3 = supply(fluxes[2], u0[2])?;
    if d1 + d2 <= s3 {
        return Ok([d1, d2, d1 + d2]);
    }
    let (mut q1, mut q2) = (beta * s3, (1.0 - beta) * s3);
    if q1 > d1 {
        q1 = d1;
        q2 = s3 - d1;
    } else if q2 > d2 {
        q2 = d2;
        q1 = s3 - d2;
    }
    Ok([q1, q2, q1 + q2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{BoundaryCondition, Grid};
    use approx::assert_relative_eq;

    fn star(
        n_minus: usize,
        n_plus: usize,
        lambdas: &[f64],
        conditions: Option<ConditionSet>,
    ) -> Network {
        let mut b = Network::builder(Grid::unit(4).unwrap());
        for k in 0..n_minus {
            b = b.incoming(
                FluxFunction::lwr(1.0),
                lambdas[k],
                BoundaryCondition::ZeroFlux,
            );
        }
        for k in 0..n_plus {
            b = b.outgoing(
                FluxFunction::lwr(1.2),
                lambdas[n_minus + k],
                BoundaryCondition::HomogeneousNeumann,
            );
        }
        if let Some(c) = conditions {
            b = b.conditions(c);
        }
        b.build().unwrap()
    }

    #[test]
    fn one_to_one_continuity() {
        let t = CouplingTraces::new(vec![0.3, 0.3], vec![0.7, 0.7]);
        let c = solve_coupling_1to1(&t, 1.5, 1.5);
        for k in 0..2 {
            assert_relative_eq!(c.u[k], 0.3, epsilon = 1e-15);
            assert_relative_eq!(c.v[k], 0.7, epsilon = 1e-15);
        }
    }

    #[test]
    fn one_to_one_examples() {
        let t = CouplingTraces::new(vec![1.0, 0.0], vec![0.0, 0.0]);
        let c = solve_coupling_1to1(&t, 1.0, 1.0);
        assert_relative_eq!(c.u[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(c.u[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(c.v[0], 0.5, epsilon = 1e-15);

        let c = solve_coupling_1to1(&t, 1.0, 2.0);
        assert_relative_eq!(c.u[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(c.u[1], 1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(c.v[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(c.v[1], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(c.u[0], 4.0 * c.u[1], epsilon = 1e-15);
    }

    #[test]
    fn equal_speed_formulas_match_simplified_form() {
        let t = CouplingTraces::new(vec![0.2, 0.9], vec![0.1, -0.4]);
        let lam = 1.7;
        let c = solve_coupling_1to1(&t, lam, lam);
        let u = 0.5 * (0.2 + 0.9) + (0.1 + 0.4) / (2.0 * lam);
        let v = 0.5 * (0.1 - 0.4) + 0.5 * lam * (0.2 - 0.9);
        assert_relative_eq!(c.u[0], u, epsilon = 1e-15);
        assert_relative_eq!(c.u[1], u, epsilon = 1e-15);
        assert_relative_eq!(c.v[0], v, epsilon = 1e-15);
    }

    #[test]
    fn two_edge_matrix_layout() {
        let net = star(1, 1, &[1.5, 2.0], None);
        let t = CouplingTraces::new(vec![0.1, 0.2], vec![0.3, 0.4]);
        let sys = assemble_coupling_system(&t, &net, &[]).unwrap();
        assert_eq!(sys.matrix.row(0), &[-1.5, 2.0]);
        assert_eq!(sys.matrix.row(1), &[2.25, 4.0]);
        assert_relative_eq!(sys.rhs[0], 0.3 - 0.4, epsilon = 1e-15);
        assert_relative_eq!(sys.rhs[1], 2.25 * 0.1 - 4.0 * 0.2, epsilon = 1e-15);
    }

    #[test]
    fn incoming_proportional_rows() {
        let t = CouplingTraces::new(vec![0.0; 3], vec![0.2, 0.1, 0.0]);
        let rows = build_incoming_proportional(&t, 2, 0.0);
        assert_eq!(rows.len(), 1);
        assert_relative_eq!(rows[0].beta[0], 0.1);
        assert_relative_eq!(rows[0].beta[1], -0.2);
        assert_eq!(rows[0].beta[2], 0.0);
        assert_eq!(rows[0].rhs, 0.0);

        let z = CouplingTraces::new(vec![0.0; 3], vec![0.0; 3]);
        let rows = build_incoming_proportional(&z, 2, 1e-12);
        assert_eq!(rows[0].beta[0], 1e-12);
        assert_eq!(rows[0].beta[1], 0.0);
        assert_eq!(rows[0].rhs, 0.0);

        let one = CouplingTraces::new(vec![0.0; 2], vec![0.3, 0.1]);
        assert!(build_incoming_proportional(&one, 1, 1e-12).is_empty());
    }

    #[test]
    fn outgoing_distribution_rows() {
        let alpha = RateMatrix::new(vec![vec![0.25, 0.75]]).unwrap();
        let rows = build_outgoing_distribution(&alpha).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].beta, vec![0.25, -1.0, 0.0]);
        assert!(RateMatrix::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(RateMatrix::new(vec![vec![-0.5, 1.5]]).is_err());
        let single = RateMatrix::new(vec![vec![1.0], vec![1.0]]).unwrap();
        assert!(build_outgoing_distribution(&single).unwrap().is_empty());
    }

    #[test]
    fn zero_incoming_traces_stay_regular() {
        let net = star(2, 1, &[1.0, 1.0, 1.0], None);
        let t = CouplingTraces::new(vec![0.0, 0.0, 0.4], vec![0.0, 0.0, 0.4 * (1.0 - 0.4 / 1.2)]);
        let c = solve_coupling_network(&t, &net).unwrap();
        assert!(c.v[0].abs() < 1e-9, "v_R^1 = {}", c.v[0]);
    }

    #[test]
    fn one_to_two_distribution() {
        let half = ConditionSet::new(vec![ConditionRule::OutgoingDistribution(
            RateMatrix::new(vec![vec![0.5, 0.5]]).unwrap(),
        )]);
        let net = star(1, 2, &[1.0, 1.0, 1.0], Some(half));
        let t = CouplingTraces::new(vec![0.4, 0.1, 0.2], vec![0.24, 0.09, 0.16]);
        let c = solve_coupling_network(&t, &net).unwrap();
        assert_relative_eq!(c.v[1], 0.5 * c.v[0], epsilon = 1e-14);
        assert_relative_eq!(c.v[2], 0.5 * c.v[0], epsilon = 1e-14);

        let all_first = ConditionSet::new(vec![ConditionRule::OutgoingDistribution(
            RateMatrix::new(vec![vec![1.0, 0.0]]).unwrap(),
        )]);
        let net = star(1, 2, &[1.0, 1.0, 1.0], Some(all_first));
        let c = solve_coupling_network(&t, &net).unwrap();
        assert!(c.v[2].abs() < 1e-14);
    }

    #[test]
    fn dependent_rows_are_reported() {
        // beta_1 = beta_2 makes the condition row a multiple of the first row
        // up to the sign pattern; with equal speeds this is rank deficient.
        let rows = vec![ConditionRow {
            beta: vec![1.0, 1.0, 1.0],
            rhs: 0.0,
        }];
        let custom = ConditionSet::new(vec![ConditionRule::CustomRows(rows)]);
        let net = star(2, 1, &[1.0, 1.0, 1.0], Some(custom));
        let t = CouplingTraces::new(vec![0.1, 0.2, 0.3], vec![0.09, 0.16, 0.2]);
        let err = solve_coupling_network(&t, &net).unwrap_err();
        assert_eq!(err, Error::SingularCoupling { rows: vec![2] });
    }

    #[test]
    fn demand_and_supply() {
        let f1 = FluxFunction::lwr(1.0);
        let f3 = FluxFunction::lwr(1.2);
        assert_relative_eq!(demand(&f1, 0.07).unwrap(), 0.0651, epsilon = 1e-15);
        assert_relative_eq!(demand(&f1, 0.6).unwrap(), 0.25, epsilon = 1e-15);
        assert_relative_eq!(supply(&f3, 0.35).unwrap(), 0.3, epsilon = 1e-15);
        assert_relative_eq!(
            supply(&f3, 0.9).unwrap(),
            0.9 * (1.0 - 0.75),
            epsilon = 1e-15
        );
        assert!(matches!(
            demand(&FluxFunction::Burgers, 0.1),
            Err(Error::NotUnimodal(_))
        ));
    }

    #[test]
    fn flowmax_cases() {
        let f = FluxFunction::lwr(1.0);
        let g = FluxFunction::lwr(1.2);
        let fl = [&f, &f, &g];
        let free = flowmax_riemann_2to1([0.07, 0.15, 0.2], 0.5, fl).unwrap();
        assert_relative_eq!(free[0], 0.0651, epsilon = 1e-15);
        assert_relative_eq!(free[1], 0.1275, epsilon = 1e-15);
        assert_relative_eq!(free[2], 0.1926, epsilon = 1e-15);

        let jam = flowmax_riemann_2to1([0.6, 0.35, 0.35], 0.5, fl).unwrap();
        assert_relative_eq!(jam[0], 0.15, epsilon = 1e-15);
        assert_relative_eq!(jam[1], 0.15, epsilon = 1e-15);
        assert_relative_eq!(jam[2], 0.3, epsilon = 1e-15);

        let clamp = flowmax_riemann_2to1([0.6, 0.35, 0.35], 0.0, fl).unwrap();
        assert_relative_eq!(clamp[1], 0.2275, epsilon = 1e-15);
        assert_relative_eq!(clamp[0], 0.0725, epsilon = 1e-15);
        assert_eq!(clamp[0] + clamp[1], clamp[2]);
    }
}
