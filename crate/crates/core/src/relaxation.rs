//! Relaxation system `u_t + v_x = 0`, `v_t + lambda^2 u_x = (f(u) - v) / eps`.

use crate::coupling::{solve_coupling_1to1, CouplingData, CouplingTraces};
use crate::error::{Error, Result};
use crate::network::{max_wave_speed, BoundaryCondition, CellField, Network};

/// Characteristic variables `w- = (v - lambda u) / 2`, `w+ = (v + lambda u) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPair {
    pub w_minus: f64,
    pub w_plus: f64,
}

pub fn to_characteristic(u: f64, v: f64, lambda: f64) -> CharPair {
    CharPair {
        w_minus: 0.5 * (v - lambda * u),
        w_plus: 0.5 * (v + lambda * u),
    }
}

pub fn from_characteristic(w: CharPair, lambda: f64) -> (f64, f64) {
    ((w.w_plus - w.w_minus) / lambda, w.w_plus + w.w_minus)
}

/// Wave family of a Lax curve through a base state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaxFamily {
    /// Left-going family; `v + lambda u` is constant along it.
    BackwardMinus,
    /// Right-going family; `v - lambda u` is constant along it.
    ForwardPlus,
}

pub fn lax_curve_point(
    base_u: f64,
    base_v: f64,
    sigma: f64,
    lambda: f64,
    family: LaxFamily,
) -> (f64, f64) {
    match family {
        LaxFamily::BackwardMinus => (base_u - sigma, base_v + sigma * lambda),
        LaxFamily::ForwardPlus => (base_u + sigma, base_v + sigma * lambda),
    }
}

/// Per edge: whether `|f_k'| <= lambda_k` on `[u_lo, u_hi]` (1001 samples).
pub fn check_subcharacteristic(network: &Network, u_lo: f64, u_hi: f64) -> Vec<bool> {
    network
        .edges()
        .iter()
        .map(|e| max_wave_speed(&e.flux, u_lo, u_hi, 1001) <= e.lambda)
        .collect()
}

/// Cell averages of `(u, v)` on a 1-to-1 network and the relaxation rate.
///
/// `epsilon = f64::INFINITY` switches the source term off.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxState {
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub epsilon: f64,
}

impl RelaxState {
    pub fn new(u: Vec<Vec<f64>>, v: Vec<Vec<f64>>, epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "relaxation rate must be positive, got {epsilon}"
            )));
        }
        if u.len() != v.len() || u.iter().zip(&v).any(|(a, b)| a.len() != b.len()) {
            return Err(Error::Config("u and v arrays differ in shape".into()));
        }
        Ok(Self { u, v, epsilon })
    }

    /// Equilibrium start `v = f_k(u)`.
    pub fn equilibrium(field: &CellField, network: &Network, epsilon: f64) -> Result<Self> {
        let u: Vec<Vec<f64>> = (0..network.len())
            .map(|k| field.interior(k).to_vec())
            .collect();
        let v = u
            .iter()
            .zip(network.edges())
            .map(|(row, e)| row.iter().map(|&x| e.flux.eval(x)).collect())
            .collect();
        Self::new(u, v, epsilon)
    }

    pub fn to_field(&self, network: &Network) -> Result<CellField> {
        CellField::from_interior(network, self.u.clone())
    }

    /// Junction traces `(u_{-1}, v_{-1})` and `(u_0, v_0)`.
    pub fn traces(&self) -> CouplingTraces {
        let last = self.u[0].len() - 1;
        CouplingTraces::new(
            vec![self.u[0][last], self.u[1][0]],
            vec![self.v[0][last], self.v[1][0]],
        )
    }
}

/// Coupling state of the relaxation system from the current traces.
pub fn relaxation_coupling(state: &RelaxState, network: &Network) -> CouplingData {
    solve_coupling_1to1(
        &state.traces(),
        network.edge(0).lambda,
        network.edge(1).lambda,
    )
}

/// One IMEX step on a 1-to-1 network: explicit upwind transport, then the
/// implicit source in closed form since `u^{n+1}` is already known.
pub fn imex_step_1to1(
    state: &RelaxState,
    network: &Network,
    dt: f64,
    coupling: &CouplingData,
) -> Result<RelaxState> {
    if network.len() != 2 {
        return Err(Error::Config(
            "the relaxation integrator needs a 1-to-1 network".into(),
        ));
    }
    let grid = network.grid();
    let (m, dx) = (grid.m, grid.dx);
    if state.u.len() != 2 || state.u.iter().any(|r| r.len() != m) {
        return Err(Error::Config(format!(
            "state must hold 2 edges of {m} cells"
        )));
    }
    for e in network.edges() {
        if e.lambda * dt > dx * (1.0 + 1e-12) {
            return Err(Error::Cfl {
                edge: e.index,
                lambda_dt: e.lambda * dt,
                limit: dx,
                dx,
            });
        }
    }

    // outer ghost (u, v) of each edge
    let mut outer = [(0.0, 0.0); 2];
    for k in 0..2 {
        outer[k] = match network.boundary(k) {
            BoundaryCondition::Periodic => {
                if k == 0 {
                    (state.u[1][m - 1], state.v[1][m - 1])
                } else {
                    (state.u[0][0], state.v[0][0])
                }
            }
            BoundaryCondition::HomogeneousNeumann => {
                let j = if k == 0 { 0 } else { m - 1 };
                (state.u[k][j], state.v[k][j])
            }
            BoundaryCondition::ZeroFlux => {
                return Err(Error::Config(
                    "zero-flux boundaries are not supported by the relaxation integrator".into(),
                ))
            }
        };
    }
    let junction = [
        (coupling.u[0], coupling.v[0]),
        (coupling.u[1], coupling.v[1]),
    ];

    let ratio = dt / (2.0 * dx);
    let rate = dt / state.epsilon;
    let mut next = state.clone();
    for k in 0..2 {
        let e = network.edge(k);
        let lam = e.lambda;
        let (u, v) = (&state.u[k], &state.v[k]);
        let (left_ghost, right_ghost) = if k == 0 {
            (outer[0], junction[0])
        } else {
            (junction[1], outer[1])
        };
        for j in 0..m {
            let (ul, vl) = if j == 0 {
                left_ghost
            } else {
                (u[j - 1], v[j - 1])
            };
            let (ur, vr) = if j + 1 == m {
                right_ghost
            } else {
                (u[j + 1], v[j + 1])
            };
            let u_new = u[j] - ratio * (vr - vl) + lam * ratio * (ur - 2.0 * u[j] + ul);
            let v_exp = v[j] - lam * lam * ratio * (ur - ul) + lam * ratio * (vr - 2.0 * v[j] + vl);
            next.u[k][j] = u_new;
            next.v[k][j] = if rate.is_finite() {
                (v_exp + rate * e.flux.eval(u_new)) / (1.0 + rate)
            } else {
                v_exp
            };
        }
    }
    Ok(next)
}

/// `n_steps` IMEX steps with fresh coupling data in every step.
pub fn imex_run_1to1(
    initial: &RelaxState,
    network: &Network,
    dt: f64,
    n_steps: usize,
) -> Result<RelaxState> {
    let mut state = initial.clone();
    for _ in 0..n_steps {
        let coupling = relaxation_coupling(&state, network);
        state = imex_step_1to1(&state, network, dt, &coupling)?;
    }
    Ok(state)
}
