//! Error norms, convergence orders, total variation, mass accounting and the
//! smooth Burgers reference solution.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::network::{CellField, Network};

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    128.0 / 225.0,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Mean of `f` over `[a, b]` by 5-point Gauss-Legendre quadrature.
pub fn gauss_average(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    0.5 * GAUSS_NODES
        .iter()
        .zip(GAUSS_WEIGHTS)
        .map(|(&x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// `sum dx |a_j - b_j|`.
pub fn l1_distance(a: &[f64], b: &[f64], dx: f64) -> f64 {
    assert_eq!(a.len(), b.len(), "arrays differ in length");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * dx
}

/// `max |a_j - b_j|`.
pub fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "arrays differ in length");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Cell averages of `reference(k, x)` on every edge.
pub fn reference_averages(network: &Network, reference: impl Fn(usize, f64) -> f64) -> CellField {
    CellField::from_cell_averages(network, reference)
}

/// L1 error over all edges against another field on the same network.
pub fn l1_error(numeric: &CellField, reference: &CellField, dx: f64) -> f64 {
    (0..numeric.n_edges())
        .map(|k| l1_distance(numeric.interior(k), reference.interior(k), dx))
        .sum()
}

/// Maximum cell error over all edges.
pub fn linf_error(numeric: &CellField, reference: &CellField) -> f64 {
    (0..numeric.n_edges())
        .map(|k| linf_distance(numeric.interior(k), reference.interior(k)))
        .fold(0.0, f64::max)
}

/// Experimental order `log2(e_coarse / e_fine)`; NaN unless both are positive.
pub fn eoc(e_coarse: f64, e_fine: f64) -> f64 {
    if e_coarse > 0.0 && e_fine > 0.0 {
        (e_coarse / e_fine).log2()
    } else {
        f64::NAN
    }
}

/// One resolution of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    /// `1 / dx`.
    pub inv_dx: usize,
    pub l1: f64,
    pub linf: f64,
    /// Orders against the previous row; `None` for the coarsest row or when
    /// the resolutions do not differ by a factor of two.
    pub eoc_l1: Option<f64>,
    pub eoc_linf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub scheme: String,
    /// Human-readable time step policy, e.g. `CFL 0.49` or `dt 2e-6`.
    pub time_step: String,
    pub t_eval: f64,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    /// Builds rows from `(1/dx, l1, linf)` triples in increasing resolution.
    pub fn new(
        scheme: impl Into<String>,
        time_step: impl Into<String>,
        t_eval: f64,
        errors: &[(usize, f64, f64)],
    ) -> Self {
        let rows = errors
            .iter()
            .enumerate()
            .map(|(i, &(inv_dx, l1, linf))| {
                let prev = i
                    .checked_sub(1)
                    .map(|p| errors[p])
                    .filter(|p| 2 * p.0 == inv_dx);
                ErrorRow {
                    inv_dx,
                    l1,
                    linf,
                    eoc_l1: prev.map(|p| eoc(p.1, l1)),
                    eoc_linf: prev.map(|p| eoc(p.2, linf)),
                }
            })
            .collect();
        Self {
            scheme: scheme.into(),
            time_step: time_step.into(),
            t_eval,
            rows,
        }
    }
}

/// Initial data of the smooth Burgers test, `1/2 + sin(pi (x + 1)) / 2`.
pub fn burgers_initial(x: f64) -> f64 {
    0.5 + 0.5 * (PI * (x + 1.0)).sin()
}

/// First time at which characteristics of [`burgers_initial`] cross.
pub const BURGERS_SHOCK_TIME: f64 = 2.0 / PI;

/// Solves `u = u0(x - u t)` for `u` in `[lo, hi]` by bisection.
///
/// `lo` and `hi` must bound the range of `u0`; the solution is unique while
/// characteristics have not crossed.
pub fn characteristic_solution(u0: impl Fn(f64) -> f64, lo: f64, hi: f64, x: f64, t: f64) -> f64 {
    let g = |u: f64| u - u0(x - u * t);
    let (mut a, mut b) = (lo, hi);
    if g(a) >= 0.0 {
        return a;
    }
    if g(b) <= 0.0 {
        return b;
    }
    while b - a > 1e-15 * (1.0 + a.abs()) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Exact smooth solution of the periodic Burgers test before shock formation.
pub fn burgers_reference(x: f64, t: f64) -> Result<f64> {
    if t >= BURGERS_SHOCK_TIME {
        return Err(Error::PastShockTime {
            t,
            shock_time: BURGERS_SHOCK_TIME,
        });
    }
    Ok(characteristic_solution(burgers_initial, 0.0, 1.0, x, t))
}

/// Total variation summed over edges.
///
/// The jump across the junction is counted for 1-to-1 networks whose edges
/// share flux and relaxation speed, where the junction is a regular interface.
/// On periodic networks the jump across the identified outer ends is counted
/// as well.
pub fn total_variation(field: &CellField, network: &Network) -> f64 {
    let mut tv: f64 = (0..field.n_edges())
        .map(|k| {
            field
                .interior(k)
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .sum::<f64>()
        })
        .sum();
    if network.len() == 2 {
        let (a, b) = (network.edge(0), network.edge(1));
        let (left, right) = (field.interior(0), field.interior(1));
        if a.flux.name() == b.flux.name() && a.lambda == b.lambda {
            tv += (right[0] - left[left.len() - 1]).abs();
        }
        if network.is_periodic() {
            tv += (left[0] - right[right.len() - 1]).abs();
        }
    }
    tv
}

/// Mass bookkeeping of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct MassBalance {
    pub edge_mass: Vec<f64>,
    pub total_mass: f64,
    /// Per-step `sum_in F - sum_out F`.
    pub node_residuals: Vec<f64>,
}

pub fn mass_and_balance(
    field: &CellField,
    network: &Network,
    node_flux_history: &[Vec<f64>],
) -> MassBalance {
    let dx = network.grid().dx;
    let edge_mass: Vec<f64> = (0..field.n_edges())
        .map(|k| field.edge_mass(k, dx))
        .collect();
    let node_residuals = node_flux_history
        .iter()
        .map(|fluxes| {
            fluxes
                .iter()
                .zip(network.edges())
                .map(|(f, e)| -e.sign() * f)
                .sum()
        })
        .collect();
    MassBalance {
        total_mass: edge_mass.iter().sum(),
        edge_mass,
        node_residuals,
    }
}
