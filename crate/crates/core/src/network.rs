//! Star-network topology, edge fluxes, grids and cell fields.
//!
//! A network has a single junction at `x = 0`. Incoming edges are parameterized
//! by `(-L, 0)` and outgoing edges by `(0, L)`, with the default edge length
//! `L = 1`. Incoming edges are always stored before outgoing edges, so edge
//! `k` (zero-based) is incoming iff `k < n_minus`.

use std::fmt;
use std::sync::Arc;

use crate::coupling::ConditionSet;
use crate::error::{Error, Result};

/// Number of ghost cells stored at each end of an edge.
pub const GHOSTS: usize = 2;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-provided flux together with its derivative.
#[derive(Clone)]
pub struct CustomFlux {
    pub name: String,
    eval: ScalarFn,
    derivative: ScalarFn,
}

impl CustomFlux {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            derivative: Arc::new(derivative),
        }
    }
}

impl fmt::Debug for CustomFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFlux")
            .field("name", &self.name)
            .finish()
    }
}

/// Flux function `f` of a scalar conservation law `u_t + f(u)_x = 0`.
#[derive(Debug, Clone)]
pub enum FluxFunction {
    /// `f(u) = u^2 / 2`
    Burgers,
    /// Lighthill-Whitham-Richards traffic flux `f(u) = u (1 - u / u_max)`.
    Lwr {
        u_max: f64,
    },
    /// Two-phase flux `f(u) = u^2 / (u^2 + (1 - u)^2 / 2)`.
    BuckleyLeverett,
    Custom(CustomFlux),
}

impl FluxFunction {
    pub fn lwr(u_max: f64) -> Self {
        FluxFunction::Lwr { u_max }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            FluxFunction::Burgers => 0.5 * u * u,
            FluxFunction::Lwr { u_max } => u * (1.0 - u / u_max),
            FluxFunction::BuckleyLeverett => {
                let w = u * u;
                let o = 0.5 * (1.0 - u) * (1.0 - u);
                w / (w + o)
            }
            FluxFunction::Custom(c) => (c.eval)(u),
        }
    }

    #[inline]
    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            FluxFunction::Burgers => u,
            FluxFunction::Lwr { u_max } => 1.0 - 2.0 * u / u_max,
            FluxFunction::BuckleyLeverett => {
                // d/du [u^2 / D] with D = u^2 + (1-u)^2/2 and D' = 3u - 1
                let d = u * u + 0.5 * (1.0 - u) * (1.0 - u);
                (2.0 * u * d - u * u * (3.0 * u - 1.0)) / (d * d)
            }
            FluxFunction::Custom(c) => (c.derivative)(u),
        }
    }

    /// A density range on which the flux is physically meaningful.
    pub fn natural_range(&self) -> (f64, f64) {
        match self {
            FluxFunction::Burgers => (-1.0, 1.0),
            FluxFunction::Lwr { u_max } => (0.0, *u_max),
            FluxFunction::BuckleyLeverett => (0.0, 1.0),
            FluxFunction::Custom(_) => (-1.0, 1.0),
        }
    }

    /// Largest relative deviation between `derivative` and a central finite
    /// difference of `eval` with step `h` over the given points.
    pub fn derivative_mismatch(&self, points: &[f64], h: f64) -> f64 {
        points
            .iter()
            .map(|&u| {
                let fd = (self.eval(u + h) - self.eval(u - h)) / (2.0 * h);
                let exact = self.derivative(u);
                (fd - exact).abs() / exact.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn name(&self) -> String {
        match self {
            FluxFunction::Burgers => "burgers".into(),
            FluxFunction::Lwr { u_max } => format!("lwr(u_max={u_max})"),
            FluxFunction::BuckleyLeverett => "buckley-leverett".into(),
            FluxFunction::Custom(c) => c.name.clone(),
        }
    }
}

/// Maximum of `|f'(u)|` over `n_samples` uniformly spaced points of `[u_lo, u_hi]`.
pub fn max_wave_speed(flux: &FluxFunction, u_lo: f64, u_hi: f64, n_samples: usize) -> f64 {
    assert!(u_lo <= u_hi, "empty sampling interval");
    assert!(n_samples >= 2, "need at least two samples");
    let step = (u_hi - u_lo) / (n_samples - 1) as f64;
    (0..n_samples)
        .map(|i| {
            let u = if i + 1 == n_samples {
                u_hi
            } else {
                u_lo + i as f64 * step
            };
            flux.derivative(u).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Incoming,
    Outgoing,
}

#[derive(Debug, Clone)]
pub struct Edge {
    /// One-based edge index.
    pub index: usize,
    pub orientation: Orientation,
    pub flux: FluxFunction,
    /// Relaxation speed, strictly positive.
    pub lambda: f64,
}

impl Edge {
    /// `-1` for incoming edges, `+1` for outgoing edges.
    pub fn sign(&self) -> f64 {
        match self.orientation {
            Orientation::Incoming => -1.0,
            Orientation::Outgoing => 1.0,
        }
    }

    pub fn is_incoming(&self) -> bool {
        self.orientation == Orientation::Incoming
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Identifies the two outer ends of a 1-to-1 network.
    Periodic,
    /// No mass crosses the outer face.
    ZeroFlux,
    /// Ghost cells copy the nearest interior value.
    HomogeneousNeumann,
}

/// Uniform grid shared by all edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub m: usize,
    pub length: f64,
    pub dx: f64,
}

impl Grid {
    pub fn new(m: usize, length: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config(format!(
                "edges need at least 2 cells, got m = {m}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("invalid edge length {length}")));
        }
        Ok(Self {
            m,
            length,
            dx: length / m as f64,
        })
    }

    pub fn unit(m: usize) -> Result<Self> {
        Self::new(m, 1.0)
    }

    /// Cell centers of an edge with the given orientation.
    pub fn centers(&self, orientation: Orientation) -> Vec<f64> {
        let start = match orientation {
            Orientation::Incoming => -self.length,
            Orientation::Outgoing => 0.0,
        };
        (0..self.m)
            .map(|j| start + (j as f64 + 0.5) * self.dx)
            .collect()
    }

    /// Left and right end of cell `j`.
    pub fn cell_bounds(&self, orientation: Orientation, j: usize) -> (f64, f64) {
        let start = match orientation {
            Orientation::Incoming => -self.length,
            Orientation::Outgoing => 0.0,
        };
        (start + j as f64 * self.dx, start + (j + 1) as f64 * self.dx)
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    edges: Vec<Edge>,
    n_minus: usize,
    n_plus: usize,
    grid: Grid,
    boundary: Vec<BoundaryCondition>,
    conditions: ConditionSet,
}

impl Network {
    pub fn builder(grid: Grid) -> NetworkBuilder {
        NetworkBuilder {
            grid,
            incoming: Vec::new(),
            outgoing: Vec::new(),
            conditions: None,
        }
    }

    /// 1-to-1 network with the same boundary condition on both outer ends.
    pub fn one_to_one(
        grid: Grid,
        flux_in: FluxFunction,
        lambda_in: f64,
        flux_out: FluxFunction,
        lambda_out: f64,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        Network::builder(grid)
            .incoming(flux_in, lambda_in, bc)
            .outgoing(flux_out, lambda_out, bc)
            .build()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge {
        &self.edges[k]
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn boundary(&self, k: usize) -> BoundaryCondition {
        self.boundary[k]
    }

    pub fn conditions(&self) -> &ConditionSet {
        &self.conditions
    }

    pub fn lambda_max(&self) -> f64 {
        self.edges.iter().map(|e| e.lambda).fold(0.0, f64::max)
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary.contains(&BoundaryCondition::Periodic)
    }

    /// Cell centers of edge `k`.
    pub fn centers(&self, k: usize) -> Vec<f64> {
        self.grid.centers(self.edges[k].orientation)
    }

    /// Replaces the junction condition set.
    pub fn with_conditions(mut self, conditions: ConditionSet) -> Self {
        self.conditions = conditions;
        self
    }
}

pub struct NetworkBuilder {
    grid: Grid,
    incoming: Vec<(FluxFunction, f64, BoundaryCondition)>,
    outgoing: Vec<(FluxFunction, f64, BoundaryCondition)>,
    conditions: Option<ConditionSet>,
}

impl NetworkBuilder {
    pub fn incoming(mut self, flux: FluxFunction, lambda: f64, bc: BoundaryCondition) -> Self {
        self.incoming.push((flux, lambda, bc));
        self
    }

    pub fn outgoing(mut self, flux: FluxFunction, lambda: f64, bc: BoundaryCondition) -> Self {
        self.outgoing.push((flux, lambda, bc));
        self
    }

    pub fn conditions(mut self, conditions: ConditionSet) -> Self {
        self.conditions = Some(conditions);
        self
    }

    pub fn build(self) -> Result<Network> {
        let n_minus = self.incoming.len();
        let n_plus = self.outgoing.len();
        if n_minus == 0 || n_plus == 0 {
            return Err(Error::Config(format!(
                "a star network needs at least one incoming and one outgoing edge (got {n_minus} and {n_plus})"
            )));
        }
        let n = n_minus + n_plus;
        let mut edges = Vec::with_capacity(n);
        let mut boundary = Vec::with_capacity(n);
        let tagged = self
            .incoming
            .into_iter()
            .map(|e| (Orientation::Incoming, e))
            .chain(
                self.outgoing
                    .into_iter()
                    .map(|e| (Orientation::Outgoing, e)),
            );
        for (i, (orientation, (flux, lambda, bc))) in tagged.enumerate() {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::Config(format!(
                    "edge {}: relaxation speed must be positive, got {lambda}",
                    i + 1
                )));
            }
            edges.push(Edge {
                index: i + 1,
                orientation,
                flux,
                lambda,
            });
            boundary.push(bc);
        }
        let periodic = boundary
            .iter()
            .filter(|&&b| b == BoundaryCondition::Periodic)
            .count();
        if periodic > 0 && (n != 2 || periodic != 2) {
            return Err(Error::Config(
                "periodic boundaries are only valid on both ends of a 1-to-1 network".into(),
            ));
        }
        let conditions = self
            .conditions
            .unwrap_or_else(|| ConditionSet::default_for(n_minus, n_plus));
        conditions.validate(n_minus, n_plus)?;
        Ok(Network {
            edges,
            n_minus,
            n_plus,
            grid: self.grid,
            boundary,
            conditions,
        })
    }
}

/// Cell averages of `u` on every edge, stored left to right in `x` with
/// [`GHOSTS`] ghost cells at both ends.
///
/// For incoming edges the junction is at the right end, for outgoing edges
/// at the left end. Junction-side ghosts are never read by the schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    m: usize,
    data: Vec<Vec<f64>>,
}

impl CellField {
    pub fn zeros(network: &Network) -> Self {
        let m = network.grid().m;
        Self {
            m,
            data: vec![vec![0.0; m + 2 * GHOSTS]; network.len()],
        }
    }

    /// Builds a field from interior values, one vector per edge.
    pub fn from_interior(network: &Network, values: Vec<Vec<f64>>) -> Result<Self> {
        let m = network.grid().m;
        if values.len() != network.len() {
            return Err(Error::Config(format!(
                "expected values for {} edges, got {}",
                network.len(),
                values.len()
            )));
        }
        let mut data = Vec::with_capacity(values.len());
        for (k, v) in values.into_iter().enumerate() {
            if v.len() != m {
                return Err(Error::Config(format!(
                    "edge {}: expected {m} cells, got {}",
                    k + 1,
                    v.len()
                )));
            }
            let mut row = vec![0.0; m + 2 * GHOSTS];
            row[GHOSTS..GHOSTS + m].copy_from_slice(&v);
            data.push(row);
        }
        Ok(Self { m, data })
    }

    /// Samples `profile(k, x)` at cell centers.
    pub fn from_point_values(network: &Network, profile: impl Fn(usize, f64) -> f64) -> Self {
        let values = (0..network.len())
            .map(|k| {
                network
                    .centers(k)
                    .into_iter()
                    .map(|x| profile(k, x))
                    .collect()
            })
            .collect();
        Self::from_interior(network, values).expect("sizes match by construction")
    }

    /// Cell averages of `profile(k, x)` by 5-point Gauss-Legendre quadrature.
    pub fn from_cell_averages(network: &Network, profile: impl Fn(usize, f64) -> f64) -> Self {
        let grid = *network.grid();
        let values = (0..network.len())
            .map(|k| {
                let orientation = network.edge(k).orientation;
                (0..grid.m)
                    .map(|j| {
                        let (a, b) = grid.cell_bounds(orientation, j);
                        crate::analysis::gauss_average(|x| profile(k, x), a, b)
                    })
                    .collect()
            })
            .collect();
        Self::from_interior(network, values).expect("sizes match by construction")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_edges(&self) -> usize {
        self.data.len()
    }

    pub fn interior(&self, k: usize) -> &[f64] {
        &self.data[k][GHOSTS..GHOSTS + self.m]
    }

    pub fn interior_mut(&mut self, k: usize) -> &mut [f64] {
        let m = self.m;
        &mut self.data[k][GHOSTS..GHOSTS + m]
    }

    /// Interior values together with ghost cells.
    pub fn extended(&self, k: usize) -> &[f64] {
        &self.data[k]
    }

    /// Value next to the junction: the last cell of an incoming edge or the
    /// first cell of an outgoing edge.
    pub fn junction_cell(&self, network: &Network, k: usize) -> f64 {
        let row = self.interior(k);
        if network.edge(k).is_incoming() {
            row[self.m - 1]
        } else {
            row[0]
        }
    }

    /// Outer ghosts (left pair for incoming, right pair for outgoing).
    pub fn outer_ghosts(&self, network: &Network, k: usize) -> [f64; GHOSTS] {
        let row = &self.data[k];
        if network.edge(k).is_incoming() {
            [row[0], row[1]]
        } else {
            [row[self.m + GHOSTS], row[self.m + GHOSTS + 1]]
        }
    }

    pub fn is_finite(&self) -> bool {
        (0..self.n_edges()).all(|k| self.interior(k).iter().all(|v| v.is_finite()))
    }

    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        (0..self.n_edges()).find_map(|k| {
            self.interior(k)
                .iter()
                .position(|v| !v.is_finite())
                .map(|j| (k, j))
        })
    }

    /// Fills all ghost cells according to the outer boundary conditions.
    ///
    /// Zero-flux ends get mirrored ghosts; they only feed slope limiters since
    /// the schemes set the outer face flux to zero directly. Junction-side
    /// ghosts copy the junction cell.
    pub fn apply_outer_boundary(&mut self, network: &Network) -> Result<()> {
        let m = self.m;
        if network.is_periodic() && network.len() != 2 {
            return Err(Error::Config(
                "periodic boundaries need a 1-to-1 network".into(),
            ));
        }
        for k in 0..network.len() {
            let incoming = network.edge(k).is_incoming();
            let bc = network.boundary(k);
            let ghosts = match bc {
                BoundaryCondition::Periodic => {
                    let other = self.interior(1 - k);
                    if incoming {
                        [other[m - 2], other[m - 1]]
                    } else {
                        [other[0], other[1]]
                    }
                }
                BoundaryCondition::HomogeneousNeumann | BoundaryCondition::ZeroFlux => {
                    let own = self.interior(k);
                    if incoming {
                        [own[0], own[0]]
                    } else {
                        [own[m - 1], own[m - 1]]
                    }
                }
            };
            let row = &mut self.data[k];
            if incoming {
                row[0] = ghosts[0];
                row[1] = ghosts[1];
                let last = row[GHOSTS + m - 1];
                row[GHOSTS + m] = last;
                row[GHOSTS + m + 1] = last;
            } else {
                row[m + GHOSTS] = ghosts[0];
                row[m + GHOSTS + 1] = ghosts[1];
                let first = row[GHOSTS];
                row[0] = first;
                row[1] = first;
            }
        }
        Ok(())
    }

    /// Total mass `sum_k sum_j dx u_j`.
    pub fn total_mass(&self, dx: f64) -> f64 {
        (0..self.n_edges()).map(|k| self.edge_mass(k, dx)).sum()
    }

    pub fn edge_mass(&self, k: usize, dx: f64) -> f64 {
        self.interior(k).iter().sum::<f64>() * dx
    }
}
