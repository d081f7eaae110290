use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "CFL condition violated on edge {edge}: lambda*dt = {lambda_dt:e} exceeds {limit:e} (dx = {dx:e})"
    )]
    Cfl {
        edge: usize,
        lambda_dt: f64,
        limit: f64,
        dx: f64,
    },

    /// `rows` are zero-based indices into the assembled coupling matrix; rows 0 and 1
    /// are the Kirchhoff rows, row `2 + l` is additional condition `l`.
    #[error("singular coupling system: rows {rows:?} are linearly dependent on earlier rows")]
    SingularCoupling { rows: Vec<usize> },

    #[error("non-finite value at step {step} on edge {edge}, cell {cell}")]
    NonFinite {
        step: usize,
        edge: usize,
        cell: usize,
    },

    #[error("node flux of edge {edge} deviates from the coupling flux by {deviation:e}")]
    NodeFluxMismatch { edge: usize, deviation: f64 },

    #[error("flux `{0}` has no unique interior maximum")]
    NotUnimodal(String),

    #[error("t = {t} is past the shock formation time {shock_time}")]
    PastShockTime { t: f64, shock_time: f64 },
}
