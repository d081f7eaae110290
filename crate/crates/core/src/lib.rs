//! Central schemes for scalar conservation laws on star-shaped networks,
//! built on the relaxation system and its coupling conditions at the junction.

pub mod analysis;
pub mod coupling;
pub mod error;
pub mod linalg;
pub mod network;
pub mod relaxation;
pub mod schemes;

pub use error::{Error, Result};
pub use network::{
    BoundaryCondition, CellField, CustomFlux, Edge, FluxFunction, Grid, Network, NetworkBuilder,
    Orientation,
};
