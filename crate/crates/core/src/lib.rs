//! Weighted regular trees, their Cantor boundaries, dyadic Besov energies,
//! Newtonian norms, and trace/extension operators at finite depth.

pub mod boundary_space;
pub mod error;
pub mod experiments;
pub mod extension_ops;
pub mod families;
pub mod io;
pub mod measures;
pub mod params;
pub mod quadrature;
pub mod tree_functions;
pub mod tree_model;

pub use error::{Error, Result};
pub use params::SpaceParams;
pub use tree_model::{EdgeRef, VertexPath};
