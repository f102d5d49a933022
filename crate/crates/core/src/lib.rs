//! Stable representations of graphs with inner and outer vertices on the
//! plane, a flat torus, the sphere and the hemisphere, and jamming checks for
//! the corresponding disk packings.

pub mod corpus;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod io;
pub(crate) mod lp;
pub mod mcenter;
pub(crate) mod motion;
pub mod render;
pub mod solver;
pub mod surface;
pub mod validation;

pub use error::{Error, Result};
