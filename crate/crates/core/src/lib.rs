//! Convex roofs of polynomial entanglement measures on rank-2 multiqubit
//! states, computed from the roots of the measure on the state's Bloch
//! sphere.

pub mod atlas;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod measures;
pub mod oracle;
pub mod quantum;
pub mod roof;
pub mod sample;

pub use error::{Error, Result};
