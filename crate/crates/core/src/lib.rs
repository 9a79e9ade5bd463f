//! Random meandric systems: samplers, loop statistics, infinite-volume
//! windows, percolation view, planar-map metrics and exact small-size checks.

pub mod arcs;
pub mod error;
pub mod infinite;
pub mod loops;
pub mod map;
pub mod output;
pub mod mcrt;
pub mod percolation;
pub mod pipeline;
pub mod rng;
pub mod sample;
pub mod stats;
pub mod system;
pub mod tutte;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
