//! Maximum interference of sensors on a line under the max-neighbor range
//! assignment.
//!
//! Each sensor broadcasts as far as its farther adjacent neighbor. The
//! interference at a sensor is the number of other sensors whose broadcast
//! interval covers it. For `n` uniform random sensors the maximum grows like
//! `sqrt(log n)`, while a chain with geometrically shrinking gaps reaches
//! `n - 2`. This crate computes both, plus the k-frame configurations
//! behind the lower bound and a seeded Monte Carlo harness.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod frames;
pub mod generators;
pub mod interference;
pub mod io;
pub mod model;
pub mod stats;

pub use error::{Error, Result};
pub use interference::{
    interference_fast, interference_naive, max_interference, InterferenceProfile,
};
pub use model::{Coordinate, GapSequence, PointSet};
