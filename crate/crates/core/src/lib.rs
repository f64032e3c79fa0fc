// Index loops over matrices address (i, j) pairs directly.
#![allow(clippy::needless_range_loop)]

pub mod calculus;
pub mod cli;
pub mod cohomology;
pub mod dirac;
pub mod error;
pub mod fixtures;
pub mod flows;
pub mod linalg;
pub mod morita;
pub mod poisson;
pub mod report;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
