//! Stationary iterative linear solvers built from ordered splittings of the
//! fixed-point iteration matrix.
//!
//! The library covers the splitting algebra (masks, the refinement partial
//! order, essentiality and maximality), a catalog of named methods from the
//! plain fixed-point iteration through triangular, block-triangular and
//! alternating column/row schemes, the d-stage sweep engine with its
//! two-step form, spectral-radius analysis of the block iteration
//! operators, seeded matrix generators, and a reproducible experiment
//! harness. The `splitkit` binary exposes all of it on the command line.

// Indexed loops over matrix/vector dimensions are the domain idiom here.
#![allow(clippy::needless_range_loop)]

pub mod bench;
pub mod catalog;
pub mod cli;
pub mod engine;
pub mod error;
pub mod genmat;
pub mod linalg;
pub mod spectral;
pub mod splitting;

pub use error::{Error, Result};
