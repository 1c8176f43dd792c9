//! Chain recurrence of one-parameter interval map families.
//!
//! The crate is `no_std` with `alloc`. It covers the numerical core:
//! polynomial map families, box-graph outer approximations of the chain
//! recurrent set, homoclinic tangency classification and explosion
//! detection along a parameter sweep. File formats, configuration and the
//! command line live in the `chainrec` crate.

#![no_std]

extern crate alloc;

pub mod chain_graph;
pub mod corpus;
mod error;
pub mod explosion_scan;
pub mod homoclinic;
pub mod map_model;
mod num;
mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;
