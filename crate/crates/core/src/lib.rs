//! Phases picked up by neutral dipoles around time-varying solenoids and
//! electric flux tubes in 2+1 dimensions: field sources, line-integral
//! phases, a lattice Dirac solver and the interference experiments built on
//! them.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod algebra;
pub mod cli;
pub mod config;
pub mod dirac;
pub mod error;
pub mod experiments;
pub mod fields;
pub mod output;
pub mod phases;
pub mod quadrature;

pub use error::{Error, Result};
pub use num_complex::Complex64;
