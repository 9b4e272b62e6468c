//! Frame potentials of point configurations on spheres, their spectral lower
//! and upper bounds, Riesz energies, Thomson-problem minimization, spherical
//! Voronoi diagnostics and lattice observation windows.

// `!(x > 0.0)` style guards are kept on purpose: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod frames;
pub mod lattices;
pub mod optimize;
mod reduce;
pub mod riesz;
pub mod solids;
pub mod specfun;
pub mod voronoi;

pub use config::{load_configuration, perturb, sample_uniform, save_configuration, Configuration, Weights};
pub use error::{Error, Result};
