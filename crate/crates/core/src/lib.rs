//! Simulation and verification toolkit for a nonlinear axially moving
//! string with viscous and Kelvin-Voigt damping.

pub mod analysis;
pub mod cli;
pub mod discretization;
pub mod error;
pub mod integrator;
pub mod model;

pub use error::{Error, Result};
