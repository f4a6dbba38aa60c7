//! Simulator for a one-dimensional thermoviscoelastic Kelvin-Voigt system
//! and a harness that evaluates the a-priori estimates of its global
//! existence theory on computed trajectories.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimates;
pub mod grid;
pub mod mms;
pub mod model;
pub mod scenario;
pub mod solver;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{Field, Grid1D};
pub use model::{CoefficientSet, InitialData};
pub use solver::{run, SimConfig, State, Trajectory};
