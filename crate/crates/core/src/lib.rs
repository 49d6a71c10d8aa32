//! Finite-difference and multiscale operator-splitting solvers for the 1D
//! time-dependent Schrödinger equation
//!
//! ```text
//! psi_t = i eps psi_xx - (i / eps) V(x) psi,   x in (0, 1),   psi = 0 on the boundary
//! ```
//!
//! - [`model`]: grids, wave fields, potentials and configurations
//! - [`operators`]: the potential propagator, implicit matrices and the Thomas solver
//! - [`splitting`]: the unsplit scheme and all splitting / multiscale steppers
//! - [`analysis`]: error metric, observed orders and benchmark tables
//! - [`cli`]: the `multisplit` command-line front end

pub mod analysis;
pub mod cli;
pub mod error;
pub mod model;
pub mod operators;
pub mod splitting;

pub use error::{Error, Result};
pub use model::{
    build_grid, eval_potential, init_packet, init_scaled, ComplexScalar, Grid1D, MethodId,
    PhysicalConfig, PotentialSpec, SolverConfig, WaveField,
};
pub use splitting::{run, run_with, RunOptions, RunResult, RunWarning, Snapshots, Stepper};
