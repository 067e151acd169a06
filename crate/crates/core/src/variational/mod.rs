//! Discrete variational problem on a truncated line.

pub mod functional;
pub mod grid;
pub mod solver;
pub mod tails;

pub use functional::{g_eval, j_eval, nehari_project, norm_sq, Discretization};
pub use grid::{Grid, GridFunction};
pub use solver::{solve_ground_state, GroundStateResult, SolverOptions};
pub use tails::{d_coefficients, envelope_check, EnvelopeCheck};
