//! Finite-difference solver for the seller and buyer value functions
//! `F(tau, S, v)` under the physical drift.
//!
//! Time runs in `tau = T - t`, so the terminal payoff is the initial
//! condition and the valuation surface is the one reached at `tau = T`.

mod boundary;
mod grid;
mod problem;
mod scheme;
mod surface;
mod tridiag;

pub use boundary::{boundary_values, BoundarySlices, BoundaryStyle};
pub use grid::GridSpec;
pub use problem::{BoundaryPreset, HjbProblem};
pub use scheme::{adi_step, control_update, solve, terminal_condition, AdiMode, Solution, SolverOptions};
pub use surface::{write_surface_csv, ValueSurface};
pub use tridiag::{solve_tridiagonal, TridiagonalReport};
