//! Small numerical kernels: LP feasibility and maximization of piecewise-linear objectives.

pub mod grid;
pub mod lp;
pub mod piecewise;

pub use grid::{grid_refine_max, simplex_grid, simplex_grid_len};
pub use lp::{lp_feasible, LinearFeasibilityProblem, LpOutcome};
pub use piecewise::{affine_crossings, maximize_piecewise_1d, segment_breakpoints, PiecewiseMax};
