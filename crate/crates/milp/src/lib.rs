//! Exact solver for small and medium integer linear programs.
//!
//! Models are built with [`MilpModel`]; every variable must have finite
//! bounds. Three entry points are provided:
//!
//! * [`solve_lp_relaxation`] drops integrality and runs a bounded revised
//!   simplex with a smallest-index fallback against cycling.
//! * [`solve_bb`] runs best-bound branch-and-bound on top of it, branching
//!   on the most fractional variable.
//! * [`solve_exhaustive`] enumerates every integer point. It is meant as a
//!   test oracle for tiny models.
//!
//! Arithmetic is in `f64` with a `1e-6` feasibility and integrality
//! tolerance. Incumbents of pure integer models are re-checked in exact
//! arithmetic before they are accepted.

mod bb;
mod error;
mod exact;
mod exhaustive;
mod factor;
mod model;
mod result;
mod simplex;

pub use bb::{solve_bb, solve_lp_relaxation, BbParams};
pub use error::MilpError;
pub use exact::satisfies_exactly;
pub use exhaustive::{solve_exhaustive, solve_exhaustive_with_cap, DEFAULT_DOMAIN_CAP};
pub use model::{Constraint, MilpModel, Objective, Relation, Sense, VarId, Variable};
pub use result::{SolveResult, SolveStats, Status};

/// Feasibility and integrality tolerance used throughout.
pub const TOLERANCE: f64 = 1e-6;
