use std::fmt;
use std::time::Duration;

use crate::model::VarId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    /// A time or node limit stopped the search. The result carries the
    /// incumbent, if one was found, and the best remaining bound.
    BoundExceeded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::BoundExceeded => "bound-exceeded",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Branch-and-bound nodes processed after the root.
    pub nodes: u64,
    pub lp_iterations: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    /// One value per model variable; empty when no solution is known.
    /// Integer variables hold exactly integral values.
    pub values: Vec<f64>,
    /// Objective of `values` in the model's own sense.
    pub objective_value: Option<f64>,
    /// Proven bound on the optimum in the model's own sense.
    pub best_bound: Option<f64>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub(crate) fn infeasible(stats: SolveStats) -> Self {
        SolveResult {
            status: Status::Infeasible,
            values: Vec::new(),
            objective_value: None,
            best_bound: None,
            stats,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn has_solution(&self) -> bool {
        self.objective_value.is_some()
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    /// Relative gap between incumbent and bound, when both exist.
    pub fn gap(&self) -> Option<f64> {
        let obj = self.objective_value?;
        let bound = self.best_bound?;
        Some((obj - bound).abs() / obj.abs().max(1.0))
    }
}
