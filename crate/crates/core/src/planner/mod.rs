//! Backup ILP construction, solving, plan extraction and plan checking.

mod ilp;
mod plan;
mod validate;

use ewbackup_milp::{solve_bb, BbParams, MilpError, MilpModel, SolveResult, Status};
use thiserror::Error;

use crate::netmodel::{Instance, InstanceViolation};

pub use ilp::{build_backup_ilp, build_ilp, build_maxbandwidth_ilp, ObjectiveKind, VarIndex};
pub use plan::{backup_time, extract_incumbent, extract_plan, plan_costs, BackupPlan, ItemPlan, PathPlan, SitePlan};
pub use validate::{validate_plan, PlanViolation, PlanViolationKind};

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("invalid instance: {}", join(.0))]
    InvalidInstance(Vec<InstanceViolation>),
    #[error("solver: {0}")]
    Solver(#[from] MilpError),
    #[error("no optimal solution (status {0})")]
    NotOptimal(Status),
    #[error("solver objective {solver} disagrees with recomputed cost {recomputed}")]
    ObjectiveMismatch { solver: f64, recomputed: u64 },
}

fn join(v: &[InstanceViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Result of planning one instance under one objective.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub model: MilpModel,
    pub index: VarIndex,
    pub result: SolveResult,
    /// Present whenever the solve found a solution; `result.status` tells
    /// whether it is proven optimal.
    pub plan: Option<BackupPlan>,
}

/// Builds, solves and extracts in one go.
pub fn plan_instance(
    inst: &Instance,
    objective: ObjectiveKind,
    params: &BbParams,
) -> Result<PlanOutcome, PlannerError> {
    let (model, index) = build_ilp(inst, objective)?;
    let result = solve_bb(&model, params)?;
    let plan = if result.has_solution() {
        Some(extract_incumbent(inst, &index, &result)?)
    } else {
        None
    };
    Ok(PlanOutcome {
        model,
        index,
        result,
        plan,
    })
}
