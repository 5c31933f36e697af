use serde::{Deserialize, Serialize};

use ewbackup_milp::{SolveResult, Status, TOLERANCE};

use super::ilp::{ObjectiveKind, VarIndex};
use super::PlannerError;
use crate::netmodel::{Instance, NodeId};

/// Share of one item placed at one safe DC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SitePlan {
    pub dc: NodeId,
    pub stored: u64,
    pub selected: bool,
    /// Stored amount over channels towards this DC; 0 when nothing is stored.
    pub backup_time: f64,
}

/// Channels of one candidate path used by one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPlan {
    pub nodes: Vec<NodeId>,
    pub channels: u64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemPlan {
    pub id: usize,
    pub size: u64,
    /// One entry per safe DC.
    pub sites: Vec<SitePlan>,
    /// Paths that are selected or carry channels; all others are unused.
    #[serde(default)]
    pub paths: Vec<PathPlan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackupPlan {
    pub storage_cost: u64,
    pub transmission_cost: u64,
    pub total_cost: u64,
    #[serde(default)]
    pub items: Vec<ItemPlan>,
}

impl BackupPlan {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan fields serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn total_channels(&self) -> u64 {
        self.items
            .iter()
            .flat_map(|i| &i.paths)
            .map(|p| p.channels)
            .sum()
    }
}

/// Storage and transmission cost of a plan, computed from instance data.
/// Paths absent from the instance are costed by walking the network; links
/// missing from the network contribute nothing.
pub fn plan_costs(inst: &Instance, items: &[ItemPlan]) -> (u64, u64) {
    let net = &inst.network;
    let mut storage = 0;
    let mut transmission = 0;
    for item in items {
        for s in &item.sites {
            storage += s.stored * inst.storage_unit_cost(s.dc);
        }
        for p in &item.paths {
            let cost: u64 = p
                .nodes
                .windows(2)
                .filter_map(|w| net.link_between(w[0], w[1]))
                .map(|l| net.link(l).cost)
                .sum();
            transmission += p.channels * cost;
        }
    }
    (storage, transmission)
}

/// Stored amount divided by channels, 0 when nothing is stored.
pub fn backup_time(stored: u64, channels: u64) -> f64 {
    if stored == 0 {
        0.0
    } else if channels == 0 {
        f64::INFINITY
    } else {
        stored as f64 / channels as f64
    }
}

fn integral(result: &SolveResult, v: ewbackup_milp::VarId) -> u64 {
    let x = result.value(v).round();
    debug_assert!(x >= 0.0);
    x as u64
}

/// Reads a plan out of an optimal solution and recosts it from the
/// instance. For the min-cost model the recomputed total must match the
/// solver objective.
pub fn extract_plan(
    inst: &Instance,
    index: &VarIndex,
    result: &SolveResult,
) -> Result<BackupPlan, PlannerError> {
    if result.status != Status::Optimal {
        return Err(PlannerError::NotOptimal(result.status));
    }
    read_plan(inst, index, result)
}

/// Like [`extract_plan`], but also accepts the incumbent of a search that
/// stopped at a limit.
pub fn extract_incumbent(
    inst: &Instance,
    index: &VarIndex,
    result: &SolveResult,
) -> Result<BackupPlan, PlannerError> {
    if !result.has_solution() {
        return Err(PlannerError::NotOptimal(result.status));
    }
    read_plan(inst, index, result)
}

fn read_plan(
    inst: &Instance,
    index: &VarIndex,
    result: &SolveResult,
) -> Result<BackupPlan, PlannerError> {
    let mut items = Vec::with_capacity(inst.data_items.len());
    for (d, item) in inst.data_items.iter().enumerate() {
        let mut to_site = vec![0u64; index.safe.len()];
        let mut paths = Vec::new();
        for (k, p) in item.candidate_paths.iter().enumerate() {
            let channels = integral(result, index.channels[d][k]);
            let selected = integral(result, index.path_flag[d][k]) == 1;
            if channels > 0 || selected {
                let i = index.safe.binary_search(&p.destination()).expect("safe destination");
                to_site[i] += channels;
                paths.push(PathPlan {
                    nodes: p.nodes.clone(),
                    channels,
                    selected,
                });
            }
        }
        let sites = index
            .safe
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let stored = integral(result, index.stored[d][i]);
                SitePlan {
                    dc: v,
                    stored,
                    selected: integral(result, index.site_flag[d][i]) == 1,
                    backup_time: backup_time(stored, to_site[i]),
                }
            })
            .collect();
        items.push(ItemPlan {
            id: item.id,
            size: item.size,
            sites,
            paths,
        });
    }
    let (storage_cost, transmission_cost) = plan_costs(inst, &items);
    let total_cost = storage_cost + transmission_cost;
    if index.objective == ObjectiveKind::MinCost {
        let objective = result.objective_value.expect("solution has an objective");
        if (objective - total_cost as f64).abs() > TOLERANCE {
            return Err(PlannerError::ObjectiveMismatch {
                solver: objective,
                recomputed: total_cost,
            });
        }
    }
    Ok(BackupPlan {
        storage_cost,
        transmission_cost,
        total_cost,
        items,
    })
}
