use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::plan::{plan_costs, BackupPlan};
use crate::netmodel::{Instance, NodeId};

/// One broken rule of a backup plan.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanViolation {
    ItemCount { plan: usize, instance: usize },
    ItemMismatch { position: usize, detail: String },
    UnknownSite { item: usize, dc: NodeId },
    UnknownPath { item: usize, path: String },
    StorageCapacity { dc: NodeId, used: u64, capacity: u64 },
    Conservation { item: usize, stored: u64, size: u64 },
    LinkCapacity { a: NodeId, b: NodeId, used: u64, capacity: u64 },
    PathCount { item: usize, dc: NodeId, selected: usize, limit: usize },
    NoSite { item: usize },
    TooManySites { item: usize, selected: usize, limit: u32 },
    PathToUnselectedSite { item: usize, path: String },
    SiteWithoutPath { item: usize, dc: NodeId },
    SelectedPathIdle { item: usize, path: String },
    ChannelsOnUnselectedPath { item: usize, path: String, channels: u64 },
    SelectedSiteEmpty { item: usize, dc: NodeId },
    DataOnUnselectedSite { item: usize, dc: NodeId, stored: u64 },
    BackupTime { item: usize, dc: NodeId, stored: u64, channels: u64, epsilon1: u64 },
    ReportedBackupTime { item: usize, dc: NodeId, reported: f64, actual: f64 },
    CostMismatch { field: &'static str, reported: u64, actual: u64 },
}

/// Coarse classification, handy for counting violations by rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanViolationKind {
    Structure,
    StorageCapacity,
    Conservation,
    LinkCapacity,
    PathCount,
    SiteCount,
    Linking,
    BackupTime,
    Cost,
}

impl PlanViolation {
    pub fn kind(&self) -> PlanViolationKind {
        use PlanViolation::*;
        match self {
            ItemCount { .. } | ItemMismatch { .. } | UnknownSite { .. } | UnknownPath { .. } => {
                PlanViolationKind::Structure
            }
            StorageCapacity { .. } => PlanViolationKind::StorageCapacity,
            Conservation { .. } => PlanViolationKind::Conservation,
            LinkCapacity { .. } => PlanViolationKind::LinkCapacity,
            PathCount { .. } => PlanViolationKind::PathCount,
            NoSite { .. } | TooManySites { .. } => PlanViolationKind::SiteCount,
            PathToUnselectedSite { .. }
            | SiteWithoutPath { .. }
            | SelectedPathIdle { .. }
            | ChannelsOnUnselectedPath { .. }
            | SelectedSiteEmpty { .. }
            | DataOnUnselectedSite { .. } => PlanViolationKind::Linking,
            BackupTime { .. } | ReportedBackupTime { .. } => PlanViolationKind::BackupTime,
            CostMismatch { .. } => PlanViolationKind::Cost,
        }
    }
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PlanViolation::*;
        match self {
            ItemCount { plan, instance } => {
                write!(f, "plan has {plan} items, instance has {instance}")
            }
            ItemMismatch { position, detail } => write!(f, "item at position {position}: {detail}"),
            UnknownSite { item, dc } => write!(f, "item {item}: node {dc} is not a safe DC"),
            UnknownPath { item, path } => {
                write!(f, "item {item}: path {path} is not a candidate path")
            }
            StorageCapacity { dc, used, capacity } => {
                write!(f, "DC {dc}: stores {used}, capacity {capacity}")
            }
            Conservation { item, stored, size } => {
                write!(f, "item {item}: stores {stored} of {size}")
            }
            LinkCapacity { a, b, used, capacity } => {
                write!(f, "link ({a}, {b}): uses {used} channels, capacity {capacity}")
            }
            PathCount { item, dc, selected, limit } => {
                write!(f, "item {item}: {selected} paths to DC {dc}, limit {limit}")
            }
            NoSite { item } => write!(f, "item {item}: no backup DC selected"),
            TooManySites { item, selected, limit } => {
                write!(f, "item {item}: {selected} backup DCs, limit {limit}")
            }
            PathToUnselectedSite { item, path } => {
                write!(f, "item {item}: path {path} selected but its DC is not")
            }
            SiteWithoutPath { item, dc } => {
                write!(f, "item {item}: DC {dc} selected without a selected path")
            }
            SelectedPathIdle { item, path } => {
                write!(f, "item {item}: path {path} selected with no channels")
            }
            ChannelsOnUnselectedPath { item, path, channels } => {
                write!(f, "item {item}: path {path} carries {channels} channels but is not selected")
            }
            SelectedSiteEmpty { item, dc } => {
                write!(f, "item {item}: DC {dc} selected but stores nothing")
            }
            DataOnUnselectedSite { item, dc, stored } => {
                write!(f, "item {item}: DC {dc} stores {stored} but is not selected")
            }
            BackupTime { item, dc, stored, channels, epsilon1 } => write!(
                f,
                "item {item}: {stored} units to DC {dc} over {channels} channels exceeds time {epsilon1}"
            ),
            ReportedBackupTime { item, dc, reported, actual } => write!(
                f,
                "item {item}: backup time to DC {dc} reported {reported}, actual {actual}"
            ),
            CostMismatch { field, reported, actual } => {
                write!(f, "{field}: reported {reported}, actual {actual}")
            }
        }
    }
}

/// Checks a plan against every constraint of the model, with the time
/// limit in ratio form. Empty output means the plan is feasible.
pub fn validate_plan(inst: &Instance, plan: &BackupPlan) -> Vec<PlanViolation> {
    use PlanViolation::*;
    let mut out = Vec::new();
    let net = &inst.network;
    let lambda = inst.lambda;

    if plan.items.len() != inst.data_items.len() {
        out.push(ItemCount {
            plan: plan.items.len(),
            instance: inst.data_items.len(),
        });
    }

    let mut dc_used: BTreeMap<NodeId, u64> = inst.safe_dcs.iter().map(|&v| (v, 0)).collect();
    let mut link_used = vec![0u64; net.links().len()];

    for (pos, (item, spec)) in plan.items.iter().zip(&inst.data_items).enumerate() {
        let d = spec.id;
        if item.id != spec.id || item.size != spec.size {
            out.push(ItemMismatch {
                position: pos,
                detail: format!(
                    "plan has id {} size {}, instance has id {} size {}",
                    item.id, item.size, spec.id, spec.size
                ),
            });
        }
        let candidates: HashMap<&[NodeId], usize> = spec
            .candidate_paths
            .iter()
            .enumerate()
            .map(|(k, p)| (p.nodes.as_slice(), k))
            .collect();

        let mut stored_at: BTreeMap<NodeId, (u64, bool)> = BTreeMap::new();
        for s in &item.sites {
            if !inst.safe_dcs.contains(&s.dc) {
                out.push(UnknownSite { item: d, dc: s.dc });
                continue;
            }
            let e = stored_at.entry(s.dc).or_insert((0, false));
            e.0 += s.stored;
            e.1 |= s.selected;
        }
        let mut channels_to: BTreeMap<NodeId, u64> = BTreeMap::new();
        let mut selected_to: BTreeMap<NodeId, usize> = BTreeMap::new();
        for p in &item.paths {
            let name = path_name(&p.nodes);
            let Some(&k) = candidates.get(p.nodes.as_slice()) else {
                out.push(UnknownPath { item: d, path: name });
                continue;
            };
            let path = &spec.candidate_paths[k];
            let dst = path.destination();
            for l in &path.links {
                link_used[l.0] += p.channels;
            }
            *channels_to.entry(dst).or_default() += p.channels;
            if p.selected {
                *selected_to.entry(dst).or_default() += 1;
                if !stored_at.get(&dst).is_some_and(|s| s.1) {
                    out.push(PathToUnselectedSite { item: d, path: name.clone() });
                }
                if p.channels == 0 {
                    out.push(SelectedPathIdle { item: d, path: name.clone() });
                }
            }
            if p.channels > 0 && (!p.selected || p.channels > lambda) {
                out.push(ChannelsOnUnselectedPath {
                    item: d,
                    path: name,
                    channels: p.channels,
                });
            }
        }

        let total: u64 = stored_at.values().map(|s| s.0).sum();
        if total != spec.size {
            out.push(Conservation {
                item: d,
                stored: total,
                size: spec.size,
            });
        }
        let chosen = stored_at.values().filter(|s| s.1).count();
        if chosen == 0 {
            out.push(NoSite { item: d });
        }
        if chosen > inst.vn as usize {
            out.push(TooManySites {
                item: d,
                selected: chosen,
                limit: inst.vn,
            });
        }
        for &v in &inst.safe_dcs {
            let (stored, selected) = stored_at.get(&v).copied().unwrap_or((0, false));
            *dc_used.get_mut(&v).expect("safe DC") += stored;
            let available = inst.paths_to(d, v).count();
            let count = selected_to.get(&v).copied().unwrap_or(0);
            let limit = inst.pn.cap(available);
            if count > limit {
                out.push(PathCount {
                    item: d,
                    dc: v,
                    selected: count,
                    limit,
                });
            }
            if selected && count == 0 {
                out.push(SiteWithoutPath { item: d, dc: v });
            }
            if selected && stored == 0 {
                out.push(SelectedSiteEmpty { item: d, dc: v });
            }
            if stored > 0 && (!selected || stored > lambda) {
                out.push(DataOnUnselectedSite { item: d, dc: v, stored });
            }
            let channels = channels_to.get(&v).copied().unwrap_or(0);
            if stored > 0 && (channels == 0 || stored as f64 / channels as f64 > inst.epsilon1 as f64) {
                out.push(BackupTime {
                    item: d,
                    dc: v,
                    stored,
                    channels,
                    epsilon1: inst.epsilon1,
                });
            }
        }
        for s in &item.sites {
            if !inst.safe_dcs.contains(&s.dc) {
                continue;
            }
            let actual = super::plan::backup_time(s.stored, channels_to.get(&s.dc).copied().unwrap_or(0));
            let same = (actual.is_infinite() && s.backup_time.is_infinite())
                || (actual - s.backup_time).abs() <= 1e-9 * actual.abs().max(1.0);
            if !same {
                out.push(ReportedBackupTime {
                    item: d,
                    dc: s.dc,
                    reported: s.backup_time,
                    actual,
                });
            }
        }
    }

    for (&v, &used) in &dc_used {
        let capacity = inst.storage_capacity(v);
        if used > capacity {
            out.push(StorageCapacity { dc: v, used, capacity });
        }
    }
    for (l, &used) in link_used.iter().enumerate() {
        let link = &net.links()[l];
        let capacity = link.capacity.unwrap_or(0) as u64;
        if used > capacity {
            out.push(LinkCapacity {
                a: link.a,
                b: link.b,
                used,
                capacity,
            });
        }
    }

    let (storage, transmission) = plan_costs(inst, &plan.items);
    for (field, reported, actual) in [
        ("storage_cost", plan.storage_cost, storage),
        ("transmission_cost", plan.transmission_cost, transmission),
        ("total_cost", plan.total_cost, storage + transmission),
    ] {
        if reported != actual {
            out.push(CostMismatch { field, reported, actual });
        }
    }
    out
}

fn path_name(nodes: &[NodeId]) -> String {
    nodes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
}
