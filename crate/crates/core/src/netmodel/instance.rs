//! Disaster scenarios: who is at risk, where data may go, and under which
//! limits.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::network::{Network, NodeId};
use super::topology::{parse_topology, serialize_topology, TopologyError};
use crate::pathgen::{build_candidate_sets, path_from_nodes, Path};

/// Cap on simultaneously used paths between an item's source and one
/// backup DC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathLimit {
    #[default]
    Unbounded,
    AtMost(u32),
}

impl PathLimit {
    /// Effective cap when `available` paths exist.
    pub fn cap(self, available: usize) -> usize {
        match self {
            PathLimit::Unbounded => available,
            PathLimit::AtMost(k) => (k as usize).min(available),
        }
    }
}

impl std::str::FromStr for PathLimit {
    type Err = String;

    /// `unbounded` or a positive count.
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unbounded" => Ok(PathLimit::Unbounded),
            _ => match s.parse::<u32>() {
                Ok(k) if k > 0 => Ok(PathLimit::AtMost(k)),
                _ => Err(format!("expected `unbounded` or a positive count, got `{s}`")),
            },
        }
    }
}

impl fmt::Display for PathLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathLimit::Unbounded => f.write_str("unbounded"),
            PathLimit::AtMost(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataItem {
    pub id: usize,
    pub source: NodeId,
    /// Size in wavelength-channel quanta.
    pub size: u64,
    pub candidate_paths: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub network: Network,
    pub affected_dc: NodeId,
    pub safe_dcs: BTreeSet<NodeId>,
    pub data_items: Vec<DataItem>,
    /// Time available for the transfer; one channel moves one quantum per
    /// time unit.
    pub epsilon1: u64,
    pub pn: PathLimit,
    pub vn: u32,
    /// Big-M constant linking selection flags to amounts.
    pub lambda: u64,
    /// Hop bound used to generate the candidate paths.
    pub max_hops: usize,
}

/// Scalar parameters of an instance. `None` picks the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InstanceParams {
    pub epsilon1: u64,
    pub pn: PathLimit,
    pub vn: Option<u32>,
    pub lambda: Option<u64>,
    pub max_hops: Option<usize>,
}

impl Instance {
    /// Builds an instance whose items all originate at `affected` and share
    /// the full candidate path set towards `safe`.
    pub fn generate_paths(
        network: Network,
        affected: NodeId,
        safe: BTreeSet<NodeId>,
        sizes: &[u64],
        params: InstanceParams,
    ) -> Instance {
        let max_hops = params
            .max_hops
            .unwrap_or_else(|| crate::pathgen::all_paths_hops(&network));
        let paths: Vec<Path> = if network.contains(affected) {
            build_candidate_sets(&network, affected, &safe, max_hops)
                .into_values()
                .flatten()
                .collect()
        } else {
            Vec::new()
        };
        let data_items = sizes
            .iter()
            .enumerate()
            .map(|(id, &size)| DataItem {
                id,
                source: affected,
                size,
                candidate_paths: paths.clone(),
            })
            .collect();
        let mut inst = Instance {
            network,
            affected_dc: affected,
            vn: params.vn.unwrap_or(safe.len() as u32),
            safe_dcs: safe,
            data_items,
            epsilon1: params.epsilon1,
            pn: params.pn,
            lambda: 0,
            max_hops,
        };
        inst.lambda = params.lambda.unwrap_or_else(|| inst.default_lambda());
        inst
    }

    /// One more than the largest storage capacity, link capacity or item
    /// size.
    pub fn default_lambda(&self) -> u64 {
        let s = self
            .safe_dcs
            .iter()
            .filter_map(|v| self.network.dc(*v).and_then(|i| i.storage_capacity))
            .max()
            .unwrap_or(0);
        1 + s.max(self.max_link_capacity()).max(self.max_item_size())
    }

    fn max_link_capacity(&self) -> u64 {
        self.network
            .links()
            .iter()
            .filter_map(|l| l.capacity)
            .max()
            .unwrap_or(0) as u64
    }

    fn max_item_size(&self) -> u64 {
        self.data_items.iter().map(|d| d.size).max().unwrap_or(0)
    }

    pub fn total_data(&self) -> u64 {
        self.data_items.iter().map(|d| d.size).sum()
    }

    pub fn storage_capacity(&self, v: NodeId) -> u64 {
        self.network
            .dc(v)
            .and_then(|i| i.storage_capacity)
            .unwrap_or(0)
    }

    pub fn storage_unit_cost(&self, v: NodeId) -> u64 {
        self.network
            .dc(v)
            .and_then(|i| i.storage_unit_cost)
            .unwrap_or(0)
    }

    /// Candidate paths of item `d` ending at `v`, as indices into
    /// `candidate_paths`.
    pub fn paths_to(&self, d: usize, v: NodeId) -> impl Iterator<Item = usize> + '_ {
        self.data_items[d]
            .candidate_paths
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.destination() == v)
            .map(|(k, _)| k)
    }
}

/// A broken instance rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceViolation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Lists every broken instance rule; empty means the instance is usable.
pub fn validate_instance(inst: &Instance) -> Vec<InstanceViolation> {
    let mut out = Vec::new();
    let mut push = |field: String, rule: String| out.push(InstanceViolation { field, rule });
    let net = &inst.network;

    for (i, link) in net.links().iter().enumerate() {
        if link.capacity.is_none() {
            push(
                format!("network.links[{i}] ({}, {})", link.a, link.b),
                "capacity must be assigned".into(),
            );
        }
    }
    if !net.is_dc(inst.affected_dc) {
        push(
            "affected_dc".into(),
            format!("node {} must be a data center of the network", inst.affected_dc),
        );
    }
    if inst.safe_dcs.contains(&inst.affected_dc) {
        push(
            "safe_dcs".into(),
            format!(
                "must be disjoint from the affected DC, but contains node {}",
                inst.affected_dc
            ),
        );
    }
    for &v in &inst.safe_dcs {
        match net.dc(v) {
            None => push(
                "safe_dcs".into(),
                format!("node {v} must be a data center of the network"),
            ),
            Some(info) => {
                if info.storage_capacity.is_none() {
                    push(
                        format!("network.dc[{v}].storage_capacity"),
                        "must be assigned for a safe DC".into(),
                    );
                }
                if info.storage_unit_cost.is_none() {
                    push(
                        format!("network.dc[{v}].storage_unit_cost"),
                        "must be assigned for a safe DC".into(),
                    );
                }
            }
        }
    }
    if inst.epsilon1 == 0 {
        push("epsilon1".into(), "must be positive".into());
    }
    if inst.vn == 0 {
        push("vn".into(), "must be positive".into());
    }
    if inst.pn == PathLimit::AtMost(0) {
        push("pn".into(), "must be positive or unbounded".into());
    }
    let bound = inst.max_link_capacity().max(inst.max_item_size());
    if inst.lambda <= bound {
        push(
            "lambda".into(),
            format!("must exceed every channel and storage upper bound ({bound})"),
        );
    }

    for (d, item) in inst.data_items.iter().enumerate() {
        if item.id != d {
            push(format!("data_items[{d}].id"), format!("must equal its position, got {}", item.id));
        }
        if item.size == 0 {
            push(format!("data_items[{d}].size"), "must be at least 1".into());
        }
        if item.source != inst.affected_dc {
            push(
                format!("data_items[{d}].source"),
                format!("must be the affected DC {}, got {}", inst.affected_dc, item.source),
            );
        }
        for (k, p) in item.candidate_paths.iter().enumerate() {
            let field = format!("data_items[{d}].candidate_paths[{k}] ({p})");
            match path_from_nodes(net, &p.nodes) {
                Err(e) => push(field.clone(), format!("must be a simple path of the network: {e}")),
                Ok(q) if q != *p => push(field.clone(), "links or cost disagree with the network".into()),
                Ok(_) => {}
            }
            if p.nodes.first() != Some(&item.source) {
                push(field.clone(), "must start at the item's source".into());
            }
            if !p.nodes.last().is_some_and(|v| inst.safe_dcs.contains(v)) {
                push(field, "must end at a safe DC".into());
            }
        }
    }
    out
}

#[derive(Debug, Error)]
pub enum InstanceFileError {
    #[error("instance file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("instance topology: {0}")]
    Topology(#[from] TopologyError),
}

/// On-disk form of an instance. Candidate paths are regenerated on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    affected: usize,
    safe: Vec<usize>,
    epsilon1: u64,
    /// Absent means unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pn: Option<u32>,
    vn: u32,
    lambda: u64,
    max_hops: usize,
    item_sizes: Vec<u64>,
    topology: String,
}

pub fn instance_to_toml(inst: &Instance) -> String {
    let file = InstanceFile {
        affected: inst.affected_dc.0,
        safe: inst.safe_dcs.iter().map(|v| v.0).collect(),
        epsilon1: inst.epsilon1,
        pn: match inst.pn {
            PathLimit::Unbounded => None,
            PathLimit::AtMost(k) => Some(k),
        },
        vn: inst.vn,
        lambda: inst.lambda,
        max_hops: inst.max_hops,
        item_sizes: inst.data_items.iter().map(|d| d.size).collect(),
        topology: serialize_topology(&inst.network),
    };
    toml::to_string(&file).expect("instance fields serialize")
}

pub fn instance_from_toml(text: &str) -> Result<Instance, InstanceFileError> {
    let file: InstanceFile = toml::from_str(text)?;
    let network = parse_topology(&file.topology)?;
    Ok(Instance::generate_paths(
        network,
        NodeId(file.affected),
        file.safe.into_iter().map(NodeId).collect(),
        &file.item_sizes,
        InstanceParams {
            epsilon1: file.epsilon1,
            pn: file.pn.map_or(PathLimit::Unbounded, PathLimit::AtMost),
            vn: Some(file.vn),
            lambda: Some(file.lambda),
            max_hops: Some(file.max_hops),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{DcInfo, Link};
    use std::collections::BTreeMap;

    fn small() -> Instance {
        let mut dcs = BTreeMap::new();
        dcs.insert(NodeId(0), DcInfo::default());
        let full = DcInfo {
            storage_capacity: Some(10),
            storage_unit_cost: Some(1),
        };
        dcs.insert(NodeId(2), full);
        dcs.insert(NodeId(3), full);
        let net = Network::new(
            4,
            vec![
                Link::new(NodeId(0), NodeId(1), Some(10), 1),
                Link::new(NodeId(1), NodeId(2), Some(10), 1),
                Link::new(NodeId(1), NodeId(3), Some(10), 2),
            ],
            dcs,
        )
        .unwrap();
        Instance::generate_paths(
            net,
            NodeId(0),
            [NodeId(2), NodeId(3)].into(),
            &[5],
            InstanceParams {
                epsilon1: 1,
                ..Default::default()
            },
        )
    }

    #[test]
    fn defaults() {
        let inst = small();
        assert_eq!(inst.lambda, 11);
        assert_eq!(inst.vn, 2);
        assert_eq!(inst.max_hops, 3);
        assert_eq!(inst.data_items[0].candidate_paths.len(), 2);
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn overlapping_safe_set_is_reported() {
        let mut inst = small();
        inst.safe_dcs.insert(NodeId(0));
        let report = validate_instance(&inst);
        assert!(report
            .iter()
            .any(|v| v.field == "safe_dcs" && v.rule.contains("disjoint")));
    }

    #[test]
    fn toml_round_trip() {
        let inst = small();
        let text = instance_to_toml(&inst);
        assert_eq!(instance_from_toml(&text).unwrap(), inst);
    }
}
