use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node of the optical backbone. Ids are dense, `0..node_count`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of a link in `Network::links`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub usize);

/// Undirected fiber link. Endpoints are stored with `a < b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    /// Available wavelength channels; unset until an instance assigns it.
    pub capacity: Option<u32>,
    /// Cost of one wavelength channel on this link.
    pub cost: u64,
}

impl Link {
    pub fn new(u: NodeId, v: NodeId, capacity: Option<u32>, cost: u64) -> Self {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        Link { a, b, capacity, cost }
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.a, self.b)
    }

    pub fn other(&self, end: NodeId) -> NodeId {
        if end == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Storage annotation of a data-center node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DcInfo {
    /// Free storage, in the same data units as item sizes.
    pub storage_capacity: Option<u64>,
    /// Cost of storing one data unit.
    pub storage_unit_cost: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("link ({0}, {0}) is a self-loop")]
    SelfLoop(NodeId),
    #[error("link ({0}, {1}) references undeclared node {2}")]
    DanglingEndpoint(NodeId, NodeId, NodeId),
    #[error("duplicate link between {0} and {1}")]
    DuplicateLink(NodeId, NodeId),
    #[error("data-center annotation on undeclared node {0}")]
    UnknownDc(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    names: Vec<Option<String>>,
    links: Vec<Link>,
    dcs: BTreeMap<NodeId, DcInfo>,
    /// Neighbours of each node sorted by node id.
    adjacency: Vec<Vec<(NodeId, LinkId)>>,
}

impl Network {
    /// Nodes are `0..node_count`; links keep the given order.
    pub fn new(
        node_count: usize,
        links: Vec<Link>,
        dcs: BTreeMap<NodeId, DcInfo>,
    ) -> Result<Self, NetworkError> {
        let names = vec![None; node_count];
        Self::with_names(names, links, dcs)
    }

    pub fn with_names(
        names: Vec<Option<String>>,
        links: Vec<Link>,
        dcs: BTreeMap<NodeId, DcInfo>,
    ) -> Result<Self, NetworkError> {
        let n = names.len();
        let mut adjacency = vec![Vec::new(); n];
        for (i, link) in links.iter().enumerate() {
            if link.a == link.b {
                return Err(NetworkError::SelfLoop(link.a));
            }
            for end in [link.a, link.b] {
                if end.0 >= n {
                    return Err(NetworkError::DanglingEndpoint(link.a, link.b, end));
                }
            }
            if adjacency[link.a.0].iter().any(|&(v, _)| v == link.b) {
                return Err(NetworkError::DuplicateLink(link.a, link.b));
            }
            adjacency[link.a.0].push((link.b, LinkId(i)));
            adjacency[link.b.0].push((link.a, LinkId(i)));
        }
        for adj in &mut adjacency {
            adj.sort();
        }
        if let Some(&v) = dcs.keys().find(|v| v.0 >= n) {
            return Err(NetworkError::UnknownDc(v));
        }
        Ok(Network {
            names,
            links,
            dcs,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.names.len()).map(NodeId)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.0 < self.names.len()
    }

    pub fn name(&self, v: NodeId) -> Option<&str> {
        self.names.get(v.0).and_then(|n| n.as_deref())
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.0]
    }

    pub fn link_between(&self, u: NodeId, v: NodeId) -> Option<LinkId> {
        self.adjacency
            .get(u.0)?
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, id)| id)
    }

    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, LinkId)] {
        &self.adjacency[v.0]
    }

    pub fn dcs(&self) -> &BTreeMap<NodeId, DcInfo> {
        &self.dcs
    }

    pub fn dc(&self, v: NodeId) -> Option<&DcInfo> {
        self.dcs.get(&v)
    }

    pub fn is_dc(&self, v: NodeId) -> bool {
        self.dcs.contains_key(&v)
    }

    pub fn total_link_cost(&self) -> u64 {
        self.links.iter().map(|l| l.cost).sum()
    }

    /// Returns a copy with every link capacity replaced.
    pub fn with_capacities(&self, capacities: &[u32]) -> Network {
        assert_eq!(capacities.len(), self.links.len());
        let mut out = self.clone();
        for (link, &c) in out.links.iter_mut().zip(capacities) {
            link.capacity = Some(c);
        }
        out
    }

    /// Returns a copy with the storage annotation of `v` replaced. `v` must
    /// already be a node.
    pub fn with_dc(&self, v: NodeId, info: DcInfo) -> Network {
        assert!(self.contains(v));
        let mut out = self.clone();
        out.dcs.insert(v, info);
        out
    }
}
