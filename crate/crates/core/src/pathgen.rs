//! Candidate transmission paths between the affected DC and the safe DCs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::netmodel::{LinkId, Network, NodeId};

/// Simple path through the network. `links[i]` joins `nodes[i]` and
/// `nodes[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
    pub cost: u64,
}

impl Path {
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.nodes.last().expect("paths are never empty")
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }

    /// Smallest link capacity along the path; `None` if some link has no
    /// capacity assigned.
    pub fn bottleneck(&self, net: &Network) -> Option<u32> {
        self.links
            .iter()
            .map(|&l| net.link(l).capacity)
            .try_fold(u32::MAX, |acc, c| c.map(|c| acc.min(c)))
    }

    pub fn uses(&self, link: LinkId) -> bool {
        self.links.contains(&link)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("path is empty")]
    Empty,
    #[error("node {0} is not in the network")]
    UnknownNode(NodeId),
    #[error("node {0} is visited twice")]
    Repeated(NodeId),
    #[error("no link between {0} and {1}")]
    MissingLink(NodeId, NodeId),
}

/// Builds a path from its node sequence, checking simplicity and links.
pub fn path_from_nodes(net: &Network, nodes: &[NodeId]) -> Result<Path, PathError> {
    if nodes.is_empty() {
        return Err(PathError::Empty);
    }
    let mut seen = BTreeSet::new();
    for &v in nodes {
        if !net.contains(v) {
            return Err(PathError::UnknownNode(v));
        }
        if !seen.insert(v) {
            return Err(PathError::Repeated(v));
        }
    }
    let mut links = Vec::with_capacity(nodes.len() - 1);
    let mut cost = 0;
    for w in nodes.windows(2) {
        let id = net
            .link_between(w[0], w[1])
            .ok_or(PathError::MissingLink(w[0], w[1]))?;
        cost += net.link(id).cost;
        links.push(id);
    }
    Ok(Path {
        nodes: nodes.to_vec(),
        links,
        cost,
    })
}

/// Every simple `src`→`dst` path with at most `max_hops` links, in
/// lexicographic order of node sequence.
pub fn enumerate_simple_paths(
    net: &Network,
    src: NodeId,
    dst: NodeId,
    max_hops: usize,
) -> Vec<Path> {
    assert!(src != dst, "source and destination coincide");
    assert!(net.contains(src) && net.contains(dst), "unknown endpoint");

    struct Dfs<'a> {
        net: &'a Network,
        dst: NodeId,
        max_hops: usize,
        on_path: Vec<bool>,
        nodes: Vec<NodeId>,
        links: Vec<LinkId>,
        cost: u64,
        out: Vec<Path>,
    }

    impl Dfs<'_> {
        fn visit(&mut self, v: NodeId) {
            if v == self.dst {
                self.out.push(Path {
                    nodes: self.nodes.clone(),
                    links: self.links.clone(),
                    cost: self.cost,
                });
                return;
            }
            if self.links.len() == self.max_hops {
                return;
            }
            for &(w, l) in self.net.neighbors(v) {
                if self.on_path[w.0] {
                    continue;
                }
                let c = self.net.link(l).cost;
                self.on_path[w.0] = true;
                self.nodes.push(w);
                self.links.push(l);
                self.cost += c;
                self.visit(w);
                self.cost -= c;
                self.links.pop();
                self.nodes.pop();
                self.on_path[w.0] = false;
            }
        }
    }

    let mut dfs = Dfs {
        net,
        dst,
        max_hops,
        on_path: vec![false; net.node_count()],
        nodes: vec![src],
        links: Vec::new(),
        cost: 0,
        out: Vec::new(),
    };
    dfs.on_path[src.0] = true;
    dfs.visit(src);
    dfs.out
}

/// Paths from `affected` to each safe DC, keyed by destination.
pub fn build_candidate_sets(
    net: &Network,
    affected: NodeId,
    safe_dcs: &BTreeSet<NodeId>,
    max_hops: usize,
) -> BTreeMap<NodeId, Vec<Path>> {
    safe_dcs
        .iter()
        .map(|&v| (v, enumerate_simple_paths(net, affected, v, max_hops)))
        .collect()
}

/// Hop bound that admits every simple path.
pub fn all_paths_hops(net: &Network) -> usize {
    net.node_count().saturating_sub(1).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::Link;

    fn graph(n: usize, edges: &[(usize, usize, u64)]) -> Network {
        Network::new(
            n,
            edges
                .iter()
                .map(|&(u, v, c)| Link::new(NodeId(u), NodeId(v), Some(5), c))
                .collect(),
            Default::default(),
        )
        .unwrap()
    }

    fn seqs(paths: &[Path]) -> Vec<Vec<usize>> {
        paths
            .iter()
            .map(|p| p.nodes.iter().map(|v| v.0).collect())
            .collect()
    }

    #[test]
    fn triangle() {
        let net = graph(3, &[(0, 1, 1), (1, 2, 2), (0, 2, 7)]);
        let paths = enumerate_simple_paths(&net, NodeId(0), NodeId(2), 3);
        assert_eq!(seqs(&paths), vec![vec![0, 1, 2], vec![0, 2]]);
        assert_eq!(paths[0].cost, 3);
        assert_eq!(paths[1].cost, 7);
        assert_eq!(paths[0].source(), NodeId(0));
        assert_eq!(paths[0].destination(), NodeId(2));
    }

    #[test]
    fn hop_bound_excludes_long_paths() {
        let net = graph(3, &[(0, 1, 1), (1, 2, 1)]);
        assert!(enumerate_simple_paths(&net, NodeId(0), NodeId(2), 1).is_empty());
        assert_eq!(enumerate_simple_paths(&net, NodeId(0), NodeId(2), 2).len(), 1);
    }

    #[test]
    fn path_from_nodes_checks_structure() {
        let net = graph(3, &[(0, 1, 4), (1, 2, 6)]);
        let p = path_from_nodes(&net, &[NodeId(2), NodeId(1), NodeId(0)]).unwrap();
        assert_eq!(p.cost, 10);
        assert_eq!(p.to_string(), "2-1-0");
        assert_eq!(
            path_from_nodes(&net, &[NodeId(0), NodeId(2)]),
            Err(PathError::MissingLink(NodeId(0), NodeId(2)))
        );
        assert_eq!(
            path_from_nodes(&net, &[NodeId(0), NodeId(1), NodeId(0)]),
            Err(PathError::Repeated(NodeId(0)))
        );
    }

    #[test]
    fn bottleneck_is_min_capacity() {
        let net = graph(3, &[(0, 1, 1), (1, 2, 1)]).with_capacities(&[7, 3]);
        let p = path_from_nodes(&net, &[NodeId(0), NodeId(1), NodeId(2)]).unwrap();
        assert_eq!(p.bottleneck(&net), Some(3));
    }
}
