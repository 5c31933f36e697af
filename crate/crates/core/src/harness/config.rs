use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context};

use crate::netmodel::{
    builtin_internetmci, builtin_internetmci_11dc, parse_topology, Network, NodeId, PathLimit,
};

/// Where the network comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologySource {
    /// Five DCs at 3, 9, 12, 14, 18.
    InternetMci,
    /// Eleven DCs: 2, 3, 5, 7, 8, 9, 11, 12, 14, 15, 16.
    InternetMci11,
    File(PathBuf),
}

impl TopologySource {
    pub fn load(&self) -> anyhow::Result<Network> {
        match self {
            TopologySource::InternetMci => Ok(builtin_internetmci()),
            TopologySource::InternetMci11 => Ok(builtin_internetmci_11dc()),
            TopologySource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading topology {}", path.display()))?;
                parse_topology(&text).with_context(|| format!("parsing {}", path.display()))
            }
        }
    }
}

impl FromStr for TopologySource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "builtin:internetmci" => Ok(TopologySource::InternetMci),
            "builtin:internetmci-11dc" => Ok(TopologySource::InternetMci11),
            _ if s.starts_with("builtin:") => bail!("unknown built-in topology `{s}`"),
            _ => Ok(TopologySource::File(PathBuf::from(s))),
        }
    }
}

impl fmt::Display for TopologySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySource::InternetMci => f.write_str("builtin:internetmci"),
            TopologySource::InternetMci11 => f.write_str("builtin:internetmci-11dc"),
            TopologySource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Closed integer interval for a uniform draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub lo: u64,
    pub hi: u64,
}

impl IntRange {
    pub fn new(lo: u64, hi: u64) -> anyhow::Result<Self> {
        if lo > hi {
            bail!("empty interval [{lo}, {hi}]");
        }
        Ok(IntRange { lo, hi })
    }

    pub fn contains(&self, x: u64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl FromStr for IntRange {
    type Err = anyhow::Error;

    /// Accepts `lo..hi` or `lo,hi`, both inclusive.
    fn from_str(s: &str) -> anyhow::Result<Self> {
        let (a, b) = s
            .split_once("..")
            .or_else(|| s.split_once(','))
            .with_context(|| format!("expected `lo..hi`, got `{s}`"))?;
        IntRange::new(a.trim().parse()?, b.trim().parse()?)
    }
}

/// One experiment campaign.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub topology: TopologySource,
    pub affected: NodeId,
    pub safe: BTreeSet<NodeId>,
    pub d_counts: Vec<usize>,
    pub epsilon1: Vec<u64>,
    pub seeds: Vec<u64>,
    pub link_capacity: IntRange,
    pub item_size: IntRange,
    pub storage_cost: IntRange,
    pub pn: PathLimit,
    /// `None` allows every safe DC.
    pub vn: Option<u32>,
    /// `None` derives the constant from the instance data.
    pub lambda: Option<u64>,
    /// `None` admits every simple path.
    pub max_hops: Option<usize>,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub workers: usize,
    /// Record solve wall time in the CSV.
    pub timing: bool,
}

/// Big-M used by the experiments unless overridden.
pub const HARNESS_LAMBDA: u64 = 10_000;

impl ScenarioConfig {
    /// Disaster at node 3, backups to 9, 12, 14, 18 on InternetMCI.
    pub fn paper() -> Self {
        ScenarioConfig {
            topology: TopologySource::InternetMci,
            affected: NodeId(3),
            safe: [9, 12, 14, 18].into_iter().map(NodeId).collect(),
            d_counts: vec![5, 10, 15, 20],
            epsilon1: vec![70],
            seeds: vec![1, 2, 3, 4, 5],
            link_capacity: IntRange { lo: 10, hi: 20 },
            item_size: IntRange { lo: 50, hi: 70 },
            storage_cost: IntRange { lo: 50, hi: 100 },
            pn: PathLimit::Unbounded,
            vn: Some(4),
            lambda: Some(HARNESS_LAMBDA),
            max_hops: None,
            time_limit: Some(Duration::from_secs(600)),
            node_limit: None,
            workers: 1,
            timing: true,
        }
    }

    /// Eleven-DC variant with ten safe DCs and a shorter warning time.
    pub fn paper_large() -> Self {
        ScenarioConfig {
            topology: TopologySource::InternetMci11,
            safe: [2, 5, 7, 8, 9, 11, 12, 14, 15, 16]
                .into_iter()
                .map(NodeId)
                .collect(),
            epsilon1: vec![60],
            vn: None,
            ..Self::paper()
        }
    }

    pub fn check(&self) -> anyhow::Result<()> {
        if self.safe.is_empty() {
            bail!("safe DC set is empty");
        }
        if self.safe.contains(&self.affected) {
            bail!("affected node {} is also listed as safe", self.affected);
        }
        if self.epsilon1.contains(&0) {
            bail!("epsilon1 must be positive");
        }
        if self.item_size.lo == 0 {
            bail!("item sizes must be at least 1");
        }
        if self.link_capacity.hi > u32::MAX as u64 {
            bail!("link capacities must fit in 32 bits");
        }
        Ok(())
    }
}

/// Parses `1..5` (inclusive) or `1,2,7`.
pub fn parse_list(s: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse()?;
        let b: u64 = b.trim().parse()?;
        if a > b {
            bail!("empty range `{s}`");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad list entry `{t}`")))
        .collect()
}
