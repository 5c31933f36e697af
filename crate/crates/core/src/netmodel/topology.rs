//! Line-oriented topology files.
//!
//! ```text
//! # comment
//! node 0 name=Seattle
//! node 3 dc storage=120 wcost=75
//! link 0 3 cap=12 cost=133
//! ```
//!
//! `dc` marks a data-center node; `storage` and `wcost` are optional so
//! that a topology can leave them to the instance generator. The same holds
//! for `cap` on links. Node ids must cover `0..n` exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::network::{DcInfo, Link, Network, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn syntax(line: usize, message: impl Into<String>) -> TopologyError {
    TopologyError::Syntax {
        line,
        message: message.into(),
    }
}

fn semantic(line: usize, message: impl Into<String>) -> TopologyError {
    TopologyError::Semantic {
        line,
        message: message.into(),
    }
}

fn parse_int(line: usize, what: &str, text: &str) -> Result<i64, TopologyError> {
    text.parse::<i64>()
        .map_err(|_| syntax(line, format!("{what} `{text}` is not an integer")))
}

fn parse_node_id(line: usize, text: &str) -> Result<NodeId, TopologyError> {
    let v = parse_int(line, "node id", text)?;
    if v < 0 {
        return Err(semantic(line, format!("negative node id {v}")));
    }
    Ok(NodeId(v as usize))
}

fn non_negative(line: usize, what: &str, v: i64) -> Result<u64, TopologyError> {
    if v < 0 {
        Err(semantic(line, format!("negative {what} {v}")))
    } else {
        Ok(v as u64)
    }
}

struct LinkLine {
    line: usize,
    u: NodeId,
    v: NodeId,
    capacity: Option<u32>,
    cost: u64,
}

pub fn parse_topology(text: &str) -> Result<Network, TopologyError> {
    let mut declared: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut names: BTreeMap<NodeId, String> = BTreeMap::new();
    let mut dcs: BTreeMap<NodeId, DcInfo> = BTreeMap::new();
    let mut links: Vec<LinkLine> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("node") => {
                let id = parse_node_id(
                    line,
                    tokens.next().ok_or_else(|| syntax(line, "`node` needs an id"))?,
                )?;
                if let Some(first) = declared.insert(id, line) {
                    return Err(semantic(
                        line,
                        format!("node {id} already declared on line {first}"),
                    ));
                }
                let mut dc: Option<DcInfo> = None;
                for tok in tokens {
                    if tok == "dc" {
                        dc.get_or_insert_with(DcInfo::default);
                        continue;
                    }
                    let (key, value) = tok
                        .split_once('=')
                        .ok_or_else(|| syntax(line, format!("unexpected token `{tok}`")))?;
                    match key {
                        "name" => {
                            names.insert(id, value.to_string());
                        }
                        "storage" | "wcost" => {
                            let info = dc.as_mut().ok_or_else(|| {
                                syntax(line, format!("`{key}` requires the `dc` flag first"))
                            })?;
                            let what = if key == "storage" {
                                "storage capacity"
                            } else {
                                "storage cost"
                            };
                            let v = non_negative(line, what, parse_int(line, what, value)?)?;
                            if key == "storage" {
                                info.storage_capacity = Some(v);
                            } else {
                                info.storage_unit_cost = Some(v);
                            }
                        }
                        _ => return Err(syntax(line, format!("unknown node attribute `{key}`"))),
                    }
                }
                if let Some(info) = dc {
                    dcs.insert(id, info);
                }
            }
            Some("link") => {
                let mut ends = [NodeId(0); 2];
                for end in &mut ends {
                    *end = parse_node_id(
                        line,
                        tokens
                            .next()
                            .ok_or_else(|| syntax(line, "`link` needs two endpoints"))?,
                    )?;
                }
                let mut capacity = None;
                let mut cost = None;
                for tok in tokens {
                    let (key, value) = tok
                        .split_once('=')
                        .ok_or_else(|| syntax(line, format!("unexpected token `{tok}`")))?;
                    match key {
                        "cap" => {
                            let v = non_negative(line, "capacity", parse_int(line, "capacity", value)?)?;
                            let v = u32::try_from(v)
                                .map_err(|_| semantic(line, format!("capacity {v} too large")))?;
                            capacity = Some(v);
                        }
                        "cost" => {
                            cost = Some(non_negative(line, "cost", parse_int(line, "cost", value)?)?);
                        }
                        _ => return Err(syntax(line, format!("unknown link attribute `{key}`"))),
                    }
                }
                let cost = cost.ok_or_else(|| syntax(line, "`link` needs cost=<int>"))?;
                links.push(LinkLine {
                    line,
                    u: ends[0],
                    v: ends[1],
                    capacity,
                    cost,
                });
            }
            Some(other) => {
                return Err(syntax(line, format!("unknown directive `{other}`")));
            }
            None => unreachable!("empty lines are skipped"),
        }
    }

    let n = declared.len();
    if let Some((&id, &line)) = declared.iter().find(|(id, _)| id.0 >= n) {
        let missing = (0..n).map(NodeId).find(|v| !declared.contains_key(v));
        return Err(semantic(
            line,
            format!(
                "node ids must be dense 0..{}: node {id} declared but node {} missing",
                n.saturating_sub(1),
                missing.map_or_else(String::new, |m| m.to_string())
            ),
        ));
    }

    let mut seen: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut out = Vec::with_capacity(links.len());
    for l in &links {
        for end in [l.u, l.v] {
            if !declared.contains_key(&end) {
                return Err(semantic(
                    l.line,
                    format!("link ({}, {}) references undeclared node {end}", l.u, l.v),
                ));
            }
        }
        if l.u == l.v {
            return Err(semantic(l.line, format!("self-loop on node {}", l.u)));
        }
        let link = Link::new(l.u, l.v, l.capacity, l.cost);
        if !seen.insert(link.endpoints()) {
            return Err(semantic(
                l.line,
                format!("duplicate link between {} and {}", link.a, link.b),
            ));
        }
        out.push(link);
    }

    let names = (0..n).map(|i| names.remove(&NodeId(i))).collect();
    Network::with_names(names, out, dcs).map_err(|e| TopologyError::Invalid(e.to_string()))
}

/// Writes a network in the format read by [`parse_topology`].
pub fn serialize_topology(net: &Network) -> String {
    let mut out = String::new();
    for v in net.nodes() {
        write!(out, "node {v}").unwrap();
        if let Some(name) = net.name(v) {
            write!(out, " name={name}").unwrap();
        }
        if let Some(info) = net.dc(v) {
            out.push_str(" dc");
            if let Some(s) = info.storage_capacity {
                write!(out, " storage={s}").unwrap();
            }
            if let Some(w) = info.storage_unit_cost {
                write!(out, " wcost={w}").unwrap();
            }
        }
        out.push('\n');
    }
    for link in net.links() {
        write!(out, "link {} {}", link.a, link.b).unwrap();
        if let Some(c) = link.capacity {
            write!(out, " cap={c}").unwrap();
        }
        writeln!(out, " cost={}", link.cost).unwrap();
    }
    out
}
