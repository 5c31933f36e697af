#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ewbackup::netmodel::{DcInfo, Instance, InstanceParams, Link, Network, NodeId, PathLimit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Link cost table of the InternetMCI backbone, three (link, cost) columns
/// per row as printed.
const TABLE: &str = "
(0,1) 625  (4,8) 105   (9,10) 157
(0,3) 133  (4,9) 240   (9,16) 602
(1,2) 352  (4,16) 826  (11,12) 393
(2,3) 488  (5,8) 9     (11,14) 761
(2,7) 1309 (6,7) 35    (12,13) 49
(2,9) 365  (6,12) 223  (12,14) 701
(2,10) 7213 (7,12) 249 (14,15) 423
(3,7) 824  (8,9) 135   (14,16) 532
(3,15) 269 (8,14) 1230 (15,16) 128
(3,16) 256 (8,16) 725  (16,17) 249
(4,5) 99   (8,18) 300  (17,18) 252
";

pub fn table() -> Vec<(usize, usize, u64)> {
    let tokens: Vec<&str> = TABLE.split_whitespace().collect();
    tokens
        .chunks(2)
        .map(|pair| {
            let (a, b) = pair[0]
                .trim_matches(|c| c == '(' || c == ')')
                .split_once(',')
                .unwrap();
            (a.parse().unwrap(), b.parse().unwrap(), pair[1].parse().unwrap())
        })
        .collect()
}

pub fn net(
    n: usize,
    links: &[(usize, usize, u32, u64)],
    dcs: &[(usize, Option<(u64, u64)>)],
) -> Network {
    let links = links
        .iter()
        .map(|&(a, b, cap, cost)| Link::new(NodeId(a), NodeId(b), Some(cap), cost))
        .collect();
    let dcs: BTreeMap<NodeId, DcInfo> = dcs
        .iter()
        .map(|&(v, info)| {
            let info = match info {
                Some((s, w)) => DcInfo {
                    storage_capacity: Some(s),
                    storage_unit_cost: Some(w),
                },
                None => DcInfo::default(),
            };
            (NodeId(v), info)
        })
        .collect();
    Network::new(n, links, dcs).unwrap()
}

pub fn instance(
    network: Network,
    affected: usize,
    safe: &[usize],
    sizes: &[u64],
    epsilon1: u64,
) -> Instance {
    Instance::generate_paths(
        network,
        NodeId(affected),
        safe.iter().map(|&v| NodeId(v)).collect(),
        sizes,
        InstanceParams {
            epsilon1,
            ..InstanceParams::default()
        },
    )
}

/// Path 0-1 then a fork to DCs 2 and 3; one item of size 5 at node 0.
pub fn tiny4() -> Instance {
    tiny4_with(10)
}

pub fn tiny4_with(cap_12: u32) -> Instance {
    let network = net(
        4,
        &[(0, 1, 10, 1), (1, 2, cap_12, 1), (1, 3, 10, 2)],
        &[(0, None), (2, Some((10, 1))), (3, Some((10, 1)))],
    );
    instance(network, 0, &[2, 3], &[5], 1)
}

/// Random instance with at most 4 nodes and 2 items, small enough for
/// brute force.
pub fn random_tiny(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let inst = draw_tiny(&mut rng);
        if enumeration_size(&inst) <= 4_000 {
            return inst;
        }
    }
}

/// Channel vectors times amount splits, summed over items.
pub fn enumeration_size(inst: &Instance) -> u64 {
    let net = &inst.network;
    inst.data_items
        .iter()
        .map(|item| {
            let vectors: u64 = item
                .candidate_paths
                .iter()
                .map(|p| p.bottleneck(net).unwrap() as u64 + 1)
                .product();
            vectors * splits(item.size, inst.safe_dcs.len()).len() as u64
        })
        .sum()
}

fn draw_tiny(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(2..=4);
    let mut links = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.6) {
                links.push((a, b, rng.gen_range(1..=3), rng.gen_range(1..=5)));
            }
        }
    }
    let safe: Vec<usize> = (1..n).filter(|_| rng.gen_bool(0.7)).collect();
    let safe = if safe.is_empty() { vec![n - 1] } else { safe };
    let mut dcs: Vec<(usize, Option<(u64, u64)>)> = vec![(0, None)];
    for &v in &safe {
        dcs.push((v, Some((rng.gen_range(1..=6), rng.gen_range(1..=4)))));
    }
    let items = rng.gen_range(1..=2);
    let sizes: Vec<u64> = (0..items).map(|_| rng.gen_range(1..=4)).collect();
    let epsilon1 = rng.gen_range(1..=3);
    let mut inst = Instance::generate_paths(
        net(n, &links, &dcs),
        NodeId(0),
        safe.iter().map(|&v| NodeId(v)).collect(),
        &sizes,
        InstanceParams {
            epsilon1,
            pn: if rng.gen_bool(0.3) {
                PathLimit::AtMost(1)
            } else {
                PathLimit::Unbounded
            },
            vn: rng.gen_bool(0.3).then_some(1),
            lambda: None,
            max_hops: Some(2),
        },
    );
    inst.lambda = inst.default_lambda();
    inst
}

/// One item's choice: amount per safe DC and channels per candidate path.
struct Option_ {
    storage: Vec<u64>,
    links: Vec<u64>,
    cost: u64,
}

fn splits(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in splits(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Cheapest plan by enumerating every amount split and channel vector,
/// with selection flags implied by nonzero amounts. Checks every rule
/// directly, the time limit in ratio form.
pub fn brute_force_cost(inst: &Instance) -> Option<u64> {
    let net = &inst.network;
    let safe: Vec<NodeId> = inst.safe_dcs.iter().copied().collect();
    let mut per_item: Vec<Vec<Option_>> = Vec::new();
    for item in &inst.data_items {
        let paths = &item.candidate_paths;
        let caps: Vec<u64> = paths
            .iter()
            .map(|p| p.links.iter().map(|&l| net.link(l).capacity.unwrap() as u64).min().unwrap())
            .collect();
        let mut options = Vec::new();
        let mut channels = vec![0u64; paths.len()];
        loop {
            for split in splits(item.size, safe.len()) {
                if let Some(o) = check_item(inst, &safe, item, &split, &channels) {
                    options.push(o);
                }
            }
            // Next channel vector, odometer style.
            let mut k = 0;
            while k < channels.len() {
                if channels[k] < caps[k] {
                    channels[k] += 1;
                    break;
                }
                channels[k] = 0;
                k += 1;
            }
            if k == channels.len() {
                break;
            }
        }
        // Same resource use: only the cheapest matters.
        let mut cheapest: BTreeMap<(Vec<u64>, Vec<u64>), u64> = BTreeMap::new();
        for o in options {
            let c = cheapest.entry((o.storage, o.links)).or_insert(o.cost);
            *c = (*c).min(o.cost);
        }
        per_item.push(
            cheapest
                .into_iter()
                .map(|((storage, links), cost)| Option_ { storage, links, cost })
                .collect(),
        );
    }
    let mut best: Option<u64> = None;
    let mut storage = vec![0u64; safe.len()];
    let mut links = vec![0u64; net.links().len()];
    combine(inst, &safe, &per_item, 0, &mut storage, &mut links, 0, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn combine(
    inst: &Instance,
    safe: &[NodeId],
    per_item: &[Vec<Option_>],
    d: usize,
    storage: &mut Vec<u64>,
    links: &mut Vec<u64>,
    cost: u64,
    best: &mut Option<u64>,
) {
    if d == per_item.len() {
        let ok_storage = safe
            .iter()
            .zip(storage.iter())
            .all(|(&v, &s)| s <= inst.storage_capacity(v));
        let ok_links = inst
            .network
            .links()
            .iter()
            .zip(links.iter())
            .all(|(l, &u)| u <= l.capacity.unwrap() as u64);
        if ok_storage && ok_links && best.map_or(true, |b| cost < b) {
            *best = Some(cost);
        }
        return;
    }
    for o in &per_item[d] {
        for (s, x) in storage.iter_mut().zip(&o.storage) {
            *s += x;
        }
        for (l, x) in links.iter_mut().zip(&o.links) {
            *l += x;
        }
        combine(inst, safe, per_item, d + 1, storage, links, cost + o.cost, best);
        for (s, x) in storage.iter_mut().zip(&o.storage) {
            *s -= x;
        }
        for (l, x) in links.iter_mut().zip(&o.links) {
            *l -= x;
        }
    }
}

fn check_item(
    inst: &Instance,
    safe: &[NodeId],
    item: &ewbackup::netmodel::DataItem,
    split: &[u64],
    channels: &[u64],
) -> Option<Option_> {
    let net = &inst.network;
    let chosen: BTreeSet<NodeId> = safe
        .iter()
        .zip(split)
        .filter(|(_, &n)| n > 0)
        .map(|(&v, _)| v)
        .collect();
    if chosen.is_empty() || chosen.len() > inst.vn as usize {
        return None;
    }
    let mut to: BTreeMap<NodeId, (u64, usize, usize)> = BTreeMap::new();
    for (p, &b) in item.candidate_paths.iter().zip(channels) {
        let e = to.entry(p.destination()).or_default();
        e.2 += 1;
        if b > 0 {
            if !chosen.contains(&p.destination()) {
                return None;
            }
            e.0 += b;
            e.1 += 1;
        }
    }
    for (&v, &n) in safe.iter().zip(split) {
        let (bw, used, available) = to.get(&v).copied().unwrap_or_default();
        if used > inst.pn.cap(available) {
            return None;
        }
        if n > 0 && (bw == 0 || n as f64 / bw as f64 > inst.epsilon1 as f64) {
            return None;
        }
        if n > inst.storage_capacity(v) {
            return None;
        }
    }
    let mut links = vec![0u64; net.links().len()];
    let mut cost = 0;
    for (p, &b) in item.candidate_paths.iter().zip(channels) {
        for &l in &p.links {
            links[l.0] += b;
            cost += b * net.link(l).cost;
        }
    }
    for (&v, &n) in safe.iter().zip(split) {
        cost += n * inst.storage_unit_cost(v);
    }
    Some(Option_ {
        storage: split.to_vec(),
        links,
        cost,
    })
}
