//! The 19-node U.S. InternetMCI backbone.

use std::collections::BTreeMap;

use super::network::{DcInfo, Link, Network, NodeId};

/// `(u, v, per-wavelength cost)` for every link, cost being the link length.
pub const INTERNETMCI_LINKS: [(usize, usize, u64); 33] = [
    (0, 1, 625),
    (0, 3, 133),
    (1, 2, 352),
    (2, 3, 488),
    (2, 7, 1309),
    (2, 9, 365),
    (2, 10, 7213),
    (3, 7, 824),
    (3, 15, 269),
    (3, 16, 256),
    (4, 5, 99),
    (4, 8, 105),
    (4, 9, 240),
    (4, 16, 826),
    (5, 8, 9),
    (6, 7, 35),
    (6, 12, 223),
    (7, 12, 249),
    (8, 9, 135),
    (8, 14, 1230),
    (8, 16, 725),
    (8, 18, 300),
    (9, 10, 157),
    (9, 16, 602),
    (11, 12, 393),
    (11, 14, 761),
    (12, 13, 49),
    (12, 14, 701),
    (14, 15, 423),
    (14, 16, 532),
    (15, 16, 128),
    (16, 17, 249),
    (17, 18, 252),
];

pub const INTERNETMCI_NODES: usize = 19;

/// Data-center sites of the five-DC deployment.
pub const INTERNETMCI_DCS: [usize; 5] = [3, 9, 12, 14, 18];

/// Data-center sites of the eleven-DC deployment used for the scaling run.
pub const INTERNETMCI_DCS_11: [usize; 11] = [2, 3, 5, 7, 8, 9, 11, 12, 14, 15, 16];

fn build(dcs: &[usize]) -> Network {
    let links = INTERNETMCI_LINKS
        .iter()
        .map(|&(u, v, c)| Link::new(NodeId(u), NodeId(v), None, c))
        .collect();
    let dcs: BTreeMap<NodeId, DcInfo> = dcs
        .iter()
        .map(|&v| (NodeId(v), DcInfo::default()))
        .collect();
    Network::new(INTERNETMCI_NODES, links, dcs).expect("built-in table is well formed")
}

/// InternetMCI with DCs at nodes 3, 9, 12, 14 and 18. Capacities and storage
/// figures are unset.
pub fn builtin_internetmci() -> Network {
    build(&INTERNETMCI_DCS)
}

/// InternetMCI with eleven DCs: node 3 plus 2, 5, 7, 8, 9, 11, 12, 14, 15, 16.
pub fn builtin_internetmci_11dc() -> Network {
    build(&INTERNETMCI_DCS_11)
}
