//! Backbone networks, data centers and disaster scenarios.

mod instance;
mod internetmci;
mod network;
mod topology;

pub use instance::{
    instance_from_toml, instance_to_toml, validate_instance, DataItem, Instance,
    InstanceFileError, InstanceParams, InstanceViolation, PathLimit,
};
pub use internetmci::{
    builtin_internetmci, builtin_internetmci_11dc, INTERNETMCI_DCS, INTERNETMCI_DCS_11,
    INTERNETMCI_LINKS, INTERNETMCI_NODES,
};
pub use network::{DcInfo, Link, LinkId, Network, NetworkError, NodeId};
pub use topology::{parse_topology, serialize_topology, TopologyError};
