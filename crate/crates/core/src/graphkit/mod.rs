//! Graph algorithms used by the placement policies and the simulator.

mod betweenness;
mod closure;
mod dendrogram;
mod generators;
mod graph;
mod routing;
mod text;

pub use betweenness::{edge_betweenness, node_betweenness};
pub use closure::{transitive_closure, ClosureSet};
pub use dendrogram::{communities_for_device, girvan_newman, max_betweenness_edge, Community, Dendrogram};
pub use generators::{cloud_attachment_node, rng_for, generate_barabasi_albert, generate_gn_application, select_gateways};
pub use graph::Graph;
pub use routing::{delay_tree, min_delay_path, DelayTree, Route};
pub use text::{read_edge_list, write_edge_list};
