//! Seeded random topologies and application shapes, plus gateway selection.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{node_betweenness, Graph};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Preferential-attachment graph on nodes `0..n`. Starts from a clique on
/// `0..=m`; every later node attaches to `m` distinct existing nodes chosen
/// with probability proportional to degree. Edge count is
/// `m(m+1)/2 + (n-m-1)m`.
pub fn generate_barabasi_albert(n: u32, m: u32, seed: u64) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::InvalidParams(format!("barabasi-albert needs n > m >= 1, got n={n} m={m}")));
    }
    let mut rng = rng_for(seed);
    let mut g = Graph::new();
    // each node appears once per incident edge
    let mut endpoints: Vec<u32> = Vec::new();
    for a in 0..=m {
        g.add_node(a);
        for b in 0..a {
            g.add_edge(b, a);
            endpoints.extend([a, b]);
        }
    }
    for node in m + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m as usize {
            targets.insert(endpoints[rng.gen_range(0..endpoints.len())]);
        }
        g.add_node(node);
        for t in targets {
            g.add_edge(t, node);
            endpoints.extend([t, node]);
        }
    }
    Ok(g)
}

/// Growing-network tree on `0..n`: node `k` gets a single parent drawn
/// uniformly from `0..k`. Returns `(parent, child)` edges in child order;
/// node 0 is the root.
pub fn generate_gn_application(n_services: u32, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = rng_for(seed);
    (1..n_services).map(|k| (rng.gen_range(0..k), k)).collect()
}

/// Node with the highest betweenness (ties: smallest id), where the cloud
/// attaches.
pub fn cloud_attachment_node(graph: &Graph) -> Option<u32> {
    let nb = node_betweenness::<f64>(graph);
    let mut best: Option<(u32, f64)> = None;
    for (&id, &score) in &nb {
        match best {
            Some((_, b)) if score.cmp_ties(b) != Ordering::Greater => {}
            _ => best = Some((id, score)),
        }
    }
    best.map(|(id, _)| id)
}

/// The `floor(fraction * n)` nodes with the lowest node betweenness (ties:
/// smaller id), never including the cloud-attachment node.
pub fn select_gateways(graph: &Graph, fraction: f64) -> Result<BTreeSet<u32>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParams(format!("gateway fraction must be in (0, 1), got {fraction}")));
    }
    let count = (fraction * graph.node_count() as f64 + 1e-9).floor() as usize;
    let excluded = cloud_attachment_node(graph);
    let nb = node_betweenness::<f64>(graph);
    let mut ranked: Vec<(u32, f64)> = nb.into_iter().filter(|(id, _)| Some(*id) != excluded).collect();
    ranked.sort_by(|a, b| a.1.cmp_ties(b.1).then(a.0.cmp(&b.0)));
    Ok(ranked.into_iter().take(count).map(|(id, _)| id).collect())
}
