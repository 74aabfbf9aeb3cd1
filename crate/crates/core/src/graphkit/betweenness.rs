//! Hop-count betweenness centrality (Brandes accumulation).
//!
//! Scores are sums over unordered node pairs `{s, t}` of the fraction of
//! shortest `s`-`t` paths that use the edge (or pass through the node).

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::Graph;
use crate::scalar::Scalar;

struct SourceDag {
    // nodes in non-decreasing distance from the source
    order: Vec<usize>,
    sigma: Vec<u64>,
    preds: Vec<Vec<usize>>,
}

fn bfs_dag(adj: &[Vec<usize>], source: usize) -> SourceDag {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0u64; n];
    let mut preds = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    dist[source] = 0;
    sigma[source] = 1;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    SourceDag { order, sigma, preds }
}

fn dense(graph: &Graph) -> (Vec<u32>, Vec<Vec<usize>>) {
    let ids: Vec<u32> = graph.nodes().collect();
    let pos: HashMap<u32, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let adj = ids.iter().map(|&id| graph.neighbors(id).map(|n| pos[&n]).collect()).collect();
    (ids, adj)
}

/// Edge betweenness keyed by `(low, high)` endpoint pairs.
pub fn edge_betweenness<T: Scalar>(graph: &Graph) -> BTreeMap<(u32, u32), T> {
    let (ids, adj) = dense(graph);
    let n = ids.len();
    let edges: Vec<(u32, u32)> = graph.edges().collect();
    // edge_of[v][k] is the edge index of adj[v][k]
    let edge_of: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            adj[v]
                .iter()
                .map(|&w| {
                    let key = (ids[v].min(ids[w]), ids[v].max(ids[w]));
                    edges.binary_search(&key).expect("adjacency edge is listed")
                })
                .collect()
        })
        .collect();
    let mut score = vec![T::zero(); edges.len()];
    for s in 0..n {
        let dag = bfs_dag(&adj, s);
        let mut delta = vec![T::zero(); n];
        for &w in dag.order.iter().rev() {
            let sigma_w = T::from_count(dag.sigma[w]);
            let carry = T::one() + delta[w];
            for &v in &dag.preds[w] {
                let credit = T::from_count(dag.sigma[v]) / sigma_w * carry;
                let k = adj[w].iter().position(|&x| x == v).expect("predecessor is a neighbour");
                score[edge_of[w][k]] += credit;
                delta[v] += credit;
            }
        }
    }
    let two = T::from_count(2);
    edges.into_iter().zip(score).map(|(e, v)| (e, v / two)).collect()
}

/// Node betweenness (endpoints excluded), unnormalised.
pub fn node_betweenness<T: Scalar>(graph: &Graph) -> BTreeMap<u32, T> {
    let (ids, adj) = dense(graph);
    let n = ids.len();
    let mut score = vec![T::zero(); n];
    for s in 0..n {
        let dag = bfs_dag(&adj, s);
        let mut delta = vec![T::zero(); n];
        for &w in dag.order.iter().rev() {
            let sigma_w = T::from_count(dag.sigma[w]);
            let carry = T::one() + delta[w];
            for &v in &dag.preds[w] {
                delta[v] += T::from_count(dag.sigma[v]) / sigma_w * carry;
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }
    let two = T::from_count(2);
    ids.into_iter().zip(score).map(|(id, v)| (id, v / two)).collect()
}
