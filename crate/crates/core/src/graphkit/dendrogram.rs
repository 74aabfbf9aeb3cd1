//! Girvan-Newman community hierarchy.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{edge_betweenness, Graph};
use crate::error::{Error, Result};
use crate::model::DeviceId;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Community {
    pub members: BTreeSet<DeviceId>,
    /// Number of splits separating this community from the root.
    pub depth: u32,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl Community {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn min_member(&self) -> DeviceId {
        self.members.first().copied().unwrap_or(DeviceId::MAX)
    }
}

/// Community tree; index 0 is the root holding every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dendrogram {
    communities: Vec<Community>,
}

impl Dendrogram {
    pub fn root(&self) -> &Community {
        &self.communities[0]
    }

    pub fn get(&self, idx: usize) -> &Community {
        &self.communities[idx]
    }

    pub fn communities(&self) -> &[Community] {
        &self.communities
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    /// Indented text, one community per line: `depth: member ids`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![0usize];
        while let Some(idx) = stack.pop() {
            let c = &self.communities[idx];
            let ids: Vec<String> = c.members.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{}{}: {}", "  ".repeat(c.depth as usize), c.depth, ids.join(" "));
            stack.extend(c.children.iter().rev());
        }
        out
    }

    fn push_split(&mut self, parent: usize, parts: Vec<BTreeSet<DeviceId>>, leaf_of: &mut HashMap<DeviceId, usize>) {
        let depth = self.communities[parent].depth + 1;
        for members in parts {
            let idx = self.communities.len();
            for &m in &members {
                leaf_of.insert(m, idx);
            }
            self.communities.push(Community { members, depth, parent: Some(parent), children: Vec::new() });
            self.communities[parent].children.push(idx);
        }
    }
}

/// Edge removed next by Girvan-Newman: maximal betweenness, ties broken by
/// the lexicographically smallest endpoint pair.
pub fn max_betweenness_edge<T: Scalar>(graph: &Graph) -> Option<(u32, u32)> {
    let scores = edge_betweenness::<T>(graph);
    let max = scores.values().copied().reduce(|a, b| if b > a { b } else { a })?;
    scores.iter().find(|(_, v)| v.ties(max)).map(|(k, _)| *k)
}

/// Repeatedly removes the max-betweenness edge, recording each component
/// split as a new level of the hierarchy, until every node is isolated.
/// A disconnected input is treated as already split once at the root.
pub fn girvan_newman<T: Scalar>(graph: &Graph) -> Dendrogram {
    let mut dendrogram = Dendrogram {
        communities: vec![Community { members: graph.nodes().collect(), depth: 0, parent: None, children: Vec::new() }],
    };
    let mut leaf_of: HashMap<DeviceId, usize> = graph.nodes().map(|n| (n, 0)).collect();
    let initial = graph.components();
    if initial.len() > 1 {
        dendrogram.push_split(0, initial, &mut leaf_of);
    }

    let mut work = graph.clone();
    while let Some((a, b)) = max_betweenness_edge::<T>(&work) {
        work.remove_edge(a, b);
        let side_a = work.component_containing(a);
        if side_a.contains(&b) {
            continue;
        }
        let side_b = work.component_containing(b);
        let parent = leaf_of[&a];
        let mut parts = vec![side_a, side_b];
        parts.sort_by_key(|p| p.first().copied());
        dendrogram.push_split(parent, parts, &mut leaf_of);
    }
    dendrogram
}

/// Non-singleton communities containing `device`, deepest first (ties:
/// smaller community, then smaller minimum member). Returns dendrogram
/// indices.
pub fn communities_for_device(dendrogram: &Dendrogram, device: DeviceId) -> Result<Vec<usize>> {
    if !dendrogram.root().members.contains(&device) {
        return Err(Error::UnknownDevice(device));
    }
    let mut out: Vec<usize> = (0..dendrogram.len())
        .filter(|&i| {
            let c = dendrogram.get(i);
            c.len() >= 2 && c.members.contains(&device)
        })
        .collect();
    out.sort_by(|&x, &y| {
        let (cx, cy) = (dendrogram.get(x), dendrogram.get(y));
        cy.depth
            .cmp(&cx.depth)
            .then(cx.len().cmp(&cy.len()))
            .then(cx.min_member().cmp(&cy.min_member()))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn barbell() -> Graph {
        Graph::from_edges([], [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])
    }

    fn check_structure(d: &Dendrogram) {
        for c in d.communities() {
            if c.children.is_empty() {
                assert_eq!(c.len(), 1, "leaves are singletons");
                continue;
            }
            let mut union = BTreeSet::new();
            for &ch in &c.children {
                let child = d.get(ch);
                assert!(child.depth > c.depth);
                assert!(child.members.is_disjoint(&union));
                union.extend(child.members.iter().copied());
            }
            assert_eq!(union, c.members);
        }
    }

    #[test]
    fn barbell_first_split_is_the_two_triangles() {
        let d = girvan_newman::<f64>(&barbell());
        check_structure(&d);
        let root = d.root();
        assert_eq!(root.children.len(), 2);
        assert_eq!(d.get(root.children[0]).members, BTreeSet::from([0, 1, 2]));
        assert_eq!(d.get(root.children[1]).members, BTreeSet::from([3, 4, 5]));
        assert_eq!(d.get(root.children[0]).depth, 1);
        assert_eq!(girvan_newman::<Exact>(&barbell()), d);
    }

    #[test]
    fn single_edge() {
        let d = girvan_newman::<f64>(&Graph::from_edges([], [(4, 7)]));
        assert_eq!(d.len(), 3);
        assert_eq!(d.get(1).members, BTreeSet::from([4]));
        assert_eq!(d.get(2).members, BTreeSet::from([7]));
        assert_eq!(d.get(1).depth, 1);
    }

    #[test]
    fn communities_for_left_triangle_device() {
        let d = girvan_newman::<f64>(&barbell());
        let list = communities_for_device(&d, 1).unwrap();
        let sets: Vec<_> = list.iter().map(|&i| d.get(i).members.clone()).collect();
        // the triangle is cut into a pair and a singleton, so a deeper
        // two-node community may precede the triangle
        assert!(sets.iter().all(|s| s.len() >= 2 && s.contains(&1)));
        let tri = sets.iter().position(|s| *s == BTreeSet::from([0, 1, 2])).unwrap();
        let whole = sets.iter().position(|s| s.len() == 6).unwrap();
        assert!(tri < whole);
        assert_eq!(whole, sets.len() - 1);
        assert!(communities_for_device(&d, 42).is_err());
    }

    #[test]
    fn star_centre_communities_exclude_singletons() {
        let g = Graph::from_edges([], [(0, 1), (0, 2), (0, 3), (0, 4)]);
        let d = girvan_newman::<f64>(&g);
        check_structure(&d);
        let list = communities_for_device(&d, 0).unwrap();
        // leaves peel off in id order: {0..4} -> {0,2,3,4} -> {0,3,4} -> {0,4}
        let sets: Vec<_> = list.iter().map(|&i| d.get(i).members.clone()).collect();
        assert_eq!(
            sets,
            vec![
                BTreeSet::from([0, 4]),
                BTreeSet::from([0, 3, 4]),
                BTreeSet::from([0, 2, 3, 4]),
                BTreeSet::from([0, 1, 2, 3, 4]),
            ]
        );
    }

    #[test]
    fn text_export_indents_by_depth() {
        let d = girvan_newman::<f64>(&Graph::from_edges([], [(0, 1)]));
        assert_eq!(d.to_text(), "0: 0 1\n  1: 0\n  1: 1\n");
    }
}
