use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Simple undirected, unweighted graph over integer node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<u32, BTreeSet<u32>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(nodes: impl IntoIterator<Item = u32>, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut g = Graph::new();
        for n in nodes {
            g.add_node(n);
        }
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_node(&mut self, id: u32) {
        self.adj.entry(id).or_default();
    }

    /// Adds `a - b`. Self-loops are ignored.
    pub fn add_edge(&mut self, a: u32, b: u32) {
        if a == b {
            return;
        }
        self.adj.entry(a).or_default().insert(b);
        self.adj.entry(b).or_default().insert(a);
    }

    pub fn remove_edge(&mut self, a: u32, b: u32) -> bool {
        let removed = self.adj.get_mut(&a).is_some_and(|s| s.remove(&b));
        if let Some(s) = self.adj.get_mut(&b) {
            s.remove(&a);
        }
        removed
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adj.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn contains(&self, id: u32) -> bool {
        self.adj.contains_key(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = u32> + '_ {
        self.adj.keys().copied()
    }

    pub fn neighbors(&self, id: u32) -> impl Iterator<Item = u32> + '_ {
        self.adj.get(&id).into_iter().flatten().copied()
    }

    pub fn degree(&self, id: u32) -> usize {
        self.adj.get(&id).map_or(0, BTreeSet::len)
    }

    /// Edges as `(low, high)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&a, ns)| ns.range(a + 1..).map(move |&b| (a, b)))
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn component_containing(&self, start: u32) -> BTreeSet<u32> {
        let mut seen = BTreeSet::new();
        if !self.contains(start) {
            return seen;
        }
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Connected components, ordered by smallest member.
    pub fn components(&self) -> Vec<BTreeSet<u32>> {
        let mut assigned = BTreeSet::new();
        let mut out = Vec::new();
        for n in self.nodes() {
            if assigned.contains(&n) {
                continue;
            }
            let comp = self.component_containing(n);
            assigned.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        match self.nodes().next() {
            None => true,
            Some(first) => self.component_containing(first).len() == self.node_count(),
        }
    }
}
